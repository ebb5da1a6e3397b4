"""Command-line interface: kernel synthesis, degradation, super-resolution, evaluation, benchmarking, trace plots.

Exit codes: 0 success, 2 usage or input error, 3 runtime or prior error.
Every subcommand accepts ``--config FILE.toml``; keys of the table named
after the subcommand (dashes or underscores) act as defaults that explicit
flags override.
"""

import argparse
import logging
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from pnpsr.degrade import DegradationSpec, degrade, image_seed
from pnpsr.dpsr import SolverParams, Trace, run_dpsr
from pnpsr.errors import CapabilityError, ExternalPriorError, IllConditionedError
from pnpsr.fileio import read_png, write_png
from pnpsr.image import edge_taper, mod_crop, resize_bicubic
from pnpsr.kernels import (
    delta_kernel,
    disk_kernel,
    gaussian_kernel,
    kernel_preview,
    motion_kernel,
    read_kernel,
    write_kernel,
)
from pnpsr.metrics import psnr, ssim
from pnpsr.prior import ExternalPrior, builtin_bicubic_shrinkage_prior

log = logging.getLogger("pnpsr")

EXIT_USAGE = 2
EXIT_RUNTIME = 3

BENCH_HEADER = "scale,kernel_id,sigma,method,psnr,ssim"
BENCH_IMAGE_HEADER = "image,scale,kernel_id,sigma,method,psnr,ssim,status"


class UsageError(Exception):
    pass


def _repro(*tokens):
    line = "repro: pnpsr " + " ".join(shlex.quote(str(t)) for t in tokens)
    print(line)
    return line


def make_prior(spec):
    if spec is None or spec == "builtin":
        return builtin_bicubic_shrinkage_prior()
    if spec.startswith("exec:"):
        return ExternalPrior(spec[len("exec:"):])
    raise UsageError(f"unknown prior {spec!r}; use 'builtin' or 'exec:<command>'")


def _existing(path, what):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {path}")
    return p


# kernel ---------------------------------------------------------------------

def kernel_from_spec(spec):
    """Build a kernel from a config mapping with ``family`` (or ``file``) and parameters."""
    spec = dict(spec)
    if "file" in spec:
        return read_kernel(spec["file"])
    family = spec.pop("family", None)
    spec.pop("id", None)
    if family == "gaussian":
        return gaussian_kernel(
            int(spec.get("size", 15)),
            float(spec["sigma"]),
            float(spec.get("sigma_y", spec["sigma"])),
            float(spec.get("theta", 0.0)),
        )
    if family == "disk":
        return disk_kernel(float(spec["radius"]))
    if family == "motion":
        return motion_kernel(
            int(spec.get("seed", 0)),
            int(spec.get("size", 25)),
            int(spec.get("steps", 64)),
            float(spec.get("anxiety", 0.01)),
        )
    if family == "delta":
        return delta_kernel(int(spec.get("size", 1)))
    raise UsageError(f"unknown kernel family {family!r}")


def cmd_kernel(args):
    fam = args.family
    if fam == "gaussian":
        sigma_y = args.sigma if args.sigma_y is None else args.sigma_y
        k = gaussian_kernel(args.size, args.sigma, sigma_y, args.theta)
        tokens = ["--size", args.size, "--sigma", repr(args.sigma), "--sigma-y", repr(sigma_y), "--theta", repr(args.theta)]
    elif fam == "disk":
        k = disk_kernel(args.radius)
        tokens = ["--radius", repr(args.radius)]
    elif fam == "motion":
        k = motion_kernel(args.seed, args.size, args.steps, args.anxiety)
        tokens = ["--seed", args.seed, "--size", args.size, "--steps", args.steps, "--anxiety", repr(args.anxiety)]
    else:
        k = delta_kernel(args.size)
        tokens = ["--size", args.size]
    write_kernel(args.output, k)
    extra = []
    if args.preview:
        write_png(args.preview, kernel_preview(k))
        extra = ["--preview", args.preview]
    _repro("kernel", fam, *tokens, "-o", args.output, *extra)
    return 0


# degrade --------------------------------------------------------------------

def cmd_degrade(args):
    hr = read_png(_existing(args.input, "HR image"))
    kernel = read_kernel(_existing(args.kernel, "kernel file"))
    hr = mod_crop(hr, args.scale)
    spec = DegradationSpec(kernel, args.scale, args.sigma, args.seed, kernel_id=Path(args.kernel).name)
    lr = degrade(hr, spec)
    write_png(args.output, lr)
    print(f"degradation: {spec.describe()}")
    _repro("degrade", args.input, "-k", args.kernel, "--scale", args.scale, "--sigma", repr(args.sigma),
           "--seed", args.seed, "-o", args.output)
    return 0


# sr -------------------------------------------------------------------------

def cmd_sr(args):
    lr = read_png(_existing(args.input, "LR image"))
    kernel = read_kernel(_existing(args.kernel, "kernel file"))
    gt = read_png(_existing(args.gt, "ground truth")) if args.gt else None
    params = SolverParams(lam=args.lam, iterations=args.iters, nu_start=args.nu_start, nu_floor_min=args.nu_floor)
    prior = make_prior(args.prior)
    if args.edge_taper:
        lr = edge_taper(lr, kernel)
    x, trace = run_dpsr(lr, kernel, args.scale, args.sigma, params, prior, ground_truth=gt)
    write_png(args.output, x)
    trace_path = args.trace or str(Path(args.output).with_suffix(".trace.csv"))
    trace.to_csv(trace_path)
    tokens = ["sr", args.input, "-k", args.kernel, "--scale", args.scale, "--sigma", repr(args.sigma),
              "--iters", args.iters, "--lambda", repr(args.lam), "--nu-start", repr(args.nu_start),
              "--nu-floor", repr(args.nu_floor), "--prior", args.prior]
    if args.edge_taper:
        tokens.append("--edge-taper")
    if args.gt:
        tokens += ["--gt", args.gt]
    _repro(*tokens, "-o", args.output, "--trace", trace_path)
    return 0


# eval -----------------------------------------------------------------------

def cmd_eval(args):
    a = read_png(_existing(args.a, "image"))
    b = read_png(_existing(args.b, "image"))
    if a.shape != b.shape:
        raise UsageError(f"shape mismatch {a.shape} vs {b.shape}")
    c = args.crop
    p = psnr(a, b, c)
    s = ssim(a[c:-c, c:-c] if c else a, b[c:-c, c:-c] if c else b)
    print(f"psnr={p:.4f} ssim={s:.6f}")
    return 0


# bench ----------------------------------------------------------------------

@dataclass
class BenchConfig:
    dataset: str
    output: str = "bench_out"
    scales: list = field(default_factory=lambda: [2])
    kernels: list = field(default_factory=list)
    noise_levels: list = field(default_factory=lambda: [0.0])
    seed: int = 0
    prior: str = "builtin"
    jobs: int = 1
    solver: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, cfg, base_dir="."):
        cfg = dict(cfg)
        unknown = set(cfg) - set(cls.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown bench config keys: {sorted(unknown)}")
        if "dataset" not in cfg:
            raise UsageError("bench config needs 'dataset'")
        base = Path(base_dir)
        cfg["dataset"] = str(base / cfg["dataset"])
        kernels = []
        for i, k in enumerate(cfg.get("kernels", [])):
            k = dict(k)
            if "file" in k:
                k["file"] = str(base / k["file"])
            k.setdefault("id", f"{k.get('family', 'file')}{i}")
            kernels.append(k)
        cfg["kernels"] = kernels
        return cls(**cfg)

    def validate(self):
        if not Path(self.dataset).is_dir():
            raise UsageError(f"dataset directory not found: {self.dataset}")
        for k in self.kernels:
            if "file" in k and not Path(k["file"]).is_file():
                raise UsageError(f"kernel file not found: {k['file']}")
        if not (self.scales and self.kernels and self.noise_levels):
            raise UsageError("bench config needs at least one scale, kernel and noise level")

    def solver_params(self):
        s = {k.replace("-", "_"): v for k, v in self.solver.items()}
        if "lambda" in s:
            s["lam"] = s.pop("lambda")
        return SolverParams(**s)

    def images(self):
        return sorted(p for p in Path(self.dataset).iterdir() if p.suffix.lower() == ".png")


def _bench_cell(job):
    cfg, index, image_path, scale, kspec, sigma = job
    kid = kspec["id"]
    try:
        kernel = kernel_from_spec(kspec)
        hr = mod_crop(read_png(image_path), scale)
        spec = DegradationSpec(kernel, scale, sigma, image_seed(cfg.seed, index), kernel_id=kid)
        lr = degrade(hr, spec)
        x, _ = run_dpsr(lr, kernel, scale, sigma, cfg.solver_params(), make_prior(cfg.prior))
        h, w = hr.shape[:2]
        base = resize_bicubic(lr, w, h)
        rows = []
        for method, est in (("dpsr", x), ("bicubic", base)):
            c = scale
            rows.append((method, psnr(est, hr, c), ssim(est[c:-c, c:-c], hr[c:-c, c:-c]), "ok"))
        return rows
    except Exception as exc:  # a failed cell is reported, the run goes on
        log.error("bench cell %s scale=%s kernel=%s sigma=%s failed: %s", image_path.name, scale, kid, sigma, exc)
        return [(m, float("nan"), float("nan"), f"error: {type(exc).__name__}") for m in ("dpsr", "bicubic")]


def run_bench(cfg):
    """Run every (image, scale, kernel, sigma) cell; write per-image and summary CSVs.

    Returns ``(per_image_rows, summary_rows)``.
    """
    cfg.validate()
    images = cfg.images()
    if not images:
        raise UsageError(f"no PNG images in {cfg.dataset}")
    jobs = [
        (cfg, idx, path, int(s), k, float(sig))
        for s in cfg.scales
        for k in cfg.kernels
        for sig in cfg.noise_levels
        for idx, path in enumerate(images)
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_bench_cell, jobs))
    else:
        results = [_bench_cell(j) for j in jobs]

    per_image = []
    for (_, _, path, s, k, sig), rows in zip(jobs, results):
        for method, p, q, status in rows:
            per_image.append((path.name, s, k["id"], sig, method, p, q, status))
    per_image.sort(key=lambda r: (r[1], r[2], r[3], r[4], r[0]))

    summary = []
    keys = sorted({(r[1], r[2], r[3], r[4]) for r in per_image})
    for key in keys:
        ok = [r for r in per_image if (r[1], r[2], r[3], r[4]) == key and r[7] == "ok"]
        p = float(np.mean([r[5] for r in ok])) if ok else float("nan")
        q = float(np.mean([r[6] for r in ok])) if ok else float("nan")
        summary.append(key + (p, q))

    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w") as fh:
        fh.write(BENCH_IMAGE_HEADER + "\n")
        for r in per_image:
            fh.write(f"{r[0]},{r[1]},{r[2]},{r[3]!r},{r[4]},{r[5]!r},{r[6]!r},{r[7]}\n")
            fh.flush()
    with open(out / "summary.csv", "w") as fh:
        fh.write(BENCH_HEADER + "\n")
        for r in summary:
            fh.write(f"{r[0]},{r[1]},{r[2]!r},{r[3]},{r[4]!r},{r[5]!r}\n")
            fh.flush()
    return per_image, summary


def cmd_bench(args):
    path = _existing(args.config_file, "bench config")
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    raw = raw.get("bench", raw)
    cfg = BenchConfig.from_mapping(raw, base_dir=path.parent)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.output is not None:
        cfg.output = args.output
    _, summary = run_bench(cfg)
    for r in summary:
        print(f"scale={r[0]} kernel={r[1]} sigma={r[2]} {r[3]:8s} psnr={r[4]:.2f} ssim={r[5]:.4f}")
    _repro("bench", args.config_file, "--jobs", cfg.jobs, "--output", cfg.output)
    return 0


# trace-plot -----------------------------------------------------------------

def plot_traces(traces, labels):
    """Line chart of PSNR (when every trace has it) and data residual against iteration."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with_psnr = all(all(v is not None for v in t.column("psnr")) for t in traces)
    ncols = 2 if with_psnr else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5 * ncols, 3.8), squeeze=False)
    axes = axes[0]
    n = max(len(t) for t in traces)
    for t, label in zip(traces, labels):
        it = t.column("iter")
        axes[-1].semilogy(it, t.column("data_residual"), marker="o", ms=3, label=label)
        if with_psnr:
            axes[0].plot(it, t.column("psnr"), marker="o", ms=3, label=label)
    if with_psnr:
        axes[0].set_ylabel("PSNR (dB)")
    axes[-1].set_ylabel("data residual")
    for ax in axes:
        ax.set_xlabel("iteration")
        ax.set_xlim(1, n)
        ax.legend()
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def cmd_trace_plot(args):
    paths = [args.trace] + list(args.compare or [])
    traces = []
    for p in paths:
        try:
            traces.append(Trace.from_csv(_existing(p, "trace CSV")))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"malformed trace CSV {p}: {exc}") from exc
        if not len(traces[-1]):
            raise UsageError(f"trace CSV {p} has no rows")
    labels = list(args.labels) if args.labels else [Path(p).stem for p in paths]
    if len(labels) != len(paths):
        raise UsageError("--labels must name every trace")
    fig = plot_traces(traces, labels)
    fig.savefig(args.output, dpi=100, metadata={"Software": None})
    _repro("trace-plot", *paths[:1], *(["--compare", *paths[1:]] if paths[1:] else []),
           "--labels", *labels, "-o", args.output)
    return 0


# parser ---------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="pnpsr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--config", help="TOML file; the [%s] table supplies defaults" % name)
        sp.set_defaults(func=func)
        return sp

    k = add("kernel", cmd_kernel, help="synthesize a blur kernel file")
    k.add_argument("family", choices=["gaussian", "disk", "motion", "delta"])
    k.add_argument("--size", type=int, default=15)
    k.add_argument("--sigma", type=float, default=1.6)
    k.add_argument("--sigma-y", type=float)
    k.add_argument("--theta", type=float, default=0.0)
    k.add_argument("--radius", type=float, default=3.0)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--steps", type=int, default=64)
    k.add_argument("--anxiety", type=float, default=0.01)
    k.add_argument("-o", "--output", required=True)
    k.add_argument("--preview", help="also write a max-normalised PNG")

    d = add("degrade", cmd_degrade, help="synthesize an LR image: downsample, blur, add noise")
    d.add_argument("input")
    d.add_argument("-k", "--kernel", required=True)
    d.add_argument("--scale", type=int, default=2)
    d.add_argument("--sigma", type=float, default=0.0, help="noise std, 8-bit units")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("-o", "--output", required=True)

    s = add("sr", cmd_sr, help="super-resolve a blurry LR image")
    s.add_argument("input")
    s.add_argument("-k", "--kernel", required=True)
    s.add_argument("--scale", type=int, default=2)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--iters", type=int, default=15)
    s.add_argument("--lambda", dest="lam", type=float, default=0.3333)
    s.add_argument("--nu-start", type=float, default=49.0)
    s.add_argument("--nu-floor", type=float, default=2.55)
    s.add_argument("--prior", default="builtin", help="'builtin' or 'exec:<command template>'")
    s.add_argument("--edge-taper", action="store_true")
    s.add_argument("--gt", help="ground-truth HR image; adds PSNR to the trace")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--trace", help="trace CSV path (default: <output>.trace.csv)")

    e = add("eval", cmd_eval, help="PSNR/SSIM between two images")
    e.add_argument("a")
    e.add_argument("b")
    e.add_argument("--crop", type=int, default=0)

    b = add("bench", cmd_bench, help="run a degradation grid benchmark from a TOML config")
    b.add_argument("config_file")
    b.add_argument("--jobs", type=int)
    b.add_argument("--output")

    t = add("trace-plot", cmd_trace_plot, help="plot convergence traces")
    t.add_argument("trace")
    t.add_argument("--compare", nargs="+")
    t.add_argument("--labels", nargs="+")
    t.add_argument("-o", "--output", required=True)
    return p


def _scan_config(argv):
    command, config = None, None
    for i, tok in enumerate(argv):
        if command is None and not tok.startswith("-"):
            command = tok
        elif tok == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
        elif tok.startswith("--config="):
            config = tok.split("=", 1)[1]
    return command, config


def _apply_config(parser, argv):
    # the config table must become subparser defaults before the real parse,
    # so options it supplies are no longer required on the command line
    argv = list(sys.argv[1:] if argv is None else argv)
    command, config = _scan_config(argv)
    sub = parser._subparsers._group_actions[0].choices.get(command)
    if config and sub is not None:
        with open(_existing(config, "config file"), "rb") as fh:
            table = tomli.load(fh).get(command, {})
        defaults = {key.replace("-", "_"): val for key, val in table.items()}
        if "lambda" in defaults:
            defaults["lam"] = defaults.pop("lambda")
        known = {a.dest for a in sub._actions}
        unknown = set(defaults) - known
        if unknown:
            raise UsageError(f"unknown keys in [{command}]: {sorted(unknown)}")
        for a in sub._actions:
            if a.dest in defaults:
                a.required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except tomli.TOMLDecodeError as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ExternalPriorError, IllConditionedError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
