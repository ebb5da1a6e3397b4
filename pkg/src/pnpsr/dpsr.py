"""Half-quadratic splitting driver alternating the Fourier data step with a super-resolver prior."""

import csv
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from pnpsr.degrade import blur_circular
from pnpsr.errors import IllConditionedError
from pnpsr.image import as_float_image, resize_bicubic
from pnpsr.kernels import check_kernel, psf_to_otf
from pnpsr.metrics import psnr
from pnpsr.solver import data_step

# lower bound (8-bit units) on the noise level used inside rho, so sigma = 0
# does not collapse the data step into a bare deconvolution
NU_FLOOR_NUM = 1e-2

TRACE_HEADER = ["iter", "nu", "rho", "data_residual", "delta_x", "psnr"]


@dataclass(frozen=True)
class SolverParams:
    lam: float = 1 / 3
    iterations: int = 15
    nu_start: float = 49.0
    nu_floor_min: float = 2.55

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.nu_start < self.nu_floor_min:
            raise ValueError("nu_start must be >= nu_floor_min")

    def nu_end(self, sigma):
        return max(self.nu_floor_min, sigma)


@dataclass
class TraceRecord:
    iter: int
    nu: float
    rho: float
    data_residual: float
    delta_x: float
    psnr: float | None = None


@dataclass
class Trace:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return [getattr(r, name) for r in self.records]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for r in self.records:
                row = asdict(r)
                writer.writerow(
                    [row["iter"]]
                    + [repr(float(row[k])) for k in ("nu", "rho", "data_residual", "delta_x")]
                    + ["" if row["psnr"] is None else repr(float(row["psnr"]))]
                )

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = {"iter", "data_residual"} - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: trace CSV lacks columns {sorted(missing)}")
            records = []
            for row in reader:
                p = row.get("psnr") or ""
                records.append(
                    TraceRecord(
                        iter=int(row["iter"]),
                        nu=float(row.get("nu") or "nan"),
                        rho=float(row.get("rho") or "nan"),
                        data_residual=float(row["data_residual"]),
                        delta_x=float(row.get("delta_x") or "nan"),
                        psnr=float(p) if p else None,
                    )
                )
        return cls(records)


def schedule_nus(sigma, params=SolverParams()):
    """Geometric decay of the prior noise level from ``nu_start`` to
    ``max(nu_floor_min, sigma)``, both endpoints included."""
    n = params.iterations
    start, end = params.nu_start, params.nu_end(sigma)
    if end > start:
        raise ValueError(f"noise level {sigma} exceeds nu_start {start}")
    if n == 1:
        return [end]
    return [start * (end / start) ** (k / (n - 1)) for k in range(n)]


def run_dpsr(y, kernel, scale, sigma, params=SolverParams(), prior=None, ground_truth=None):
    """Super-resolve ``y`` (blurred by ``kernel`` after bicubic downsampling,
    noise std ``sigma`` in 8-bit units). Returns ``(x, trace)``."""
    from pnpsr.prior import builtin_bicubic_shrinkage_prior

    y = as_float_image(y)
    kernel = check_kernel(kernel)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if prior is None:
        prior = builtin_bicubic_shrinkage_prior()
    h, w = y.shape[:2]
    otf = psf_to_otf(kernel, w, h)
    otf_c = otf if y.ndim == 2 else otf[:, :, None]

    nus = schedule_nus(sigma, params)
    sigma_eff = max(math.sqrt(params.lam) * sigma, NU_FLOOR_NUM)

    x = prior(y, scale, params.nu_end(sigma))
    trace = Trace()
    for k, nu in enumerate(nus):
        rho = (sigma_eff / nu) ** 2  # mu_k * sigma_eff^2 with mu_k = 1 / nu_k^2
        x_down = resize_bicubic(x, w, h, antialias=True)
        try:
            z = data_step(y, otf, x_down, rho)
        except IllConditionedError as exc:
            raise IllConditionedError(f"iteration {k}: {exc}") from exc
        x_new = prior(z, scale, nu)

        resid = y - np.real(np.fft.ifft2(np.fft.fft2(z, axes=(0, 1)) * otf_c, axes=(0, 1)))
        trace.records.append(
            TraceRecord(
                iter=k + 1,
                nu=nu,
                rho=rho,
                data_residual=float(np.linalg.norm(resid)),
                delta_x=float(np.linalg.norm(x_new - x)),
                psnr=None if ground_truth is None else psnr(x_new, ground_truth, border_crop=scale),
            )
        )
        x = x_new
    return x, trace


def objective_value(x, y, kernel, scale, sigma):
    """Data-fidelity energy ``||y - (x down s) (*) k||^2 / (2 sigma^2)`` with
    sigma in 8-bit units; sigma = 0 falls back to ``NU_FLOOR_NUM`` with a warning."""
    x = as_float_image(x)
    y = as_float_image(y)
    if sigma <= 0:
        warnings.warn(f"sigma = {sigma}; using {NU_FLOOR_NUM} for the fidelity weight", stacklevel=2)
        sigma = NU_FLOOR_NUM
    h, w = y.shape[:2]
    if x.shape[:2] != (scale * h, scale * w):
        raise ValueError(f"x {x.shape[:2]} is not {scale}x the size of y {y.shape[:2]}")
    pred = blur_circular(resize_bicubic(x, w, h, antialias=True), kernel)
    s = sigma / 255.0
    return float(np.sum((y - pred) ** 2) / (2 * s * s))
