"""Super-resolver priors ``SR(z, scale, noise_level)``.

A prior maps a noisy LR image, assumed to be a bicubic downsample of the
wanted HR image plus white noise of the given level (8-bit units), to an HR
estimate. The built-in one is classical (transform-domain shrinkage followed
by bicubic upsampling); neural models plug in through :class:`ExternalPrior`.
"""

import os
import shlex
import subprocess
import tempfile
import threading
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dctn, idctn

from pnpsr.errors import CapabilityError, ExternalPriorError
from pnpsr.fileio import read_pfm, write_pfm
from pnpsr.image import as_float_image, resize_bicubic

THRESHOLD_FACTOR = 2.7
WINDOW = 8
STRIDE = 4


def shrinkage_denoise(img, noise_level, window=WINDOW, stride=STRIDE, factor=THRESHOLD_FACTOR):
    """Overlapping-block DCT hard thresholding.

    Each ``window x window`` block (step ``stride``) is transformed with an
    orthonormal 2-D DCT, AC coefficients with magnitude at or below
    ``factor * noise_level / 255`` are zeroed, and the inverse-transformed
    blocks are averaged uniformly where they overlap. The image is extended
    symmetrically at the bottom/right so the block grid covers it exactly.
    """
    img = as_float_image(img)
    if noise_level < 0:
        raise ValueError("noise_level must be nonnegative")
    if window % stride:
        raise ValueError("window must be a multiple of stride")
    if noise_level == 0:
        return img.copy()

    x = img if img.ndim == 3 else img[:, :, None]
    h, w = x.shape[:2]

    def padded(n):
        return window + stride * -(-max(n - window, 0) // stride)

    hh, ww = padded(h), padded(w)
    x = np.pad(x, ((0, hh - h), (0, ww - w), (0, 0)), mode="symmetric")
    nc = x.shape[2]

    blocks = sliding_window_view(x, (window, window), axis=(0, 1))[::stride, ::stride]
    coef = dctn(blocks, axes=(-2, -1), norm="ortho")
    keep = np.abs(coef) > factor * noise_level / 255.0
    keep[..., 0, 0] = True
    est = idctn(np.where(keep, coef, 0.0), axes=(-2, -1), norm="ortho")

    # blocks whose grid indices agree modulo window/stride tile without overlap
    acc = np.zeros_like(x)
    cnt = np.zeros((hh, ww, 1))
    step = window // stride
    for pi in range(step):
        for pj in range(step):
            tiles = est[pi::step, pj::step]
            if tiles.size == 0:
                continue
            tr, tc = tiles.shape[:2]
            mosaic = tiles.transpose(0, 3, 1, 4, 2).reshape(tr * window, tc * window, nc)
            r0, c0 = pi * stride, pj * stride
            acc[r0 : r0 + tr * window, c0 : c0 + tc * window] += mosaic
            cnt[r0 : r0 + tr * window, c0 : c0 + tc * window] += 1.0
    out = (acc / cnt)[:h, :w]
    return out if img.ndim == 3 else out[:, :, 0]


class SuperResolver:
    """Base class: capability checks and output validation around ``_run``."""

    scales = frozenset()
    noise_range = (0.0, 50.0)

    def _run(self, z, scale, noise_level):
        raise NotImplementedError

    def super_resolve(self, z, scale, noise_level):
        z = as_float_image(z)
        if scale not in self.scales:
            raise CapabilityError(f"scale {scale} not in supported set {sorted(self.scales)}")
        lo, hi = self.noise_range
        if not lo <= noise_level <= hi:
            raise CapabilityError(f"noise level {noise_level} outside [{lo}, {hi}]")
        out = self._run(z, scale, noise_level)
        h, w = z.shape[:2]
        expected = (scale * h, scale * w) + z.shape[2:]
        if out.shape != expected:
            raise ValueError(f"prior returned shape {out.shape}, expected {expected}")
        if not np.all(np.isfinite(out)):
            raise ValueError("prior returned non-finite values")
        return out

    __call__ = super_resolve


class BicubicShrinkagePrior(SuperResolver):
    """Denoise in the LR domain, then bicubic upsample."""

    scales = frozenset({1, 2, 3, 4})
    noise_range = (0.0, 50.0)

    def __init__(self, factor=THRESHOLD_FACTOR, window=WINDOW, stride=STRIDE):
        self.factor = factor
        self.window = window
        self.stride = stride

    def _run(self, z, scale, noise_level):
        clean = shrinkage_denoise(z, noise_level, self.window, self.stride, self.factor)
        h, w = z.shape[:2]
        if scale == 1:
            return clean
        return resize_bicubic(clean, scale * w, scale * h, antialias=True)


def builtin_bicubic_shrinkage_prior():
    return BicubicShrinkagePrior()


DEFAULT_ARGS = "--in {in} --out {out} --scale {scale} --sigma {sigma}"


class ExternalPrior(SuperResolver):
    """Run a super-resolver as a child process, exchanging PFM files.

    ``command_template`` may use the placeholders ``{in}``, ``{out}``,
    ``{scale}`` and ``{sigma}``; without ``{in}`` the default
    ``--in {in} --out {out} --scale {scale} --sigma {sigma}`` is appended.
    Calls on one instance are serialised.
    """

    def __init__(self, command_template, scales=(1, 2, 3, 4), noise_range=(0.0, 50.0), timeout=None):
        if "{in}" not in command_template:
            command_template = f"{command_template} {DEFAULT_ARGS}"
        self.command_template = command_template
        self.scales = frozenset(scales)
        self.noise_range = tuple(noise_range)
        self.timeout = timeout
        self._lock = threading.Lock()

    def command(self, in_path, out_path, scale, sigma):
        subs = {"{in}": str(in_path), "{out}": str(out_path), "{scale}": str(int(scale)), "{sigma}": repr(float(sigma))}
        argv = []
        for tok in shlex.split(self.command_template):
            for key, val in subs.items():
                tok = tok.replace(key, val)
            argv.append(tok)
        return argv

    def _run(self, z, scale, noise_level):
        gray1 = z.ndim == 3 and z.shape[2] == 1
        with self._lock, tempfile.TemporaryDirectory(prefix="pnpsr-prior-") as tmp:
            in_path = Path(tmp) / "in.pfm"
            out_path = Path(tmp) / "out.pfm"
            write_pfm(in_path, z)
            os.chmod(in_path, 0o444)
            argv = self.command(in_path, out_path, scale, noise_level)
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise ExternalPriorError(f"could not run {argv[0]!r}: {exc}") from exc
            if proc.returncode != 0:
                raise ExternalPriorError(
                    f"external prior exited with code {proc.returncode}", proc.returncode, proc.stderr
                )
            if not out_path.exists():
                raise ExternalPriorError("external prior wrote no output", 0, proc.stderr)
            try:
                out = read_pfm(out_path).astype(np.float64)
            except ValueError as exc:
                raise ExternalPriorError(str(exc), 0, proc.stderr) from exc
        if gray1:
            out = out[:, :, None]
        h, w = z.shape[:2]
        if out.shape[:2] != (scale * h, scale * w) or out.ndim != z.ndim:
            raise ExternalPriorError(
                f"external prior returned shape {out.shape}, expected {(scale * h, scale * w) + z.shape[2:]}",
                0,
                proc.stderr,
            )
        return out


def external_prior(command_template, **kwargs):
    return ExternalPrior(command_template, **kwargs)
