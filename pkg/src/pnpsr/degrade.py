"""LR synthesis: bicubic downsample, then circular blur, then additive white Gaussian noise."""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from pnpsr.image import as_float_image, resize_bicubic
from pnpsr.kernels import check_kernel


@dataclass(frozen=True)
class DegradationSpec:
    kernel: np.ndarray = field(repr=False)
    scale: int = 1
    sigma: float = 0.0  # noise std in 8-bit units
    seed: int = 0
    kernel_id: str = "kernel"

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        object.__setattr__(self, "kernel", check_kernel(self.kernel))

    def describe(self):
        kh, kw = self.kernel.shape
        return (
            f"kernel={self.kernel_id} ({kh}x{kw}) scale={self.scale} "
            f"sigma={self.sigma!r} seed={self.seed}"
        )


def blur_circular(img, kernel):
    """Spatial circular convolution, centre tap at ``shape // 2``.

    Computed as a direct tap sum so a delta kernel is an exact identity; it
    agrees with multiplication by :func:`pnpsr.kernels.psf_to_otf` up to
    rounding.
    """
    img = as_float_image(img)
    kernel = check_kernel(kernel)
    kh, kw = kernel.shape
    h, w = img.shape[:2]
    if kh > h or kw > w:
        raise ValueError(f"kernel {kh}x{kw} larger than image {h}x{w}")
    # ndimage.convolve flips the kernel, which already puts its centre at shape // 2
    if img.ndim == 2:
        return ndimage.convolve(img, kernel, mode="wrap")
    return np.stack(
        [ndimage.convolve(img[:, :, c], kernel, mode="wrap") for c in range(img.shape[2])],
        axis=2,
    )


def awgn(img, sigma, seed):
    """Add N(0, (sigma/255)^2) noise per pixel and channel, deterministic in ``seed``."""
    img = as_float_image(img)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return img + rng.standard_normal(img.shape) * (sigma / 255.0)


def degrade(hr, spec):
    hr = as_float_image(hr)
    h, w = hr.shape[:2]
    s = spec.scale
    if h % s or w % s:
        raise ValueError(f"HR size {h}x{w} not divisible by scale {s}")
    lr = resize_bicubic(hr, w // s, h // s, antialias=True)
    kh, kw = spec.kernel.shape
    if kh > h // s or kw > w // s:
        raise ValueError(f"kernel {kh}x{kw} larger than LR field {h // s}x{w // s}")
    lr = blur_circular(lr, spec.kernel)
    return awgn(lr, spec.sigma, spec.seed)


def image_seed(global_seed, index):
    """Per-image noise seed for dataset runs."""
    return int(global_seed) ^ int(index)
