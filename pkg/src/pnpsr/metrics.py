"""PSNR and SSIM on [0, 1]-scaled images."""

import math

import numpy as np
from scipy.ndimage import correlate1d

IDENTICAL = math.inf  # PSNR reported for identical inputs

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, border_crop=0, per_channel=False):
    """Peak signal-to-noise ratio in dB (peak 1.0), after cropping ``border_crop``
    pixels from each side. Identical inputs give ``math.inf``.

    With ``per_channel`` a list of per-channel values is returned instead of
    the joint value.
    """
    a, b = _pair(a, b)
    if border_crop:
        c = int(border_crop)
        a, b = a[c:-c, c:-c], b[c:-c, c:-c]
    if a.size == 0:
        raise ValueError("border crop removes the whole image")
    if per_channel and a.ndim == 3:
        return [psnr(a[:, :, i], b[:, :, i]) for i in range(a.shape[2])]
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return IDENTICAL
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-(x**2) / (2 * sigma**2))
    return g / g.sum()


def _filter_valid(x, g):
    # separable 'valid' Gaussian filtering: full correlation then trim the margins
    r = g.size // 2
    out = correlate1d(correlate1d(x, g, axis=0, mode="constant"), g, axis=1, mode="constant")
    return out[r:-r, r:-r]


def _ssim_channel(a, b, data_range=1.0):
    g = _gaussian_window()
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a * mu_a
    var_b = _filter_valid(b * b, g) - mu_b * mu_b
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def ssim(a, b, data_range=1.0):
    """Mean structural similarity over all 11x11 windows (Gaussian, sigma 1.5);
    colour images are averaged over channels."""
    a, b = _pair(a, b)
    if a.shape[0] < SSIM_WINDOW or a.shape[1] < SSIM_WINDOW:
        raise ValueError(f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape[:2]}")
    if a.ndim == 2:
        return _ssim_channel(a, b, data_range)
    return float(np.mean([_ssim_channel(a[:, :, c], b[:, :, c], data_range) for c in range(a.shape[2])]))


def metric_report(a, b, border_crop=0):
    """PSNR/SSIM summary with a per-channel breakdown."""
    a, b = _pair(a, b)
    report = {"psnr": psnr(a, b, border_crop), "ssim": ssim(_crop(a, border_crop), _crop(b, border_crop))}
    if a.ndim == 3:
        report["psnr_channels"] = psnr(a, b, border_crop, per_channel=True)
        report["ssim_channels"] = [
            ssim(_crop(a[:, :, c], border_crop), _crop(b[:, :, c], border_crop)) for c in range(a.shape[2])
        ]
    return report


def _crop(x, c):
    return x[c:-c, c:-c] if c else x
