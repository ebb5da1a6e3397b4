"""Seeded synthetic ground-truth images (piecewise-smooth shapes over a gradient with mild texture)."""

from dataclasses import dataclass

import numpy as np

from pnpsr.degrade import DegradationSpec, degrade, image_seed
from pnpsr.kernels import disk_kernel, gaussian_kernel, motion_kernel


def test_image(seed, size=128, channels=3, shapes=24):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / size
    base = rng.uniform(0.2, 0.8, channels)
    slope = rng.uniform(-0.3, 0.3, (2, channels))
    img = base + xx[..., None] * slope[0] + yy[..., None] * slope[1]

    for _ in range(shapes):
        color = rng.uniform(0.0, 1.0, channels)
        cy, cx = rng.uniform(0, 1, 2)
        r = rng.uniform(0.04, 0.25)
        if rng.random() < 0.5:
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 < r * r
        else:
            ang = rng.uniform(0, np.pi)
            u = (xx - cx) * np.cos(ang) + (yy - cy) * np.sin(ang)
            v = -(xx - cx) * np.sin(ang) + (yy - cy) * np.cos(ang)
            mask = (np.abs(u) < r) & (np.abs(v) < r * rng.uniform(0.2, 1.0))
        img[mask] = 0.6 * color + 0.4 * img[mask]

    freq = rng.uniform(6, 20, 2)
    img += 0.04 * (np.sin(2 * np.pi * freq[0] * xx) * np.cos(2 * np.pi * freq[1] * yy))[..., None]
    img = np.clip(img, 0.0, 1.0)
    return img if channels > 1 else img[:, :, 0]


FAMILIES = ("gaussian", "motion", "disk")


@dataclass(frozen=True)
class SyntheticCase:
    index: int
    scale: int
    family: str
    sigma: float
    kernel: np.ndarray
    hr: np.ndarray
    lr: np.ndarray


def random_kernel(family, rng, size=15):
    """One kernel of ``family`` with randomly drawn parameters."""
    if family == "gaussian":
        return gaussian_kernel(size, rng.uniform(0.6, 2.0), rng.uniform(0.6, 2.0), rng.uniform(0, np.pi))
    if family == "motion":
        return motion_kernel(int(rng.integers(1 << 30)), size)
    if family == "disk":
        return disk_kernel(rng.uniform(1.8, min(6.0, size // 2)))
    raise ValueError(f"unknown kernel family {family!r}")


def synthetic_suite(n=10, seed=0, size=128, scales=(2, 4), sigmas=(0.0, 2.55), kernel_size=15):
    """Seeded degradation cases cycling through scales, kernel families and noise levels."""
    cases = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        scale = scales[i % len(scales)]
        family = FAMILIES[i % len(FAMILIES)]
        sigma = sigmas[(i // len(scales)) % len(sigmas)]
        kernel = random_kernel(family, rng, kernel_size)
        hr = test_image(int(rng.integers(1 << 30)), size)
        lr = degrade(hr, DegradationSpec(kernel, scale, sigma, image_seed(seed, i), family))
        cases.append(SyntheticCase(i, scale, family, sigma, kernel, hr, lr))
    return cases
