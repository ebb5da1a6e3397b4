"""Blur kernel generators (Gaussian, disk, camera-shake motion), OTF conversion and kernel files."""

import math
from pathlib import Path

import numpy as np

KERNEL_MAGIC = "PPSRK 1"
SUM_TOLERANCE = 1e-3


def check_kernel(k):
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or min(k.shape) < 1:
        raise ValueError(f"kernel must be a non-empty 2-D array, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel has non-finite taps")
    if np.any(k < 0):
        raise ValueError("kernel has negative taps")
    return k


def delta_kernel(size=1):
    if size < 1 or size % 2 == 0:
        raise ValueError("delta kernel size must be odd and positive")
    k = np.zeros((size, size))
    k[size // 2, size // 2] = 1.0
    return k


def gaussian_kernel(size, sigma_x, sigma_y=None, theta=0.0):
    """Bivariate Gaussian sampled at tap centres, normalised to unit sum.

    The covariance is ``R(theta) diag(sigma_x**2, sigma_y**2) R(theta)^T``
    with x along columns and y along rows.
    """
    if sigma_y is None:
        sigma_y = sigma_x
    if size < 3 or size % 2 == 0:
        raise ValueError(f"gaussian kernel size must be odd and >= 3, got {size}")
    if sigma_x <= 0 or sigma_y <= 0:
        raise ValueError("gaussian sigmas must be positive")

    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    cov = rot @ np.diag([sigma_x**2, sigma_y**2]) @ rot.T
    prec = np.linalg.inv(cov)

    r = size // 2
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1].astype(np.float64)
    q = prec[0, 0] * xx * xx + (prec[0, 1] + prec[1, 0]) * xx * yy + prec[1, 1] * yy * yy
    k = np.exp(-0.5 * q)
    return k / k.sum()


def _disk_antiderivative(x, r):
    # integral of sqrt(r^2 - t^2) dt
    x = min(max(x, -r), r)
    return 0.5 * (x * math.sqrt(max(r * r - x * x, 0.0)) + r * r * math.asin(x / r))


def _cell_disk_area(x0, x1, y0, y1, r):
    """Exact area of the disk of radius ``r`` (centred at 0) inside a rectangle."""
    pts = {x0, x1}
    for c in (y0, y1):
        if abs(c) < r:
            xc = math.sqrt(r * r - c * c)
            pts.update((xc, -xc))
    pts.update((r, -r))
    pts = sorted(p for p in pts if x0 <= p <= x1)

    area = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        m = 0.5 * (a + b)
        if b <= a or abs(m) >= r:
            continue
        hm = math.sqrt(r * r - m * m)
        top_h = hm <= y1
        bot_h = -hm >= y0
        top = hm if top_h else y1
        bot = -hm if bot_h else y0
        if top <= bot:
            continue
        arc = _disk_antiderivative(b, r) - _disk_antiderivative(a, r)
        area += arc if top_h else y1 * (b - a)
        area -= -arc if bot_h else y0 * (b - a)
    # tangent cells can cancel to a tiny negative
    return max(area, 0.0)


def disk_kernel(radius):
    """Uniform disk of ``radius`` with boundary taps weighted by covered area."""
    if radius < 0.5:
        raise ValueError(f"disk radius must be >= 0.5, got {radius}")
    r = int(math.ceil(radius))
    size = 2 * r + 1
    k = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            y0, x0 = i - r - 0.5, j - r - 0.5
            k[i, j] = _cell_disk_area(x0, x0 + 1.0, y0, y0 + 1.0, radius)
    return k / k.sum()


def motion_trajectory(seed, steps=64, anxiety=0.005, length=1.0):
    """Random camera-shake path as complex positions (x + iy), starting at 0.

    A constant-speed random walk with inertia: each step the velocity gets a
    Gaussian kick and a pull back toward the origin, both scaled by
    ``anxiety``, plus rare abrupt direction reversals.
    """
    if steps < 2:
        raise ValueError("trajectory needs at least 2 steps")
    rng = np.random.default_rng(seed)
    centripetal = 0.7 * rng.random()
    shake_prob = 0.2 * rng.random()
    gaussian_term = 10.0 * rng.random()
    phi = 2 * math.pi * rng.random()

    step = length / (steps - 1)
    v = step * complex(math.cos(phi), math.sin(phi))
    x = np.zeros(steps, dtype=np.complex128)
    for t in range(steps - 1):
        kick = 0j
        if rng.random() < shake_prob * anxiety:
            kick = 2.0 * v * np.exp(1j * (math.pi + (rng.random() - 0.5)))
        noise = complex(rng.standard_normal(), rng.standard_normal())
        v = v + kick + anxiety * (gaussian_term * noise - centripetal * x[t]) * step
        v = v / abs(v) * step
        x[t + 1] = x[t] + v
    return x


def _splat(points, size):
    # bilinear splat of points given in tap coordinates (row, col)
    k = np.zeros((size, size))
    rows, cols = points.imag, points.real
    r0, c0 = np.floor(rows).astype(int), np.floor(cols).astype(int)
    fr, fc = rows - r0, cols - c0
    for dr, wr in ((0, 1 - fr), (1, fr)):
        for dc, wc in ((0, 1 - fc), (1, fc)):
            np.add.at(k, (r0 + dr, c0 + dc), wr * wc)
    return k


def motion_kernel(seed, size=25, trajectory_steps=64, anxiety=0.01):
    """Camera-shake motion blur kernel, deterministic in ``seed``.

    The trajectory is densely resampled along each segment, shifted so its
    centre of mass sits on the centre tap, shrunk if needed to stay inside
    the grid, and splatted bilinearly.
    """
    if size < 5 or size % 2 == 0:
        raise ValueError(f"motion kernel size must be odd and >= 5, got {size}")
    if trajectory_steps < 2:
        raise ValueError("trajectory_steps must be >= 2")
    rng = np.random.default_rng(seed)
    length = (size - 3) * rng.uniform(0.5, 1.0)
    path = motion_trajectory(int(rng.integers(2**63)), trajectory_steps, anxiety, length)

    sub = 16
    t = np.arange(sub) / sub
    dense = (path[:-1, None] + (path[1:] - path[:-1])[:, None] * t[None, :]).ravel()
    dense = np.append(dense, path[-1])
    dense = dense - dense.mean()

    half = size // 2
    extent = max(np.abs(dense.real).max(), np.abs(dense.imag).max())
    if extent > half - 1:
        dense = dense * ((half - 1) / extent)
    k = _splat(dense + complex(half, half), size)
    return k / k.sum()


def psf_to_otf(kernel, field_w, field_h):
    """FFT of ``kernel`` zero-embedded in an ``(field_h, field_w)`` field with its
    centre tap (index ``shape // 2``) circularly moved to the origin."""
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    if kh > field_h or kw > field_w:
        raise ValueError(f"kernel {kh}x{kw} does not fit in field {field_h}x{field_w}")
    field = np.zeros((field_h, field_w))
    field[:kh, :kw] = kernel
    field = np.roll(field, (-(kh // 2), -(kw // 2)), axis=(0, 1))
    return np.fft.fft2(field)


def write_kernel(path, kernel):
    kernel = check_kernel(kernel)
    lines = [KERNEL_MAGIC, f"{kernel.shape[0]} {kernel.shape[1]}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in kernel]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kernel(path):
    """Parse a kernel file; sums off by more than 1e-3 are rejected, smaller drift renormalised."""
    text = Path(path).read_text().split("\n")
    text = [ln.strip() for ln in text if ln.strip()]
    if not text or text[0] != KERNEL_MAGIC:
        raise ValueError(f"{path}: missing '{KERNEL_MAGIC}' header")
    try:
        ny, nx = (int(v) for v in text[1].split())
        rows = [[float(v) for v in ln.split()] for ln in text[2:]]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed kernel file") from exc
    if len(rows) != ny or any(len(r) != nx for r in rows):
        raise ValueError(f"{path}: expected {ny} rows of {nx} values")
    k = check_kernel(np.array(rows))
    total = k.sum()
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValueError(f"{path}: kernel sums to {total}, not 1")
    return k / total


def kernel_preview(kernel):
    """Max-normalised copy of ``kernel`` for display."""
    kernel = np.asarray(kernel, dtype=np.float64)
    return kernel / kernel.max()
