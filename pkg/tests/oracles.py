"""Slow, independent reference computations used only by the tests.

Nothing here imports the code paths under test.
"""

import math

import numpy as np


def keys_cubic(t):
    t = abs(t)
    if t <= 1:
        return 1.5 * t**3 - 2.5 * t**2 + 1
    if t <= 2:
        return -0.5 * t**3 + 2.5 * t**2 - 4 * t + 2
    return 0.0


def reflect_index(j, n):
    # symmetric extension with the edge sample repeated: ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
    period = 2 * n
    j = j % period
    return j if j < n else period - 1 - j


def resize_1d_scalar(signal, out_len, antialias=True):
    """Cubic-convolution resample of a 1-D signal, one output sample at a time."""
    n = len(signal)
    scale = out_len / n
    widen = scale < 1 and antialias
    support = 2.0 / scale if widen else 2.0
    out = []
    for i in range(out_len):
        centre = (i + 0.5) / scale - 0.5
        lo = math.floor(centre - support) - 1
        hi = math.ceil(centre + support) + 1
        acc = 0.0
        wsum = 0.0
        for j in range(lo, hi + 1):
            d = centre - j
            wgt = scale * keys_cubic(scale * d) if widen else keys_cubic(d)
            acc += wgt * signal[reflect_index(j, n)]
            wsum += wgt
        out.append(acc / wsum)
    return np.array(out)


def resize_2d_scalar(img, out_w, out_h, antialias=True):
    tmp = np.array([resize_1d_scalar(row, out_w, antialias) for row in img])
    return np.array([resize_1d_scalar(col, out_h, antialias) for col in tmp.T]).T


def circular_convolve_direct(img, kernel):
    """(img (*) k)[i, j] = sum_ab k[a, b] img[i - (a - ca), j - (b - cb)] on the torus."""
    h, w = img.shape
    kh, kw = kernel.shape
    ca, cb = kh // 2, kw // 2
    out = np.zeros_like(img, dtype=np.float64)
    for i in range(h):
        for j in range(w):
            s = 0.0
            for a in range(kh):
                for b in range(kw):
                    s += kernel[a, b] * img[(i - (a - ca)) % h, (j - (b - cb)) % w]
            out[i, j] = s
    return out


def disk_area_supersampled(radius, n=1024):
    """Disk coverage of every tap by an n x n midpoint grid, normalised to unit sum."""
    r = int(math.ceil(radius))
    size = 2 * r + 1
    t = (np.arange(n) + 0.5) / n - 0.5
    out = np.zeros((size, size))
    for i in range(size):
        yy = (i - r + t)[:, None] ** 2
        for j in range(size):
            xx = (j - r + t)[None, :] ** 2
            out[i, j] = np.count_nonzero(xx + yy <= radius * radius)
    return out / out.sum()


def gaussian_direct(size, sigma):
    r = size // 2
    vals = [[math.exp(-(i * i + j * j) / (2 * sigma * sigma)) for j in range(-r, r + 1)] for i in range(-r, r + 1)]
    z = sum(map(sum, vals))
    return np.array(vals) / z


def ssim_constants(a, b, k1=0.01, k2=0.03, data_range=1.0):
    """SSIM of two constant images: only the luminance term differs from 1."""
    c1 = (k1 * data_range) ** 2
    return (2 * a * b + c1) / (a * a + b * b + c1)


def ssim_direct(a, b, size=11, sigma=1.5, k1=0.01, k2=0.03):
    """Window-by-window SSIM with an explicit 2-D Gaussian weight (valid windows only)."""
    r = size // 2
    ax = np.arange(size) - r
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2 * sigma * sigma))
    g /= g.sum()
    c1, c2 = k1 * k1, k2 * k2
    vals = []
    for i in range(a.shape[0] - size + 1):
        for j in range(a.shape[1] - size + 1):
            pa, pb = a[i : i + size, j : j + size], b[i : i + size, j : j + size]
            ma, mb = np.sum(g * pa), np.sum(g * pb)
            va, vb = np.sum(g * (pa - ma) ** 2), np.sum(g * (pb - mb) ** 2)
            cov = np.sum(g * (pa - ma) * (pb - mb))
            vals.append((2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return float(np.mean(vals))


def read_pfm_plain(path):
    """Minimal PFM reader used by the stub prior scripts."""
    with open(path, "rb") as fh:
        tag = fh.readline().strip()
        w, h = map(int, fh.readline().split())
        scale = float(fh.readline())
        data = np.frombuffer(fh.read(), dtype="<f4" if scale < 0 else ">f4")
    shape = (h, w, 3) if tag == b"PF" else (h, w)
    return data.reshape(shape)[::-1]
