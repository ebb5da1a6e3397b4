"""Image plumbing: bicubic resampling, circular padding, cropping and edge tapering.

An image is a float ndarray shaped ``(H, W)`` or ``(H, W, C)``; every
operation here acts on the two leading (spatial) axes and returns a new array.
"""

from functools import lru_cache

import numpy as np
from scipy import sparse


def as_float_image(img):
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D image, got shape {arr.shape}")
    return arr


def cubic(x):
    """Keys cubic convolution kernel with a = -0.5."""
    absx = np.abs(x)
    absx2 = absx * absx
    absx3 = absx2 * absx
    return (1.5 * absx3 - 2.5 * absx2 + 1.0) * (absx <= 1) + (
        -0.5 * absx3 + 2.5 * absx2 - 4.0 * absx + 2.0
    ) * ((absx > 1) & (absx <= 2))


@lru_cache(maxsize=64)
def resize_weights(in_len, out_len, antialias=True):
    """Dense ``(out_len, in_len)`` resampling matrix along one axis.

    Follows the reference ``imresize`` construction: pixel-centre alignment,
    kernel widened by ``1/scale`` when shrinking with antialiasing, and
    symmetric boundary extension (edge sample repeated).
    """
    scale = out_len / in_len
    width = 4.0
    if scale < 1 and antialias:
        def h(t):
            return scale * cubic(scale * t)
        width = width / scale
    else:
        h = cubic

    x = np.arange(1, out_len + 1, dtype=np.float64)
    u = x / scale + 0.5 * (1 - 1 / scale)
    left = np.floor(u - width / 2)
    taps = int(np.ceil(width)) + 2
    ind = left[:, None] + np.arange(taps)[None, :]
    w = h(u[:, None] - ind)
    w = w / w.sum(axis=1, keepdims=True)

    # 1-based symmetric extension [1..n, n..1], periodic beyond that
    aux = np.concatenate([np.arange(in_len), np.arange(in_len - 1, -1, -1)])
    cols = aux[np.mod(ind.astype(np.int64) - 1, aux.size)]

    mat = np.zeros((out_len, in_len))
    rows = np.repeat(np.arange(out_len), taps)
    np.add.at(mat, (rows, cols.ravel()), w.ravel())
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=64)
def _row_operator(in_len, out_len, antialias):
    return sparse.csr_matrix(resize_weights(in_len, out_len, antialias))


@lru_cache(maxsize=16)
def _column_operator(rows, in_len, out_len, antialias):
    # block-diagonal: resamples every row of a C-contiguous (rows, in_len, C) array in place order
    return sparse.kron(sparse.identity(rows, format="csr"), _row_operator(in_len, out_len, antialias), format="csr")


def _resample_rows(x, out_len, antialias):
    op = _row_operator(x.shape[0], out_len, antialias)
    return (op @ x.reshape(x.shape[0], -1)).reshape((out_len,) + x.shape[1:])


def _resample_cols(x, out_len, antialias):
    h, w = x.shape[:2]
    op = _column_operator(h, w, out_len, antialias)
    flat = np.ascontiguousarray(x).reshape(h * w, -1)
    return (op @ flat).reshape((h, out_len) + x.shape[2:])


def resize_bicubic(img, out_width, out_height, antialias=True):
    """Resize ``img`` to ``(out_height, out_width)`` by cubic convolution.

    Output is not clipped; overshoot near edges is preserved.
    """
    img = as_float_image(img)
    if out_width < 1 or out_height < 1:
        raise ValueError(f"output size must be positive, got {out_width}x{out_height}")
    h, w = img.shape[:2]
    out_height, out_width, antialias = int(out_height), int(out_width), bool(antialias)
    if (h, w) == (out_height, out_width) and not antialias:
        return img.copy()
    # the column pass runs on whichever intermediate has fewer rows
    if out_height <= h:
        out = _resample_cols(_resample_rows(img, out_height, antialias), out_width, antialias)
    else:
        out = _resample_rows(_resample_cols(img, out_width, antialias), out_height, antialias)
    return np.ascontiguousarray(out)


def pad_circular(img, top, bottom, left, right):
    """Periodic extension of ``img`` by the given margins."""
    img = as_float_image(img)
    if min(top, bottom, left, right) < 0:
        raise ValueError("margins must be nonnegative")
    widths = [(top, bottom), (left, right)] + [(0, 0)] * (img.ndim - 2)
    return np.pad(img, widths, mode="wrap")


def crop(img, top, bottom, left, right):
    """Remove the given margins; inverse of :func:`pad_circular`."""
    img = np.asarray(img)
    h, w = img.shape[:2]
    return img[top:h - bottom, left:w - right].copy()


def mod_crop(img, scale):
    """Crop bottom/right so both spatial dims are divisible by ``scale``."""
    img = np.asarray(img)
    h, w = img.shape[:2]
    return img[: h - h % scale, : w - w % scale].copy()


def _taper_profile(proj, n):
    # circular autocorrelation of the kernel projection on a length n-1 grid
    # (direct sum, so lags beyond the support are exactly zero),
    # closed periodically to length n and scaled to peak 1
    m = proj.size
    ac = np.correlate(proj, proj, mode="full")
    z = np.zeros(max(n - 1, 1))
    np.add.at(z, np.mod(np.arange(-(m - 1), m), z.size), ac)
    z = np.append(z, z[0])
    return z / z.max()


def edge_taper(img, kernel):
    """Blend the borders of ``img`` toward its circularly blurred version.

    The weight window comes from the autocorrelation of the kernel's row and
    column projections, so pixels farther than the kernel extent from every
    border keep their exact value.
    """
    from pnpsr.kernels import psf_to_otf

    img = as_float_image(img)
    kernel = np.asarray(kernel, dtype=np.float64)
    h, w = img.shape[:2]
    kh, kw = kernel.shape
    if kh > h or kw > w:
        raise ValueError(f"kernel {kh}x{kw} larger than image {h}x{w}")

    beta_r = _taper_profile(kernel.sum(axis=1), h)
    beta_c = _taper_profile(kernel.sum(axis=0), w)
    alpha = np.outer(1.0 - beta_r, 1.0 - beta_c)

    otf = psf_to_otf(kernel, w, h)
    if img.ndim == 3:
        otf = otf[:, :, None]
        alpha = alpha[:, :, None]
    blurred = np.real(np.fft.ifft2(np.fft.fft2(img, axes=(0, 1)) * otf, axes=(0, 1)))
    return alpha * img + (1.0 - alpha) * blurred
