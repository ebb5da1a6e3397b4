"""Closed-form Fourier solve of the quadratic data sub-problem, and a dense reference solve.

Both minimise ``||y - z (*) k||^2 + rho * ||z - x_down||^2`` with circular
convolution ``(*)``, channel by channel.
"""

import numpy as np

from pnpsr.errors import IllConditionedError
from pnpsr.image import as_float_image
from pnpsr.kernels import check_kernel

SINGULAR_SPECTRUM = 1e-12
IMAG_RESIDUE_LIMIT = 1e-8
DENSE_MAX_PIXELS = 4096


def data_step(y, k_otf, x_down, rho):
    y = as_float_image(y)
    x_down = as_float_image(x_down)
    if y.shape != x_down.shape:
        raise ValueError(f"y {y.shape} and x_down {x_down.shape} differ in shape")
    if k_otf.shape != y.shape[:2]:
        raise ValueError(f"OTF {k_otf.shape} does not match image field {y.shape[:2]}")
    if rho < 0:
        raise ValueError("rho must be nonnegative")

    power = (k_otf.conj() * k_otf).real
    if rho == 0 and power.min() <= SINGULAR_SPECTRUM:
        raise IllConditionedError(
            f"rho = 0 with min |F(k)|^2 = {power.min():.3g}; the deconvolution is singular"
        )
    otf, denom = k_otf, power + rho
    if y.ndim == 3:
        otf, denom = otf[:, :, None], denom[:, :, None]

    fy = np.fft.fft2(y, axes=(0, 1))
    fx = np.fft.fft2(x_down, axes=(0, 1))
    z = np.fft.ifft2((otf.conj() * fy + rho * fx) / denom, axes=(0, 1))
    residue = np.abs(z.imag).max()
    if residue > IMAG_RESIDUE_LIMIT:
        raise RuntimeError(f"imaginary residue {residue:.3g} after inverse FFT")
    return np.ascontiguousarray(z.real)


def circulant_matrix(kernel, h, w):
    """Explicit ``(h*w, h*w)`` matrix of circular convolution with ``kernel``
    (centre tap at ``shape // 2``), acting on row-major flattened images."""
    kh, kw = kernel.shape
    ch, cw = kh // 2, kw // 2
    n = h * w
    mat = np.zeros((n, n))
    for i in range(h):
        for j in range(w):
            row = i * w + j
            for a in range(kh):
                for b in range(kw):
                    src = ((i - (a - ch)) % h) * w + (j - (b - cw)) % w
                    mat[row, src] += kernel[a, b]
    return mat


def dense_oracle_solve(y, kernel, x_down, rho):
    """Solve ``(K^T K + rho I) z = K^T y + rho x_down`` with an explicit circulant ``K``.

    Test-only; limited to small images.
    """
    y = as_float_image(y)
    x_down = as_float_image(x_down)
    kernel = check_kernel(kernel)
    h, w = y.shape[:2]
    if h * w > DENSE_MAX_PIXELS:
        raise ValueError(f"dense solve limited to {DENSE_MAX_PIXELS} pixels, got {h * w}")
    kmat = circulant_matrix(kernel, h, w)
    lhs = kmat.T @ kmat + rho * np.eye(h * w)
    # with rho > 0 and a unit-sum kernel cond(lhs) <= (1 + rho) / rho, so only rho = 0 needs the check
    if rho == 0 and np.linalg.cond(lhs) > 1e14:
        raise np.linalg.LinAlgError("normal equations are singular")

    y2 = y.reshape(h * w, -1)
    x2 = x_down.reshape(h * w, -1)
    z = np.linalg.solve(lhs, kmat.T @ y2 + rho * x2)
    return z.reshape(y.shape)
