import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnpsr.errors import IllConditionedError
from pnpsr.kernels import delta_kernel, disk_kernel, gaussian_kernel, motion_kernel, psf_to_otf
from pnpsr.solver import circulant_matrix, data_step, dense_oracle_solve

from oracles import circular_convolve_direct

RHOS = [1e-3, 0.5, 10.0, 1e4]


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def random_kernel(rng, shape=(3, 3)):
    k = rng.random(shape)
    return k / k.sum()


def test_delta_kernel_is_scalar_blend(rng):
    y, xd = rng.random((8, 8, 3)), rng.random((8, 8, 3))
    for rho in RHOS:
        z = data_step(y, psf_to_otf(delta_kernel(1), 8, 8), xd, rho)
        assert np.abs(z - (y + rho * xd) / (1 + rho)).max() <= 1e-10


def test_rho_zero_exact_deconvolution(rng):
    k = gaussian_kernel(3, 0.5)  # invertible spectrum on 8x8
    otf = psf_to_otf(k, 8, 8)
    assert np.abs(otf).min() ** 2 > 1e-12
    y = rng.random((8, 8))
    z = data_step(y, otf, np.zeros_like(y), 0.0)
    assert np.abs(circular_convolve_direct(z, k) - y).max() <= 1e-6


def test_rho_zero_singular_spectrum_raises(rng):
    k = np.full((1, 2), 0.5)  # zero at the Nyquist frequency
    with pytest.raises(IllConditionedError):
        data_step(rng.random((8, 8)), psf_to_otf(k, 8, 8), rng.random((8, 8)), 0.0)


def test_matches_dense_oracle_8x8(rng):
    y, xd = rng.random((8, 8)), rng.random((8, 8))
    k = random_kernel(rng)
    z = data_step(y, psf_to_otf(k, 8, 8), xd, 0.5)
    assert rel_err(z, dense_oracle_solve(y, k, xd, 0.5)) <= 1e-6


def test_twenty_random_configs(rng):
    for _ in range(20):
        k = random_kernel(rng, tuple(rng.integers(1, 6, 2)))
        rho = float(10 ** rng.uniform(-3, 4))
        y, xd = rng.random((8, 8)), rng.random((8, 8))
        assert rel_err(data_step(y, psf_to_otf(k, 8, 8), xd, rho), dense_oracle_solve(y, k, xd, rho)) <= 1e-6


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("shape", [(5, 7), (16, 12), (33, 21)])
def test_oracle_equivalence_sizes(rng, rho, shape):
    _check_oracle(rng, rho, shape)


def test_oracle_equivalence_largest_field(rng):
    _check_oracle(rng, 0.5, (64, 64))


def _check_oracle(rng, rho, shape):
    k = gaussian_kernel(5, 1.4, 0.7, 1.0) if min(shape) >= 5 else random_kernel(rng)
    y, xd = rng.random(shape + (3,)), rng.random(shape + (3,))
    z = data_step(y, psf_to_otf(k, shape[1], shape[0]), xd, rho)
    assert rel_err(z, dense_oracle_solve(y, k, xd, rho)) <= 1e-6


def test_dense_delta_is_scalar_blend(rng):
    y, xd = rng.random((6, 6)), rng.random((6, 6))
    np.testing.assert_allclose(dense_oracle_solve(y, delta_kernel(1), xd, 2.0), (y + 2 * xd) / 3, atol=1e-12)


def test_large_rho_forces_x_down(rng):
    y, xd = rng.random((8, 8)), rng.random((8, 8))
    k = disk_kernel(2.0)
    assert np.abs(dense_oracle_solve(y, k, xd, 1e8) - xd).max() <= 1e-6
    assert np.abs(data_step(y, psf_to_otf(k, 8, 8), xd, 1e8) - xd).max() <= 1e-6


def test_dense_singular_raises():
    k = np.full((1, 2), 0.5)
    with pytest.raises(np.linalg.LinAlgError):
        dense_oracle_solve(np.ones((4, 4)), k, np.ones((4, 4)), 0.0)


def test_dense_size_limit():
    with pytest.raises(ValueError):
        dense_oracle_solve(np.ones((65, 64)), delta_kernel(1), np.ones((65, 64)), 1.0)


def test_circulant_matrix_is_convolution(rng):
    k = random_kernel(rng, (3, 2))
    img = rng.random((5, 6))
    np.testing.assert_allclose((circulant_matrix(k, 5, 6) @ img.ravel()).reshape(5, 6), circular_convolve_direct(img, k), atol=1e-14)


def _objective(z, y, k, xd, rho):
    return np.sum((y - circular_convolve_direct(z, k)) ** 2) + rho * np.sum((z - xd) ** 2)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(RHOS))
def test_objective_optimality(seed, rho):
    rng = np.random.default_rng(seed)
    k = motion_kernel(seed, 5)
    y, xd = rng.random((8, 8)), rng.random((8, 8))
    z = data_step(y, psf_to_otf(k, 8, 8), xd, rho)
    f0 = _objective(z, y, k, xd, rho)
    for _ in range(10):
        d = rng.standard_normal(z.shape)
        d *= 1e-3 / np.abs(d).max()
        assert _objective(z + d, y, k, xd, rho) >= f0
        assert _objective(z - d, y, k, xd, rho) >= f0


def test_monotone_blend_limits(rng):
    k = gaussian_kernel(3, 0.5)
    otf = psf_to_otf(k, 8, 8)
    y, xd = rng.random((8, 8)), rng.random((8, 8))
    to_x = [np.abs(data_step(y, otf, xd, r) - xd).max() for r in (1, 1e2, 1e4, 1e6)]
    assert all(a > b for a, b in zip(to_x, to_x[1:]))
    to_y = [np.abs(circular_convolve_direct(data_step(y, otf, xd, r), k) - y).max() for r in (1, 1e-2, 1e-4, 1e-6)]
    assert all(a > b for a, b in zip(to_y, to_y[1:]))


def test_imaginary_residue_small(rng):
    # mirror the internal computation to inspect the discarded imaginary part
    k = motion_kernel(1, 7)
    otf = psf_to_otf(k, 16, 16)
    y, xd = rng.random((16, 16)), rng.random((16, 16))
    z = np.fft.ifft2((otf.conj() * np.fft.fft2(y) + 0.5 * np.fft.fft2(xd)) / (np.abs(otf) ** 2 + 0.5))
    assert np.abs(z.imag).max() <= 1e-8


def test_shape_mismatch_rejected(rng):
    with pytest.raises(ValueError):
        data_step(rng.random((8, 8)), psf_to_otf(delta_kernel(1), 8, 8), rng.random((8, 9)), 1.0)
    with pytest.raises(ValueError):
        data_step(rng.random((8, 8)), psf_to_otf(delta_kernel(1), 9, 8), rng.random((8, 8)), 1.0)
