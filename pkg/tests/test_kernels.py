import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pnpsr.kernels import (
    disk_kernel,
    gaussian_kernel,
    kernel_preview,
    motion_kernel,
    psf_to_otf,
    read_kernel,
    write_kernel,
)

from oracles import circular_convolve_direct, disk_area_supersampled, gaussian_direct


def assert_valid_kernel(k):
    assert k.ndim == 2 and min(k.shape) >= 1
    assert k.min() >= 0
    assert abs(k.sum() - 1) <= 1e-8


@given(
    st.sampled_from([3, 5, 9, 15, 25]),
    st.floats(0.3, 5.0), st.floats(0.3, 5.0), st.floats(0, math.pi),
)
def test_gaussian_invariants(size, sx, sy, theta):
    assert_valid_kernel(gaussian_kernel(size, sx, sy, theta))


def test_isotropic_gaussian_symmetries():
    k = gaussian_kernel(5, 1.0)
    np.testing.assert_allclose(k, k.T, atol=1e-15)
    np.testing.assert_allclose(k, k[::-1, ::-1], atol=1e-15)


def test_isotropic_gaussian_matches_direct_formula():
    np.testing.assert_allclose(gaussian_kernel(5, 1.0), gaussian_direct(5, 1.0), atol=1e-14)
    assert gaussian_kernel(5, 1.0)[2, 2] == pytest.approx(gaussian_direct(5, 1.0)[2, 2], abs=1e-15)


@given(st.floats(0.4, 3.0), st.floats(0, 2 * math.pi))
def test_isotropic_gaussian_rotation_invariant(sigma, theta):
    a = gaussian_kernel(11, sigma, sigma, 0.0)
    b = gaussian_kernel(11, sigma, sigma, theta)
    assert np.abs(a - b).max() <= 1e-12


def test_anisotropic_gaussian_orientation():
    k = gaussian_kernel(15, 3.0, 0.8, 0.0)
    yy, xx = np.mgrid[-7:8, -7:8]
    # wide along x (columns)
    assert (k * xx**2).sum() > 4 * (k * yy**2).sum()
    k90 = gaussian_kernel(15, 3.0, 0.8, math.pi / 2)
    np.testing.assert_allclose(k90, k.T, atol=1e-12)


@pytest.mark.parametrize("bad", [4, 1, 0])
def test_gaussian_rejects_even_or_small(bad):
    with pytest.raises(ValueError):
        gaussian_kernel(bad, 1.0)


@given(st.floats(0.5, 8.0))
def test_disk_invariants_and_symmetry(radius):
    k = disk_kernel(radius)
    assert_valid_kernel(k)
    assert k.shape == (2 * math.ceil(radius) + 1,) * 2
    np.testing.assert_allclose(k, np.rot90(k), atol=1e-14)
    np.testing.assert_allclose(k, k.T, atol=1e-14)


@pytest.mark.parametrize("radius", [1.5, 1.8, 2.0, 3.0, 4.3, 6.0])
def test_disk_matches_supersampled_area(radius):
    assert np.abs(disk_kernel(radius) - disk_area_supersampled(radius)).max() <= 1e-4


def test_disk_rejects_small_radius():
    with pytest.raises(ValueError):
        disk_kernel(0.3)


def test_motion_deterministic():
    a = motion_kernel(7, 25)
    b = motion_kernel(7, 25)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, motion_kernel(8, 25))


@given(st.integers(0, 2**32), st.sampled_from([5, 9, 15, 25, 35]), st.integers(2, 200), st.floats(0, 0.2))
def test_motion_invariants(seed, size, steps, anxiety):
    k = motion_kernel(seed, size, steps, anxiety)
    assert_valid_kernel(k)
    assert k.shape == (size, size)
    # centre of mass on the centre tap
    yy, xx = np.mgrid[0:size, 0:size]
    assert abs((k * yy).sum() - size // 2) < 1e-9
    assert abs((k * xx).sum() - size // 2) < 1e-9


def _line_fit(k):
    # total-least-squares line through the nonzero tap centres
    pts = np.argwhere(k > 0).astype(float)
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c)
    normal = vt[-1]
    return np.abs((pts - c) @ normal), normal


@pytest.mark.parametrize("seed", range(40))
def test_motion_straight_segment_without_anxiety(seed):
    k = motion_kernel(seed, 21, trajectory_steps=2, anxiety=0.0)
    dist, normal = _line_fit(k)
    # a unit tap projected on the line normal is |n_r| + |n_c| wide
    tap_width = np.abs(normal).sum()
    assert dist.max() <= tap_width


def test_motion_rejects_bad_params():
    with pytest.raises(ValueError):
        motion_kernel(0, 4)
    with pytest.raises(ValueError):
        motion_kernel(0, 9, trajectory_steps=1)


def test_otf_of_delta_is_ones():
    np.testing.assert_allclose(psf_to_otf(np.ones((1, 1)), 8, 6), np.ones((6, 8)), atol=0)


@pytest.mark.parametrize("k", [gaussian_kernel(5, 1.2, 0.7, 0.4), disk_kernel(2.5), motion_kernel(3, 9)])
def test_otf_dc_is_one(k):
    otf = psf_to_otf(k, 16, 20)
    assert abs(otf[0, 0] - 1.0) <= 1e-10


@pytest.mark.parametrize("shape", [(3, 3), (4, 2), (2, 3)])
def test_otf_matches_direct_circular_convolution(rng, shape):
    k = rng.random(shape)
    k /= k.sum()
    img = rng.random((8, 8))
    via_otf = np.real(np.fft.ifft2(np.fft.fft2(img) * psf_to_otf(k, 8, 8)))
    assert np.abs(via_otf - circular_convolve_direct(img, k)).max() <= 1e-10


def test_otf_rejects_oversized_kernel():
    with pytest.raises(ValueError):
        psf_to_otf(np.ones((9, 9)) / 81, 8, 8)


@pytest.mark.parametrize("k", [gaussian_kernel(15, 1.3), disk_kernel(3), motion_kernel(7, 25)])
def test_kernel_file_round_trip(tmp_path, k):
    path = tmp_path / "k.txt"
    write_kernel(path, k)
    lines = path.read_text().splitlines()
    assert lines[0] == "PPSRK 1"
    assert lines[1] == f"{k.shape[0]} {k.shape[1]}"
    back = read_kernel(path)
    assert np.abs(back - k).max() <= 1e-6


def test_kernel_file_renormalises_small_drift(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("PPSRK 1\n1 3\n0.25 0.5 0.2505\n")
    k = read_kernel(path)
    assert k.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "PPSRK 1\n1 3\n0.2 0.5 0.2\n",  # sum off by 0.1
        "PPSRK 2\n1 1\n1\n",
        "PPSRK 1\n2 2\n0.5 0.5\n",
        "PPSRK 1\n1 2\n1.5 -0.5\n",
        "PPSRK 1\nx y\n",
    ],
)
def test_kernel_file_rejects_bad(tmp_path, text):
    path = tmp_path / "k.txt"
    path.write_text(text)
    with pytest.raises(ValueError):
        read_kernel(path)


def test_preview_peak_is_one():
    assert kernel_preview(disk_kernel(3)).max() == 1.0
