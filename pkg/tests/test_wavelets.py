import dataclasses
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from shearfront import (
    admissibility_constant,
    check_vanishing_moments,
    make_bandlimited,
    make_moment_wavelet,
    required_moments,
    standard_basis,
    toeplitz_basis,
)
from shearfront.wavelets import moment_thresholds


# ---------------------------------------------------------------------------
# moment thresholds

def test_thresholds_2d_standard(spec2d):
    s0, s1, s2 = moment_thresholds(spec2d)
    assert (s0, s1, s2) == (Fraction(87), Fraction(17, 2), Fraction(27))


def test_required_moments(spec2d):
    assert required_moments(2, 0, spec2d) == 105
    assert required_moments(0, 0, spec2d) == 88


def test_required_moments_monotone(spec2d):
    vals = [required_moments(N, 0, spec2d) for N in range(5)]
    assert vals == sorted(vals)
    assert required_moments(2, 1, spec2d) > required_moments(2, 0, spec2d)


def test_thresholds_toeplitz_boundary():
    spec = toeplitz_basis(3, 1.0 / 3.0)  # lambda_min + lambda_max = 1
    s0, s1, s2 = moment_thresholds(spec)
    assert all(isinstance(v, Fraction) for v in (s0, s1, s2))
    assert required_moments(0, 0, spec) > 0


# ---------------------------------------------------------------------------
# bandlimited wavelet

def test_bandlimited_support(window):
    w = make_bandlimited(window)
    lo, hi = w.frequency_box()
    outside = np.array([[0.5, 0.0], [1.3, 0.0], [1.0, 0.5], [-1.0, 0.0]])
    assert np.allclose(w.hat(outside), 0.0)
    inside = np.array([[1.0, 0.0]])
    assert abs(w.hat(inside)[0]) > 0


def test_mirror_symmetry(window):
    w = make_bandlimited(window, mirrored=True)
    xi = np.random.default_rng(0).uniform(-1.5, 1.5, (50, 2))
    assert np.allclose(w.hat(xi), w.hat(-xi))
    assert np.allclose(w.hat(xi).imag, 0.0)


def test_bandlimited_moments(window):
    w = make_bandlimited(window)
    assert check_vanishing_moments(w, 10).passed


# ---------------------------------------------------------------------------
# moment tensor wavelet

@pytest.mark.parametrize("core", ["gaussian", "spline"])
def test_moment_counts(core):
    w = make_moment_wavelet(3, core=core)
    assert check_vanishing_moments(w, 3).passed
    chk = check_vanishing_moments(w, 4)
    assert not chk.passed and chk.failed_order == 3


@pytest.mark.parametrize("core", ["gaussian", "spline"])
def test_psi1_tail_matches_quadrature(core):
    w = make_moment_wavelet(3, core=core)
    lim = w.space_radius()
    for s in (-0.7, 0.0, 0.4):
        direct, _ = integrate.quad(w.psi1, s, lim, limit=400)
        assert w.psi1_tail(s)[0] == pytest.approx(direct, abs=1e-6)


def test_psi1_hat_matches_direct_transform():
    w = make_moment_wavelet(2, core="spline")
    lim = w.space_radius()
    for xi in (0.2, 0.9, -1.4):
        re, _ = integrate.quad(
            lambda x: w.psi1(x) * np.cos(2 * np.pi * xi * x), -lim, lim,
            limit=400)
        im, _ = integrate.quad(
            lambda x: -w.psi1(x) * np.sin(2 * np.pi * xi * x), -lim, lim,
            limit=400)
        got = complex(w.psi1_hat(np.array([xi]))[0])
        assert got == pytest.approx(re + 1j * im, abs=1e-6)


def test_gaussian_psi1_is_derivative():
    w = make_moment_wavelet(1, core="gaussian")
    h = 1e-6
    x = 0.37
    fd = (np.exp(-(x + h) ** 2 / 2) - np.exp(-(x - h) ** 2 / 2)) / (2 * h)
    assert w.psi1(x) == pytest.approx(fd, rel=1e-6)


# ---------------------------------------------------------------------------
# admissibility

def test_admissibility_converges(spec2d, window):
    w = make_bandlimited(window, mirrored=True)
    res = admissibility_constant(w, spec2d)
    assert res.converged
    assert res.value > 0


def test_admissibility_quadratic_homogeneity(spec2d, window):
    w = make_bandlimited(window)
    w2 = dataclasses.replace(w, amplitude=2.0 * w.amplitude)
    c1 = admissibility_constant(w, spec2d, spacing=1.0 / 48)
    c2 = admissibility_constant(w2, spec2d, spacing=1.0 / 48)
    assert c2.value == pytest.approx(4.0 * c1.value, rel=1e-12)


def test_admissibility_orbit_invariance(spec2d, window):
    """C_psi computed at a different orbit point agrees (left invariance)."""
    w = make_bandlimited(window)
    c1 = admissibility_constant(w, spec2d, spacing=1.0 / 64)
    c2 = admissibility_constant(w, spec2d, xi0=[2.0, 0.6],
                                spacing=1.0 / 64,
                                log_a_range=(np.log(0.3), np.log(1.4)),
                                t_max=1.5)
    assert c2.value == pytest.approx(c1.value, rel=0.05)
