import numpy as np
import pytest
from scipy import integrate

from shearfront import (
    UnsupportedCombinationError,
    coefficient,
    coefficient_field,
    gaussian,
    grid_function,
    halfspace_edge,
    line_delta,
    make_bandlimited,
    make_moment_wavelet,
    point_delta,
    standard_basis,
)
from shearfront.groups import to_matrix, unitriangular_inv
from shearfront.transform import pair


def _pi_wavelet(w, x, g):
    """pi(x,h)psi as a pointwise function, the oracle pairing side."""
    M = to_matrix(g)
    Minv = unitriangular_inv(M)
    det = abs(g.a) ** g.spec.trace_Y

    def f(y):
        return det ** -0.5 * w(Minv @ (np.asarray(y) - x))

    return f


def test_point_delta_closed_form(spec2d):
    w = make_moment_wavelet(3)
    x = np.array([0.2, -0.1])
    g = spec2d.element([0.3], 0.4)
    got = coefficient(point_delta([0.5, 0.7]), w, x, g)
    M = to_matrix(g)
    z = unitriangular_inv(M) @ (np.array([0.5, 0.7]) - x)
    det = abs(g.a) ** spec2d.trace_Y
    assert got == pytest.approx(det ** -0.5 * np.conj(w(z)))


@pytest.mark.parametrize("maker", [line_delta, halfspace_edge])
def test_moment_routes_match_pairing_oracle(spec2d, maker):
    w = make_moment_wavelet(2)
    u = maker(0.1)
    x = np.array([0.15, 0.3])
    g = spec2d.element([0.2], 0.35)
    got = coefficient(u, w, x, g)
    want = pair(u, _pi_wavelet(w, x, g), radius=12.0)
    assert got == pytest.approx(want, rel=1e-6, abs=1e-12)


def test_gaussian_moment_matches_pairing_oracle(spec2d):
    w = make_moment_wavelet(2)
    u = gaussian([0.1, -0.2], 0.5)
    x = np.array([0.0, 0.1])
    g = spec2d.element([0.1], 0.3)
    got = coefficient(u, w, x, g)
    want = pair(u, _pi_wavelet(w, x, g))
    assert got == pytest.approx(want, rel=1e-5)


def test_line_band_matches_manual_quadrature(spec2d, window):
    w = make_bandlimited(window)
    u = line_delta(0.0)
    x = np.array([0.2, 0.4])
    g = spec2d.element([0.15], 0.25)
    got = coefficient(u, w, x, g)
    # W = det^{1/2} * integral over xi_1 of conj(psi_hat(g^T (xi_1,0)))
    #     * exp(2 pi i x_1 xi_1)
    M = to_matrix(g)
    det = abs(g.a) ** spec2d.trace_Y

    def integrand(xi1):
        zeta = M.T @ np.array([xi1, 0.0])
        return np.conj(w.hat(zeta[None, :])[0]) * np.exp(
            2j * np.pi * x[0] * xi1)

    lo = window.tau1 / M[0, 0]
    hi = window.tau2 / M[0, 0]
    re, _ = integrate.quad(lambda s: np.real(integrand(s)), lo, hi, limit=400)
    im, _ = integrate.quad(lambda s: np.imag(integrand(s)), lo, hi, limit=400)
    assert got == pytest.approx(det ** 0.5 * (re + 1j * im), rel=1e-9)


def test_point_band_matches_brute_force(spec2d, window):
    w = make_bandlimited(window)
    u = point_delta([0.4, -0.3])
    x = np.array([0.1, 0.2])
    g = spec2d.element([0.1], 0.5)
    got = coefficient(u, w, x, g)
    # brute-force inverse transform of psi at the pullback point
    M = to_matrix(g)
    det = abs(g.a) ** spec2d.trace_Y
    z = unitriangular_inv(M) @ (np.array(u.x0) - x)
    xs = np.linspace(0.7, 1.3, 601)
    ys = np.linspace(-0.2, 0.2, 401)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    zeta = np.stack([X.ravel(), Y.ravel()], axis=-1)
    vals = w.hat(zeta) * np.exp(2j * np.pi * (zeta @ z))
    psi_z = np.sum(vals) * (xs[1] - xs[0]) * (ys[1] - ys[0])
    assert got == pytest.approx(det ** -0.5 * np.conj(psi_z), rel=1e-6)


def test_real_mirrored_coefficients_are_real(spec2d, window):
    w = make_bandlimited(window, mirrored=True)
    x = np.array([0.3, 0.1])
    g = spec2d.element([0.2], 0.3)
    for u in (line_delta(0.0), halfspace_edge(0.0), point_delta([0.5, 0.1]),
              gaussian([0.0, 0.0], 0.5)):
        val = coefficient(u, w, x, g)
        assert abs(val.imag) <= 1e-12 * max(abs(val), 1.0)


def test_grid_function_approximates_gaussian(spec2d, window):
    u = gaussian([0.0, 0.0], 0.5)
    xs = np.arange(-3.0, 3.0 + 1e-9, 0.05)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    dens = np.exp(-(X ** 2 + Y ** 2) / 0.5) / (2.0 * np.pi * 0.25)
    ug = grid_function(dens, 0.05, origin=(-3.0, -3.0))
    w = make_bandlimited(window, mirrored=True)
    x = np.array([0.1, 0.0])
    g = spec2d.element([0.0], 0.4)
    exact = coefficient(u, w, x, g)
    approx = coefficient(ug, w, x, g)
    assert approx == pytest.approx(exact, rel=5e-3)


def test_grid_function_moment_route(spec2d):
    u = gaussian([0.0, 0.0], 0.5)
    xs = np.arange(-3.0, 3.0 + 1e-9, 0.05)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    dens = np.exp(-(X ** 2 + Y ** 2) / 0.5) / (2.0 * np.pi * 0.25)
    ug = grid_function(dens, 0.05, origin=(-3.0, -3.0))
    w = make_moment_wavelet(2)
    x = np.array([0.1, 0.0])
    g = spec2d.element([0.0], 0.4)
    exact = coefficient(u, w, x, g)
    approx = coefficient(ug, w, x, g)
    assert approx == pytest.approx(exact, rel=5e-3)


def test_dimension_mismatch_rejected(spec2d):
    w = make_moment_wavelet(2, d=3)
    with pytest.raises(UnsupportedCombinationError):
        coefficient(point_delta([0.0, 0.0]), w, [0.0, 0.0],
                    spec2d.element([0.0], 0.5))


def test_coefficient_field_shape_and_order(spec2d, window):
    w = make_bandlimited(window)
    u = point_delta([0.0, 0.0])
    pts = [[0.0, 0.0], [0.5, 0.5]]
    dil = [spec2d.element([0.0], a) for a in (0.5, 0.25)]
    field = coefficient_field(u, w, pts, dil)
    assert field.values.shape == (2, 2)
    assert field.values[1, 0] == coefficient(u, w, [0.5, 0.5], dil[0])
