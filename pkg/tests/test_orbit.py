import numpy as np
import pytest

from shearfront import (
    ConeSpec,
    FrequencyWindow,
    OutsideOrbitError,
    in_inner_box,
    in_inner_set,
    in_outer_box,
    in_outer_set,
    lemma_box_inner,
    lemma_box_outer,
    r_sufficient,
)
from shearfront.errors import QuadratureError
from shearfront.groups import to_matrix
from shearfront.orbit import (
    ThetaParams,
    chart_coords,
    check_envelope_inequality,
    dilation_envelope,
    distance_envelope,
    omega_chart,
    overlap_integral,
    theta,
    window_direction_matrix,
)


def test_r_sufficient_value(spec2d, window, cone):
    assert r_sufficient(cone, window, spec2d) == pytest.approx(8.8)


def test_lemma_boxes(window, cone):
    a0, d0 = lemma_box_inner(cone, window)
    a1, d1 = lemma_box_outer(cone, window)
    assert (a0, d0) == pytest.approx((0.09, 0.1 / 3.0))
    assert (a1, d1) == pytest.approx((0.22, 0.3))


def test_chart_roundtrip():
    xi = np.array([1.3, -0.4])
    tau, v = chart_coords(xi)
    assert np.allclose(omega_chart(tau, v), xi)
    with pytest.raises(OutsideOrbitError):
        distance_envelope([0.0, 1.0])


def test_distance_envelope_closed_form():
    assert distance_envelope([2.0, 0.0]) == pytest.approx(1.0 / 3.0)
    assert distance_envelope([0.5, 1.0]) == pytest.approx(0.25)


def test_sandwich_sampling(spec2d, window, cone):
    rng = np.random.default_rng(11)
    a1, d1 = lemma_box_outer(cone, window)
    checked = 0
    for _ in range(2000):
        t = rng.uniform(-1.5 * d1, 1.5 * d1, 1)
        a = float(np.exp(rng.uniform(np.log(1e-4), np.log(1.5 * a1))))
        g = spec2d.element(t, a)
        ib = in_inner_box(g, cone, window)
        ki = in_inner_set(g, cone, window)
        ko = in_outer_set(g, cone, window)
        ob = in_outer_box(g, cone, window)
        assert (not ib or ki) and (not ki or ko) and (not ko or ob)
        checked += ib + ki + ko + ob
    assert checked > 0  # the sampling box actually hits the sets


def test_sign_gate(spec2d, window, cone):
    g = spec2d.element([0.0], 0.01)
    assert in_inner_set(g, cone, window)
    gm = spec2d.element([0.0], -0.01)
    assert not in_inner_set(gm, cone, window)
    assert in_inner_set(gm, cone.mirrored(), window)


def test_exact_sets_match_rejection_oracle(spec2d, window, cone):
    """Brute-force the chart-image extremes over a dense 1-D parameter grid.

    For d = 2 the window image in chart coordinates is the segment
    v(u) = t + L u, |u| <= eps0, with L the 1x1 direction matrix.
    """
    rng = np.random.default_rng(7)
    us = np.linspace(-window.eps0, window.eps0, 8001)
    for _ in range(120):
        t = rng.uniform(-0.5, 0.5, 1)
        a = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.5))))
        g = spec2d.element(t, a)
        L = float(window_direction_matrix(g)[0, 0])
        vs = t[0] + L * us
        av = np.abs(vs)
        vmax, vmin = av.max(), av.min()
        inner_oracle = vmax < cone.eps and \
            (window.tau1 / a) * np.sqrt(1 + vmin ** 2) >= cone.R
        v_at = vs[np.argmin(av)]
        outer_oracle = vmin < cone.eps and \
            (window.tau2 / a) * np.sqrt(1 + v_at ** 2) > cone.R
        got_i = in_inner_set(g, cone, window)
        got_o = in_outer_set(g, cone, window)
        # allow disagreement only within a thin boundary layer
        if got_i != inner_oracle:
            assert abs(vmax - cone.eps) < 1e-6 or abs(
                (window.tau1 / a) * np.sqrt(1 + vmin ** 2) - cone.R) < 1e-6
        if got_o != outer_oracle:
            assert abs(vmin - cone.eps) < 1e-6 or abs(
                (window.tau2 / a) * np.sqrt(1 + v_at ** 2) - cone.R) < 1e-6


def test_envelope_inequality(spec2d):
    rep = check_envelope_inequality(spec2d, ell1=3, n_samples=5000)
    assert rep.ok
    assert rep.max_product <= 1.0


def test_theta_integrability_gate(spec2d):
    good = ThetaParams(s=5.0, t=6.0)
    bad = ThetaParams(s=2.0, t=2.0)
    assert good.integrable(dim_H=2, d=2, det_power=1.0)
    assert not bad.integrable(dim_H=2, d=2, det_power=1.0)


def test_theta_quadrature_matches_gate(spec2d):
    """With the G-measure weight 1/|det h|: s,t >= 2d+1-range converges
    under domain growth, s = t = d grows without bound (log-divergent)."""

    def integral(params, la_box):
        tp = np.arange(-30.0 + 1 / 16, 30.0, 1 / 8)
        la = np.arange(-la_box + 1 / 16, la_box, 1 / 8)
        total = 0.0
        for lav in la:
            a = float(np.exp(lav))
            hw = a ** -(spec2d.d - spec2d.trace_Y) / a ** spec2d.trace_Y
            for tv in tp:
                total += theta(spec2d.element([tv], a), params) * hw
        return total * (1 / 8) ** 2

    good = ThetaParams(s=5.0, t=6.0)
    bad = ThetaParams(s=2.0, t=2.0)
    assert integral(good, 16.0) / integral(good, 8.0) < 1.01
    assert integral(bad, 16.0) / integral(bad, 8.0) > 1.3


def test_overlap_integral_gate(spec2d):
    g = spec2d.element([0.0], 1.0)
    with pytest.raises(QuadratureError):
        overlap_integral(g, ell=2)
    val = overlap_integral(g, ell=5, box_T=16.0, spacing=0.5)
    assert val > 0


def test_dilation_envelope_matches_transpose_action(spec2d):
    g = spec2d.element([0.3], 0.2)
    xi = to_matrix(g).T @ np.array([1.0, 0.0])
    assert dilation_envelope(g) == pytest.approx(distance_envelope(xi))
