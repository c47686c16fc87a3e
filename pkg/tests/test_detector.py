import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearfront import (
    ConstraintViolation,
    build_ladder,
    classify,
    estimate_decay,
    gaussian,
    halfspace_edge,
    ladder_from_scales,
    line_delta,
    make_bandlimited,
    make_moment_wavelet,
    point_delta,
    standard_basis,
    thresholds,
    wavefront_map,
)
from shearfront.detector import (
    DecayEstimate,
    DilationLadder,
    steer_ladder,
    steering_element,
)
from shearfront.groups import invert, to_matrix
from shearfront.orbit import in_inner_box, in_inner_set, in_outer_set


# ---------------------------------------------------------------------------
# ladders

def test_ladder_modes_produce_members(spec2d, window, cone):
    for mode, member in (("inner_box", in_inner_box),
                         ("exact_Ki", in_inner_set),
                         ("exact_Ko", in_outer_set)):
        lad = build_ladder(cone, window, spec2d, 6, mode=mode)
        assert len(lad) == 6
        for g in lad.elements:
            assert member(g, cone, window)


def test_empty_ladder_raises(spec2d, window, cone):
    with pytest.raises(ConstraintViolation):
        build_ladder(cone, window, spec2d, 4, mode="exact_Ki", a_start=0.5,
                     ratio=0.9)


def test_ladder_scales_must_decrease(spec2d):
    with pytest.raises(ConstraintViolation):
        ladder_from_scales(spec2d, [0.1, 0.2])


# ---------------------------------------------------------------------------
# decay estimation against closed-form oracles

ORACLE_SLOPES = [
    (point_delta([0.0, 0.0]), (0.0, 0.0), -1.5),
    (line_delta(0.0), (0.0, 0.3), -0.5),
    (halfspace_edge(0.0), (0.0, 0.3), 1.5),
]


@pytest.mark.parametrize("u,x,slope", ORACLE_SLOPES)
def test_decay_oracles_bandlimited(spec2d, window, u, x, slope):
    w = make_bandlimited(window, mirrored=True)
    lad = ladder_from_scales(spec2d, [2.0 ** -(3 + j) for j in range(6)])
    est = estimate_decay(u, w, x, lad, y_radius=0.15)
    assert est.exponent == pytest.approx(slope, abs=0.05)


@pytest.mark.parametrize("u,x,slope", ORACLE_SLOPES)
def test_decay_oracles_moment(spec2d, u, x, slope):
    w = make_moment_wavelet(4)
    lad = ladder_from_scales(spec2d, [2.0 ** -(3 + j) for j in range(6)])
    est = estimate_decay(u, w, x, lad, y_radius=0.15)
    assert est.exponent == pytest.approx(slope, abs=0.05)


def test_gaussian_fast_decay(spec2d, window):
    u = gaussian([0.0, 0.0], 0.5)
    lad = ladder_from_scales(spec2d, [2.0 ** -(3 + j) for j in range(6)])
    for w in (make_bandlimited(window, mirrored=True),
              make_moment_wavelet(4)):
        est = estimate_decay(u, w, (0.0, 0.0), lad, y_radius=0.15)
        assert est.exponent > 6.0


def test_interleaved_subladder_invariance(spec2d, window):
    u = halfspace_edge(0.0)
    w = make_bandlimited(window, mirrored=True)
    scales = [2.0 ** -(3 + 0.5 * j) for j in range(12)]
    even = ladder_from_scales(spec2d, scales[0::2])
    odd = ladder_from_scales(spec2d, scales[1::2])
    e1 = estimate_decay(u, w, (0.0, 0.2), even, y_radius=0.15)
    e2 = estimate_decay(u, w, (0.0, 0.2), odd, y_radius=0.15)
    assert abs(e1.exponent - e2.exponent) < 0.1


def test_all_floored_gives_inf(spec2d, window):
    u = gaussian([0.0, 0.0], 0.3)
    w = make_bandlimited(window, mirrored=True)
    lad = ladder_from_scales(spec2d, [1e-4 * 2.0 ** -j for j in range(6)])
    est = estimate_decay(u, w, (0.0, 0.0), lad)
    assert est.all_below_floor
    assert np.isinf(est.exponent)


# ---------------------------------------------------------------------------
# thresholds and classification

@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.95), st.integers(0, 6))
def test_threshold_ordering(lam, N):
    spec = standard_basis([lam])
    if spec.detection_violations():
        return
    nec, suf = thresholds(spec, N)
    assert nec < suf


def test_classification_monotonicity(spec2d):
    est = DecayEstimate(exponent=-1.2, residual=0.0, n_points=5, n_scales=8)
    for N in range(1, 4):
        if classify(est, N, spec2d).label == "singular_at_N":
            assert classify(est, N + 1, spec2d).label == "singular_at_N"


def test_inf_exponent_classified_regular(spec2d):
    est = DecayEstimate(exponent=float("inf"), residual=0.0, n_points=5,
                        n_scales=8)
    assert classify(est, 3, spec2d).label == "regular_at_N"


# ---------------------------------------------------------------------------
# steering

def test_steering_element_maps_e1(spec2d):
    v = 0.4
    g = steering_element(spec2d, v)
    xi = np.linalg.inv(to_matrix(g)).T @ np.array([1.0, 0.0])
    assert xi[1] / xi[0] == pytest.approx(v)


def test_steered_ladder_scales(spec2d, window, cone):
    lad = build_ladder(cone, window, spec2d, 6, mode="inner_box")
    g = steering_element(spec2d, 0.3)
    steered = steer_ladder(lad, g)
    assert len(steered) == len(lad)


def test_wavefront_requires_real_wavelet(spec2d, window, cone):
    w = make_bandlimited(window)  # complex-valued
    lad = build_ladder(cone, window, spec2d, 6, mode="inner_box")
    with pytest.raises(ConstraintViolation):
        wavefront_map(point_delta([0.0, 0.0]), w, [[0.0, 0.0]],
                      [[1.0, 0.0]], 1, lad, spec2d)


def test_wavefront_skips_vertical(spec2d, window, cone):
    w = make_bandlimited(window, mirrored=True)
    lad = build_ladder(cone, window, spec2d, 6, mode="inner_box")
    cells = wavefront_map(gaussian([0.0, 0.0], 0.5), w, [[0.0, 0.0]],
                          [[0.0, 1.0], [1.0, 0.0]], 1, lad, spec2d)
    assert cells[0].skipped and cells[0].verdict is None
    assert not cells[1].skipped
