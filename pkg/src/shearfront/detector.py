"""Decay-exponent estimation over dilation ladders and verdict classification.

A ladder is a geometric sequence of dilations inside (a subset of) the
cone-affiliated sets.  The decay exponent of |W_psi u| along the ladder,
measured against the dilation operator norm, is compared with the
necessary/sufficient thresholds

    theta_nec = N - alpha1 * d / 2,
    theta_suf = alpha1 * N + (3/2) * alpha1 * d + alpha2,

with alpha1 = 1/lambda_min and alpha2 = d/lambda_min + eps_star: exponents
below theta_nec certify singularity at order N, exponents at or above
theta_suf certify N-regularity, and the gap in between is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation
from .groups import (
    GroupElement,
    GroupSpec,
    invert,
    inverse_shear_coords,
    multiply,
    operator_norm,
)
from .orbit import (
    ConeSpec,
    FrequencyWindow,
    in_inner_box,
    in_inner_set,
    in_outer_set,
)
from .transform import SyntheticDistribution, coefficient
from .wavelets import Wavelet

COEFF_FLOOR = 1e-300
EPS_STAR = 0.01
MIN_SCALES = 6
# relative offsets (in units of the scale) of the evaluation points used to
# approximate the sup over a neighborhood from below
Y_OFFSETS = (0.0, 0.6, -0.6, 1.2, -1.2)


@dataclass(frozen=True)
class DilationLadder:
    elements: tuple[GroupElement, ...]
    mode: str
    cone: ConeSpec | None = None
    window: FrequencyWindow | None = None

    def __post_init__(self):
        scales = [abs(g.a) for g in self.elements]
        if any(s2 >= s1 for s1, s2 in zip(scales, scales[1:])):
            raise ConstraintViolation("ladder scales must strictly decrease")

    def __len__(self):
        return len(self.elements)


def build_ladder(cone: ConeSpec, window: FrequencyWindow, spec: GroupSpec,
                 n_scales: int, shear_offsets=(0.0,),
                 mode: str = "inner_box", a_start: float | None = None,
                 ratio: float = 0.5) -> DilationLadder:
    """Geometric ladder a_j = a_start * ratio^j filtered by a membership mode.

    mode: inner_box | exact_Ki | exact_Ko | none.
    """
    if mode not in ("inner_box", "exact_Ki", "exact_Ko", "none"):
        raise ConstraintViolation(f"unknown ladder mode {mode}")
    if not 0 < ratio < 1:
        raise ConstraintViolation("need 0 < ratio < 1")
    if a_start is None:
        a_start = 0.8 * window.tau1 / cone.R
    test = {
        "inner_box": lambda g: in_inner_box(g, cone, window),
        "exact_Ki": lambda g: in_inner_set(g, cone, window),
        "exact_Ko": lambda g: in_outer_set(g, cone, window),
        "none": lambda g: True,
    }[mode]
    elements = []
    for j in range(n_scales):
        a = a_start * ratio ** j
        for t0 in np.atleast_1d(np.asarray(shear_offsets, dtype=float)):
            t = np.full(spec.d - 1, t0)
            g = spec.element(t, a)
            if test(g):
                elements.append(g)
                break
    if not elements:
        raise ConstraintViolation(
            "ladder is empty: loosen eps or reduce R so the membership "
            "test admits the requested scales"
        )
    return DilationLadder(elements=tuple(elements), mode=mode, cone=cone,
                          window=window)


def ladder_from_scales(spec: GroupSpec, scales, t=None) -> DilationLadder:
    """Unconstrained ladder from an explicit decreasing scale list."""
    if t is None:
        t = np.zeros(spec.d - 1)
    elements = tuple(spec.element(t, float(a)) for a in scales)
    return DilationLadder(elements=elements, mode="none")


@dataclass(frozen=True)
class DecayEstimate:
    exponent: float
    residual: float
    n_points: int
    n_scales: int
    floored: bool = False

    @property
    def all_below_floor(self) -> bool:
        return math.isinf(self.exponent)


def estimate_decay(u: SyntheticDistribution, w: Wavelet, x,
                   ladder: DilationLadder, y_radius: float = 0.01,
                   n_y: int = 5, direction=None) -> DecayEstimate:
    """Log-log slope of sup-over-neighborhood coefficient magnitudes.

    For each rung h_j the sup over B_{y_radius}(x) is approximated from
    below by n_y points offset along `direction` at distances proportional
    to the rung scale (capped at y_radius); the slope of
    log(max_y |W_psi u(y, h_j)|) against log ||h_j|| is the estimate.
    """
    if len(ladder) < MIN_SCALES:
        raise ConstraintViolation(f"need >= {MIN_SCALES} scales")
    if n_y < 1:
        raise ConstraintViolation("n_y >= 1 required")
    x = np.asarray(x, dtype=float)
    d = len(x)
    if direction is None:
        direction = np.eye(d)[0]
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)

    log_norms = []
    log_vals = []
    floored = False
    below = 0
    for g in ladder.elements:
        step = min(y_radius, abs(g.a))
        best = 0.0
        for c in Y_OFFSETS[:n_y]:
            y = x + c * step * direction
            best = max(best, abs(coefficient(u, w, y, g)))
        if best < COEFF_FLOOR:
            below += 1
            best = COEFF_FLOOR
            floored = True
        log_norms.append(np.log(operator_norm(g)))
        log_vals.append(np.log(best))
    n = len(ladder)
    if below == n:
        return DecayEstimate(exponent=math.inf, residual=0.0,
                             n_points=n_y, n_scales=n, floored=True)
    slope, intercept = np.polyfit(log_norms, log_vals, 1)
    fit = slope * np.asarray(log_norms) + intercept
    rms = float(np.sqrt(np.mean((fit - np.asarray(log_vals)) ** 2)))
    return DecayEstimate(exponent=float(slope), residual=rms,
                         n_points=n_y, n_scales=n, floored=floored)


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class Verdict:
    label: str  # singular_at_N | regular_at_N | inconclusive
    N: int
    theta_nec: float
    theta_suf: float
    alpha1: float
    alpha2: float
    d: int
    exponent: float


def thresholds(spec: GroupSpec, N: int,
               eps_star: float = EPS_STAR) -> tuple[float, float]:
    spec.require_detection_usable()
    alpha1 = 1.0 / spec.lambda_min
    alpha2 = spec.d / spec.lambda_min + eps_star
    theta_nec = N - alpha1 * spec.d / 2.0
    theta_suf = alpha1 * N + 1.5 * alpha1 * spec.d + alpha2
    return theta_nec, theta_suf


def classify(est: DecayEstimate, N: int, spec: GroupSpec,
             eps_star: float = EPS_STAR) -> Verdict:
    theta_nec, theta_suf = thresholds(spec, N, eps_star)
    alpha1 = 1.0 / spec.lambda_min
    alpha2 = spec.d / spec.lambda_min + eps_star
    if est.exponent < theta_nec:
        label = "singular_at_N"
    elif est.exponent >= theta_suf:
        label = "regular_at_N"
    else:
        label = "inconclusive"
    return Verdict(label=label, N=N, theta_nec=theta_nec,
                   theta_suf=theta_suf, alpha1=alpha1, alpha2=alpha2,
                   d=spec.d, exponent=est.exponent)


# ---------------------------------------------------------------------------
# wavefront mapping

@dataclass(frozen=True)
class WavefrontCell:
    point: tuple[float, ...]
    direction: tuple[float, ...]  # unit vector; class is {+dir, -dir}
    verdict: Verdict | None
    skipped: bool = False  # direction too close to the orbit complement


def steering_element(spec: GroupSpec, v) -> GroupElement:
    """g with (g^-1)^T e_1 proportional to (1, v): maps e_1-cones to
    cones around the direction omega(v)."""
    s = inverse_shear_coords(spec, np.atleast_1d(np.asarray(v, dtype=float)))
    return invert(spec.element(s, 1.0))


def steer_ladder(ladder: DilationLadder, g_dir: GroupElement) -> DilationLadder:
    elements = tuple(multiply(g_dir, h) for h in ladder.elements)
    return DilationLadder(elements=elements, mode="none")


def wavefront_map(u: SyntheticDistribution, w: Wavelet, point_grid,
                  direction_grid, N: int, ladder: DilationLadder,
                  spec: GroupSpec, y_radius: float = 0.01, n_y: int = 5,
                  min_cos: float = 0.2) -> list[WavefrontCell]:
    """Verdict per (point, +-direction) cell.

    Directions are steered by conjugating the base e_1 ladder; directions
    with |xi_1|/|xi| < min_cos are skipped (outside the detectable part of
    the orbit).
    """
    if not w.real_valued:
        raise ConstraintViolation(
            "wavefront_map reports unsigned direction classes and "
            "requires a real-valued wavelet"
        )
    cells = []
    for x in point_grid:
        x = np.asarray(x, dtype=float)
        for xi in direction_grid:
            xi = np.asarray(xi, dtype=float)
            xi = xi / np.linalg.norm(xi)
            if abs(xi[0]) < min_cos:
                cells.append(WavefrontCell(
                    point=tuple(x), direction=tuple(xi),
                    verdict=None, skipped=True))
                continue
            if xi[0] < 0:
                xi = -xi  # unsigned class representative
            v = xi[1:] / xi[0]
            g_dir = steering_element(spec, v)
            steered = steer_ladder(ladder, g_dir)
            est = estimate_decay(u, w, x, steered, y_radius=y_radius,
                                 n_y=n_y, direction=xi)
            cells.append(WavefrontCell(
                point=tuple(x), direction=tuple(xi),
                verdict=classify(est, N, spec), skipped=False))
    return cells
