"""Dual-orbit chart, cone-affiliated dilation sets and envelope functions.

The open dual orbit of a shearlet group is O = {xi : xi_1 != 0}, charted by
Omega(tau, v) = tau * (1, v)^T.  Membership in the inner/outer dilation sets
K_i / K_o is decided exactly in orbit coordinates: the direction part of the
transformed frequency window is the ellipsoid t + L * B_eps0(0), and the
extremal |v| over that ellipsoid is found by an eigendecomposition of L^T L
plus bisection of the secular equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, OutsideOrbitError, QuadratureError
from .groups import (
    GroupElement,
    GroupSpec,
    matrix_operator_norm,
    to_matrix,
    unitriangular_inv,
)

SECULAR_TOL = 1e-12
BOUNDARY_TOL = 1e-12


# ---------------------------------------------------------------------------
# orbit chart

def omega_chart(tau, v) -> np.ndarray:
    """Omega(tau, v) = tau * (1, v)^T."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return tau * np.concatenate(([1.0], v))


def sphere_chart(v) -> np.ndarray:
    """omega(v) = (1, v)^T / sqrt(1 + |v|^2), the sphere part of the chart."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return np.concatenate(([1.0], v)) / np.sqrt(1.0 + v @ v)


def chart_coords(xi) -> tuple[float, np.ndarray]:
    """Inverse chart: xi = Omega(tau, v) with tau = xi_1, v = xi'/xi_1."""
    xi = np.asarray(xi, dtype=float)
    if xi[0] == 0.0:
        raise OutsideOrbitError("xi_1 = 0 lies outside the dual orbit")
    return float(xi[0]), xi[1:] / xi[0]


# ---------------------------------------------------------------------------
# parameter records

@dataclass(frozen=True)
class FrequencyWindow:
    """V = Omega((tau1, tau2) x B_eps0(0)): the wavelet frequency support."""

    tau1: float
    tau2: float
    eps0: float

    def __post_init__(self):
        if not (0.0 < self.tau1 < 1.0 < self.tau2):
            raise ConstraintViolation("need 0 < tau1 < 1 < tau2")
        if not self.eps0 > 0:
            raise ConstraintViolation("need eps0 > 0")


@dataclass(frozen=True)
class ConeSpec:
    """Truncated cone C(W, R) with W = omega(B_eps(0)), optionally mirrored."""

    eps: float
    R: float
    sign: int = +1

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ConstraintViolation("need 0 < eps < 1")
        if not self.R > 1.0:
            raise ConstraintViolation("need R > 1")
        if self.sign not in (+1, -1):
            raise ConstraintViolation("sign must be +1 or -1")

    def mirrored(self) -> "ConeSpec":
        return ConeSpec(eps=self.eps, R=self.R, sign=-self.sign)


@dataclass(frozen=True)
class ThetaParams:
    s: float
    t: float

    def __post_init__(self):
        if self.s < 0 or self.t < 0:
            raise ConstraintViolation("Theta exponents must be nonnegative")

    def integrable(self, dim_H: int, d: int, det_power: float = 0.0) -> bool:
        """Sufficient integrability gate for |det|^-p Theta_{s,t} over H."""
        return (self.s >= dim_H + d + 1
                and self.t >= dim_H + d + d * det_power)


# ---------------------------------------------------------------------------
# envelope functions

def distance_envelope(xi) -> float:
    """A(xi) = min(|xi_1| / (1 + |xi'|), 1 / (1 + |xi|)) on the orbit."""
    xi = np.asarray(xi, dtype=float)
    if xi[0] == 0.0:
        raise OutsideOrbitError("xi_1 = 0 lies outside the dual orbit")
    tail = np.sqrt(float(xi[1:] @ xi[1:]))
    full = np.sqrt(float(xi @ xi))
    return min(abs(float(xi[0])) / (1.0 + tail), 1.0 / (1.0 + full))


def distance_envelope_grid(xi: np.ndarray) -> np.ndarray:
    """Vectorized A over an array of frequency points, shape (..., d).

    Points with xi_1 = 0 get A = 0 (measure-zero set in quadratures).
    """
    xi = np.asarray(xi, dtype=float)
    tail = np.sqrt(np.sum(xi[..., 1:] ** 2, axis=-1))
    full = np.sqrt(np.sum(xi ** 2, axis=-1))
    return np.minimum(np.abs(xi[..., 0]) / (1.0 + tail), 1.0 / (1.0 + full))


def dilation_envelope(g: GroupElement, xi0=None) -> float:
    """A_H(h) = A(h^T xi0)."""
    spec = g.spec
    if xi0 is None:
        xi0 = np.eye(spec.d)[0]
    return distance_envelope(to_matrix(g).T @ np.asarray(xi0, dtype=float))


def theta(g: GroupElement, params: ThetaParams) -> float:
    """Theta_{s,t}(h) = (1 + |h|)^-s (1 + |h^-1|)^-t (operator norms)."""
    M = to_matrix(g)
    n1 = matrix_operator_norm(M)
    n2 = matrix_operator_norm(unitriangular_inv(M))
    return (1.0 + n1) ** -params.s * (1.0 + n2) ** -params.t


def overlap_integral(g: GroupElement, ell: int, box_T: float = 64.0,
                     spacing: float = 0.25) -> float:
    """Phi_ell(h) = integral of A(xi)^ell A(h^T xi)^ell over R^d.

    Lattice quadrature over [-T, T]^d plus an analytic tail bound; refuses
    ell <= d where the tail control fails.
    """
    spec = g.spec
    d = spec.d
    if ell <= d:
        raise QuadratureError("overlap integral requires ell > d")
    ax = np.arange(-box_T + spacing / 2, box_T, spacing)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    xi = np.stack([gax.ravel() for gax in grids], axis=-1)
    hT = to_matrix(g).T
    vals = distance_envelope_grid(xi) ** ell * \
        distance_envelope_grid(xi @ hT.T) ** ell
    core = float(np.sum(vals)) * spacing ** d
    # integrand <= (1+|xi|)^-ell; radial tail bound outside |xi| > T
    sphere_area = 2.0 * np.pi ** (d / 2) / _gamma_half(d)
    tail = sphere_area * (1.0 + box_T) ** (d - ell) / (ell - d)
    return core + tail


def _gamma_half(d: int) -> float:
    from math import gamma
    return gamma(d / 2)


@dataclass(frozen=True)
class EnvelopeReport:
    max_product: float
    argmax: GroupElement | None
    n_samples: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_envelope_inequality(spec: GroupSpec, ell1: float,
                              n_samples: int = 100_000,
                              seed: int = 0) -> EnvelopeReport:
    """Sample |h^{+-1}| * A_H(h)^ell1 over a wide range and report the max.

    The bound is 1 for shearlet groups with ell1 = n(s) + 1.
    """
    rng = np.random.default_rng(seed)
    d = spec.d
    log_a = rng.uniform(np.log(1e-4), np.log(1e4), n_samples)
    mag = np.exp(rng.uniform(np.log(1e-6), np.log(1e3), n_samples))
    dirs = rng.standard_normal((n_samples, d - 1))
    dirs /= np.maximum(np.linalg.norm(dirs, axis=1, keepdims=True), 1e-300)
    best = -np.inf
    best_g = None
    violations = 0
    for i in range(n_samples):
        g = spec.element(mag[i] * dirs[i], float(np.exp(log_a[i])))
        M = to_matrix(g)
        nrm = max(matrix_operator_norm(M),
                  matrix_operator_norm(unitriangular_inv(M)))
        prod = nrm * distance_envelope(M.T @ _e1(d)) ** ell1
        if prod > best:
            best, best_g = prod, g
        if prod > 1.0 + 1e-9:
            violations += 1
    return EnvelopeReport(max_product=best, argmax=best_g,
                          n_samples=n_samples, violations=violations)


def _e1(d: int) -> np.ndarray:
    e = np.zeros(d)
    e[0] = 1.0
    return e


# ---------------------------------------------------------------------------
# secular-equation extremizers over the shifted ellipsoid t + L * B_eps0

def _extremal_norm(tvec: np.ndarray, L: np.ndarray, radius: float,
                   maximize: bool) -> tuple[float, np.ndarray]:
    """Extremize |t + L u| over |u| <= radius.

    Returns (extremal value, attaining point v = t + L u*).  Solved via
    eigendecomposition of L^T L and bisection of the secular equation.
    """
    Q = L.T @ L
    lam, V = np.linalg.eigh(Q)
    b = L.T @ tvec
    c = V.T @ b

    if not maximize:
        # strictly convex: interior optimum u* = -L^-1 t if feasible
        u_star = -np.linalg.solve(L, tvec)
        if np.linalg.norm(u_star) <= radius:
            return 0.0, tvec + L @ u_star
        lo, hi = 0.0, float(np.linalg.norm(c) / radius)

        def ynorm(mu):
            return float(np.sqrt(np.sum((c / (lam + mu)) ** 2)))

        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if ynorm(mid) > radius:
                lo = mid
            else:
                hi = mid
            if hi - lo < SECULAR_TOL * max(1.0, hi):
                break
        mu = 0.5 * (lo + hi)
        y = -c / (lam + mu)
        u = V @ y
        v = tvec + L @ u
        return float(np.linalg.norm(v)), v

    # maximization: optimum on the sphere |u| = radius; stationarity
    # (mu I - Q) u = b with mu > lam_max
    lam_top = float(lam[-1])
    top = lam > lam_top - 1e-14 * max(lam_top, 1.0)
    c_top = c.copy()
    c_top[~top] = 0.0
    if np.linalg.norm(c_top) < 1e-300:
        # hard case: top-eigenspace component of b vanishes
        denom = lam_top - lam
        denom[top] = 1.0
        y_perp = np.where(top, 0.0, c / denom)
        rest = radius ** 2 - float(np.sum(y_perp ** 2))
        if rest >= 0.0:
            z = np.zeros_like(y_perp)
            z[np.argmax(lam)] = np.sqrt(rest)
            u = V @ (y_perp + z)
            v = tvec + L @ u
            alt = tvec - L @ u
            if np.linalg.norm(alt) > np.linalg.norm(v):
                v = alt
            return float(np.linalg.norm(v)), v
    lo = lam_top
    hi = lam_top + float(np.linalg.norm(c)) / radius + 1e-30

    def ynorm_max(mu):
        return float(np.sqrt(np.sum((c / (mu - lam)) ** 2)))

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ynorm_max(mid) > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo < SECULAR_TOL * max(1.0, hi):
            break
    mu = 0.5 * (lo + hi)
    y = c / (mu - lam)
    u = V @ y
    v = tvec + L @ u
    return float(np.linalg.norm(v)), v


def window_direction_matrix(g: GroupElement) -> np.ndarray:
    """L with (h^-1)^T V direction part = t + L * B_eps0(0).

    L = (I + A(t)^T) diag(a^(1-lambda_2), ..., a^(1-lambda_d)).
    """
    spec = g.spec
    UT = spec.shear_matrix(g.t_vec).T
    shear_block = UT[1:, 1:]  # I + A(t)^T
    scales = np.abs(g.a) ** (1.0 - np.asarray(spec.lambdas))
    return shear_block @ np.diag(scales)


def in_inner_set(g: GroupElement, cone: ConeSpec,
                 window: FrequencyWindow) -> bool:
    """Exact K_i membership: h^-T V contained in the truncated cone.

    Open inclusion: boundary contact resolves to non-membership.
    """
    if np.sign(g.a) != cone.sign:
        return False
    a = abs(g.a)
    L = window_direction_matrix(g)
    vmax, _ = _extremal_norm(g.t_vec, L, window.eps0, maximize=True)
    if not vmax < cone.eps - BOUNDARY_TOL:
        return False
    vmin, _ = _extremal_norm(g.t_vec, L, window.eps0, maximize=False)
    radius_inf = (window.tau1 / a) * np.sqrt(1.0 + vmin ** 2)
    return radius_inf >= cone.R - BOUNDARY_TOL


def in_outer_set(g: GroupElement, cone: ConeSpec,
                 window: FrequencyWindow) -> bool:
    """K_o membership test: h^-T V meets the truncated cone.

    The radius condition is checked at the direction-feasible v of minimal
    norm, a sound inner approximation of K_o (the lemma outer box is the
    certified superset).
    """
    if np.sign(g.a) != cone.sign:
        return False
    a = abs(g.a)
    L = window_direction_matrix(g)
    vmin, v_at = _extremal_norm(g.t_vec, L, window.eps0, maximize=False)
    if not vmin < cone.eps + BOUNDARY_TOL:
        return False
    radius_sup = (window.tau2 / a) * np.sqrt(1.0 + float(v_at @ v_at))
    return radius_sup > cone.R - BOUNDARY_TOL


# ---------------------------------------------------------------------------
# analytic box sandwich

def shear_lipschitz_constant(spec: GroupSpec) -> float:
    """Upper bound C with |A(t)| <= C |t| for the shear block of the chart."""
    blocks = [X[1:, 1:] for X in spec.shearing_basis]
    return float(np.sqrt(sum(np.linalg.norm(B, 2) ** 2 for B in blocks)))


def r_sufficient(cone: ConeSpec, window: FrequencyWindow,
                 spec: GroupSpec) -> float:
    """Smallest certified truncation radius for the box sandwich."""
    lam_max = spec.lambda_max
    if not lam_max < 1.0:
        raise ConstraintViolation("lambda_max < 1 required")
    C = shear_lipschitz_constant(spec)
    p = 1.0 / (1.0 - lam_max)
    return 2.0 * window.tau2 * max(
        1.0,
        (2.0 * window.eps0 / cone.eps) ** p,
        (2.0 * C * window.eps0) ** p,
    )


def lemma_box_inner(cone: ConeSpec, window: FrequencyWindow) -> tuple[float, float]:
    """(a0, delta0): {|t| < delta0, 0 < a < a0} is inside K_i."""
    return window.tau1 / cone.R, cone.eps / 3.0


def lemma_box_outer(cone: ConeSpec, window: FrequencyWindow) -> tuple[float, float]:
    """(a1, delta1): K_o is inside {|t| < delta1, 0 < a < a1}."""
    return 2.0 * window.tau2 / cone.R, 3.0 * cone.eps


def box_certified(cone: ConeSpec, window: FrequencyWindow,
                  spec: GroupSpec) -> bool:
    return cone.R > r_sufficient(cone, window, spec)


def in_inner_box(g: GroupElement, cone: ConeSpec,
                 window: FrequencyWindow) -> bool:
    a0, d0 = lemma_box_inner(cone, window)
    return (np.sign(g.a) == cone.sign and abs(g.a) < a0
            and float(np.linalg.norm(g.t_vec)) < d0)


def in_outer_box(g: GroupElement, cone: ConeSpec,
                 window: FrequencyWindow) -> bool:
    a1, d1 = lemma_box_outer(cone, window)
    return (np.sign(g.a) == cone.sign and abs(g.a) < a1
            and float(np.linalg.norm(g.t_vec)) < d1)
