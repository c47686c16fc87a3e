"""Generalized shearlet dilation groups in (t, a) coordinates.

A group is described by a scaling exponent vector (lambda_2, ..., lambda_d)
(the first exponent is fixed to 1) together with the canonical basis
X_2, ..., X_d of the shearing algebra, satisfying X_i^T e_1 = e_i.  Elements
are stored as a shear vector t in R^(d-1) and a nonzero scale a; the sign of
a carries the +-coset.  The matrix realization is

    h(t, a) = (I + sum_i t_i X_i)^(-1) * sgn(a) * diag(|a|, |a|^lambda_2, ...)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConstraintViolation,
    InvalidElementError,
    NotInGroupError,
    SpecMismatchError,
)

ALGEBRA_CLOSURE_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A generalized shearlet dilation group.

    lambdas holds (lambda_2, ..., lambda_d); lambda_1 = 1 is implicit.
    shearing_basis holds the canonical basis X_2, ..., X_d.
    """

    d: int
    lambdas: tuple[float, ...]
    shearing_basis: tuple[np.ndarray, ...] = field(repr=False)
    family_tag: str = "custom"

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        return (
            self.d == other.d
            and self.lambdas == other.lambdas
            and all(
                np.array_equal(X, Y)
                for X, Y in zip(self.shearing_basis, other.shearing_basis)
            )
        )

    def __hash__(self):
        return hash((self.d, self.lambdas, self.family_tag))

    def __post_init__(self):
        if self.d < 2:
            raise ConstraintViolation("dimension d >= 2 required")
        if len(self.lambdas) != self.d - 1:
            raise ConstraintViolation("need d-1 scaling exponents")
        if len(self.shearing_basis) != self.d - 1:
            raise ConstraintViolation("need d-1 shearing basis matrices")
        for i, X in enumerate(self.shearing_basis, start=2):
            if X.shape != (self.d, self.d):
                raise ConstraintViolation("basis matrices must be d x d")
            if np.any(np.abs(np.tril(X)) > 0):
                raise ConstraintViolation(
                    f"X_{i} must be strictly upper triangular"
                )
            ei = np.zeros(self.d)
            ei[i - 1] = 1.0
            if np.max(np.abs(X.T[:, 0] - ei)) > ALGEBRA_CLOSURE_TOL:
                raise NotInGroupError(f"X_{i}^T e_1 != e_{i}: not canonical")
        res = self.algebra_closure_residual()
        if res > ALGEBRA_CLOSURE_TOL:
            raise ConstraintViolation(
                f"shearing basis does not span a matrix algebra "
                f"(closure residual {res:.3e})"
            )

    def algebra_closure_residual(self) -> float:
        """Max residual of expanding every product X_i X_j in the basis.

        Any algebra element sum c_k X_k has first row (0, c_2, ..., c_d),
        so the candidate coefficients of a product can be read off its
        first row.
        """
        worst = 0.0
        for Xi in self.shearing_basis:
            for Xj in self.shearing_basis:
                P = Xi @ Xj
                cand = sum(
                    P[0, k + 1] * self.shearing_basis[k]
                    for k in range(self.d - 1)
                )
                worst = max(worst, float(np.max(np.abs(P - cand))))
        return worst

    @property
    def lambda_min(self) -> float:
        return min(self.lambdas)

    @property
    def lambda_max(self) -> float:
        return max(self.lambdas)

    @property
    def trace_Y(self) -> float:
        return 1.0 + float(sum(self.lambdas))

    def detection_violations(self) -> list[str]:
        """Inequalities required by the detection thresholds that fail here.

        Empty list means the spec is usable for classification constants.
        """
        out = []
        if not self.lambda_min > 0:
            out.append("lambda_min > 0")
        if not self.lambda_max < 1:
            out.append("lambda_max < 1")
        if not self.lambda_min + self.lambda_max >= 1:
            out.append("lambda_min + lambda_max >= 1")
        return out

    def require_detection_usable(self):
        bad = self.detection_violations()
        if bad:
            raise ConstraintViolation(
                "spec unusable for detection constants; violated: "
                + ", ".join(bad)
            )

    def element(self, t, a: float) -> "GroupElement":
        return GroupElement(spec=self, t=_as_tuple(t, self.d - 1), a=float(a))

    def identity(self) -> "GroupElement":
        return self.element(np.zeros(self.d - 1), 1.0)

    def shear_matrix(self, t) -> np.ndarray:
        """U(t) = I + sum_i t_i X_i."""
        t = np.asarray(t, dtype=float)
        U = np.eye(self.d)
        for ti, Xi in zip(t, self.shearing_basis):
            U = U + ti * Xi
        return U

    def algebra_element(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        X = np.zeros((self.d, self.d))
        for ti, Xi in zip(t, self.shearing_basis):
            X = X + ti * Xi
        return X


def _as_tuple(t, n: int) -> tuple[float, ...]:
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if t.size != n:
        raise InvalidElementError(f"shear vector must have {n} entries")
    return tuple(float(x) for x in t)


@dataclass(frozen=True)
class GroupElement:
    spec: GroupSpec
    t: tuple[float, ...]
    a: float

    def __post_init__(self):
        if self.a == 0.0 or not np.isfinite(self.a):
            raise InvalidElementError("scale a must be nonzero and finite")

    @property
    def t_vec(self) -> np.ndarray:
        return np.asarray(self.t, dtype=float)

    def __repr__(self):
        return f"h(t={np.round(self.t_vec, 6)}, a={self.a:.6g})"


def standard_basis(lambdas: Sequence[float]) -> GroupSpec:
    """Standard shearlet group: X_i has a single 1 at (1, i)."""
    lambdas = tuple(float(x) for x in np.atleast_1d(lambdas))
    d = len(lambdas) + 1
    basis = []
    for i in range(2, d + 1):
        X = np.zeros((d, d))
        X[0, i - 1] = 1.0
        basis.append(X)
    return GroupSpec(d=d, lambdas=lambdas, shearing_basis=tuple(basis),
                     family_tag="standard")


def toeplitz_basis(d: int, delta: float) -> GroupSpec:
    """Toeplitz shearlet group: X_i = N^(i-1) with N the superdiagonal shift.

    I + sum t_i X_i then reproduces the unit upper Toeplitz matrix
    T(1, t_2, ..., t_d).  Scaling exponents are (1 - delta, ..., 1 - (d-1)delta).
    """
    if d < 2:
        raise ConstraintViolation("dimension d >= 2 required")
    N = np.diag(np.ones(d - 1), k=1)
    basis = []
    P = np.eye(d)
    for _ in range(d - 1):
        P = P @ N
        basis.append(P.copy())
    lambdas = tuple(1.0 - k * float(delta) for k in range(1, d))
    return GroupSpec(d=d, lambdas=lambdas, shearing_basis=tuple(basis),
                     family_tag="toeplitz")


def nilpotency_degree(spec: GroupSpec) -> int:
    """Smallest k with X^k = 0 for a generic algebra element."""
    coeffs = 1.0 + 0.37 * np.arange(spec.d - 1)
    X = spec.algebra_element(coeffs)
    P = np.eye(spec.d)
    for k in range(1, spec.d + 1):
        P = P @ X
        if np.max(np.abs(P)) < 1e-14:
            return k
    return spec.d  # strictly upper triangular: X^d = 0 always


def unipotent_inverse(spec: GroupSpec, U: np.ndarray) -> np.ndarray:
    """Invert I + X (X nilpotent) by the finite Neumann series."""
    X = U - np.eye(spec.d)
    inv = np.eye(spec.d)
    P = np.eye(spec.d)
    for _ in range(spec.d - 1):
        P = -P @ X
        inv = inv + P
    return inv


def inverse_shear_coords(spec: GroupSpec, t) -> np.ndarray:
    """Coordinates s with (I + sum s_i X_i) = (I + sum t_i X_i)^(-1)."""
    Uinv = unipotent_inverse(spec, spec.shear_matrix(t))
    return Uinv[0, 1:].copy()


def shear_inversion_polynomial(spec: GroupSpec, t) -> np.ndarray:
    """B(t) with h(t,1)^(-1) = h(-t + B(t), 1).

    B is a polynomial of degree n(s)-1 with zero linear part; in 2D it is
    identically zero.
    """
    t = np.asarray(t, dtype=float)
    return inverse_shear_coords(spec, t) + t


def to_matrix(g: GroupElement) -> np.ndarray:
    spec = g.spec
    D = np.sign(g.a) * np.diag(
        np.abs(g.a) ** np.concatenate(([1.0], spec.lambdas))
    )
    return unipotent_inverse(spec, spec.shear_matrix(g.t_vec)) @ D


def from_matrix(spec: GroupSpec, M: np.ndarray) -> GroupElement:
    """Read (t, a) off a group matrix; rejects non-members.

    The chart: a (signed) is the (1,1) entry, t is the first row of the
    unipotent factor I + sum t_i X_i = sgn(a) D M^(-1).
    """
    M = np.asarray(M, dtype=float)
    a = float(M[0, 0])
    if a == 0.0:
        raise NotInGroupError("matrix has vanishing (1,1) entry")
    D = np.diag(np.abs(a) ** np.concatenate(([1.0], spec.lambdas)))
    U = np.sign(a) * D @ np.linalg.inv(M)
    g = spec.element(U[0, 1:], a)
    resid = np.max(np.abs(to_matrix(g) - M))
    if resid > MEMBERSHIP_TOL * max(1.0, np.max(np.abs(M))):
        raise NotInGroupError(f"matrix is not in the group (residual {resid:.3e})")
    return g


def multiply(g1: GroupElement, g2: GroupElement) -> GroupElement:
    if g1.spec is not g2.spec and g1.spec != g2.spec:
        raise SpecMismatchError("elements belong to different group specs")
    return from_matrix(g1.spec, to_matrix(g1) @ to_matrix(g2))


def invert(g: GroupElement) -> GroupElement:
    M = to_matrix(g)
    return from_matrix(g.spec, unitriangular_inv(M))


def unitriangular_inv(M: np.ndarray) -> np.ndarray:
    """Inverse of an upper triangular matrix (group matrices always are)."""
    return np.linalg.inv(M)


def haar_weight(g: GroupElement) -> float:
    """Left Haar density |a|^-(d - tr Y) relative to dt * da/|a|."""
    return float(np.abs(g.a) ** -(g.spec.d - g.spec.trace_Y))


def operator_norm(g: GroupElement) -> float:
    return matrix_operator_norm(to_matrix(g))


def matrix_operator_norm(M: np.ndarray) -> float:
    if M.shape == (2, 2):
        return _norm_2x2(M)
    return float(np.linalg.norm(M, 2))


def _norm_2x2(M: np.ndarray) -> float:
    # closed-form largest singular value
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    q = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(q * q - 4.0 * det * det, 0.0)
    return float(np.sqrt(0.5 * (q + np.sqrt(disc))))


@dataclass(frozen=True)
class HaarLattice:
    """Uniform lattice in (t, log a) for quadrature over H (or H_0).

    Cell weight is haar_weight * spacing^(d-1) * spacing_log_a, matching
    dt * da/|a| * |a|^-(d - tr Y).
    """

    spec: GroupSpec
    t_max: float
    log_a_min: float
    log_a_max: float
    spacing: float = 1.0 / 64
    include_negative: bool = False

    def axes(self):
        n_t = max(int(np.ceil(2 * self.t_max / self.spacing)), 1)
        t_ax = (np.arange(n_t) + 0.5) * self.spacing - self.t_max
        n_a = max(int(np.ceil((self.log_a_max - self.log_a_min) / self.spacing)), 1)
        log_a = self.log_a_min + (np.arange(n_a) + 0.5) * self.spacing
        return t_ax, log_a

    def quadrature(self, f) -> float:
        """Sum f(h) over lattice cells with left-Haar cell weights.

        f maps a GroupElement to a float; evaluation order is fixed.
        """
        spec = self.spec
        t_ax, log_a = self.axes()
        cell = self.spacing ** (spec.d - 1) * self.spacing
        total = 0.0
        grids = np.meshgrid(*([t_ax] * (spec.d - 1)), indexing="ij")
        t_pts = np.stack([gax.ravel() for gax in grids], axis=-1)
        signs = (1.0, -1.0) if self.include_negative else (1.0,)
        for la in log_a:
            for sgn in signs:
                a = sgn * float(np.exp(la))
                for t in t_pts:
                    g = spec.element(t, a)
                    total += f(g) * haar_weight(g) * cell
        return total
