"""Continuous wavelet coefficients of synthetic distributions.

W_psi u(x, h) = <u | pi(x,h) psi> with pi(x,h)f(y) = |det h|^(-1/2) f(h^(-1)(y-x)),
<u|f> := u(conj f).  Each cataloged distribution kind is paired with each
wavelet kind through a dedicated evaluation route: closed forms where they
exist, reduced-dimension Gauss-Legendre quadrature otherwise, and
frequency-domain quadrature over the compact wavelet support for smooth or
sampled data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ConstraintViolation, UnsupportedCombinationError
from .groups import GroupElement, to_matrix, unitriangular_inv
from .wavelets import BandlimitedWavelet, MomentTensorWavelet, Wavelet

MAX_NODES = 3000


@dataclass(frozen=True)
class SyntheticDistribution:
    """A synthetic tempered distribution with known wavefront geometry.

    kind-specific fields are filled by the factory functions below; order
    is the distribution order N(u) entering moment-count formulas.
    """

    kind: str
    order: int = 0
    x0: tuple[float, ...] | None = None          # point_delta
    offset: float = 0.0                           # line_delta / halfspace_edge
    center: tuple[float, ...] | None = None       # gaussian
    width: float = 1.0                            # gaussian
    samples: tuple | None = None                  # grid_function (row-major)
    spacing: float = 1.0                          # grid_function
    origin: tuple[float, ...] | None = None       # grid_function

    @property
    def d(self) -> int:
        if self.kind == "point_delta":
            return len(self.x0)
        if self.kind == "gaussian":
            return len(self.center)
        if self.kind == "grid_function":
            return np.asarray(self.samples).ndim
        return 2

    def label(self) -> str:
        return self.kind


def point_delta(x0) -> SyntheticDistribution:
    return SyntheticDistribution(
        kind="point_delta",
        x0=tuple(float(v) for v in np.atleast_1d(x0)),
    )


def line_delta(offset: float = 0.0) -> SyntheticDistribution:
    """Delta concentrated on the line {x_1 = offset} (2D)."""
    return SyntheticDistribution(kind="line_delta", offset=float(offset))


def halfspace_edge(offset: float = 0.0) -> SyntheticDistribution:
    """Indicator of {x_1 > offset}: a Heaviside edge along x_1."""
    return SyntheticDistribution(kind="halfspace_edge", offset=float(offset))


def gaussian(center, width: float) -> SyntheticDistribution:
    """Unit-mass Gaussian bump."""
    if width <= 0:
        raise ConstraintViolation("width > 0 required")
    return SyntheticDistribution(
        kind="gaussian",
        center=tuple(float(v) for v in np.atleast_1d(center)),
        width=float(width),
    )


def grid_function(samples, spacing: float, origin=None) -> SyntheticDistribution:
    arr = np.asarray(samples, dtype=float)
    if origin is None:
        origin = -0.5 * spacing * (np.asarray(arr.shape) - 1)
    return SyntheticDistribution(
        kind="grid_function",
        samples=tuple(map(tuple, arr)) if arr.ndim == 2 else tuple(arr),
        spacing=float(spacing),
        origin=tuple(float(v) for v in np.atleast_1d(origin)),
    )


def _grid_points(u: SyntheticDistribution) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(u.samples, dtype=float)
    axes = [u.origin[k] + u.spacing * np.arange(n)
            for k, n in enumerate(arr.shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    return pts, arr.ravel()


# ---------------------------------------------------------------------------
# quadrature helpers

@lru_cache(maxsize=None)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl(a: float, b: float, n: int):
    x, w = _leggauss(min(max(n, 8), MAX_NODES))
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _osc_nodes(cycles: float, base: int = 48) -> int:
    return base + int(10 * abs(cycles))


# ---------------------------------------------------------------------------
# bandlimited space evaluation (inverse Fourier over the support box)

def _band_space(w: BandlimitedWavelet, z: np.ndarray) -> complex:
    """psi(z) = integral of psi_hat(zeta) exp(2 pi i <z, zeta>) over the box."""
    lo, hi = w.frequency_box()
    nodes = []
    wts = []
    for j in range(w.d):
        cyc = abs(z[j]) * (hi[j] - lo[j])
        xs, ws = _gl(lo[j], hi[j], _osc_nodes(cyc))
        nodes.append(xs)
        wts.append(ws)
    mesh = np.meshgrid(*nodes, indexing="ij")
    zeta = np.stack([m.ravel() for m in mesh], axis=-1)
    wt = np.ones(len(zeta))
    for m in np.meshgrid(*wts, indexing="ij"):
        wt = wt * m.ravel()
    vals = _half_hat_on_box(w, zeta) * np.exp(2j * np.pi * (zeta @ z))
    part = complex(np.sum(vals * wt))
    return part + np.conj(part) if w.mirrored else part


def _half_hat_on_box(w: BandlimitedWavelet, zeta: np.ndarray) -> np.ndarray:
    # positive-frequency component only (the box covers only that part)
    return w.amplitude * w._half_hat(zeta)


# ---------------------------------------------------------------------------
# coefficient dispatch

def coefficient(u: SyntheticDistribution, w: Wavelet, x,
                g: GroupElement) -> complex:
    x = np.asarray(x, dtype=float)
    d = g.spec.d
    if u.d != d or w.d != d:
        raise UnsupportedCombinationError(
            "distribution, wavelet and group dimension must agree"
        )
    M = to_matrix(g)
    det = abs(g.a) ** g.spec.trace_Y

    if u.kind == "point_delta":
        z = unitriangular_inv(M) @ (np.asarray(u.x0) - x)
        if isinstance(w, MomentTensorWavelet):
            return det ** -0.5 * complex(np.conj(w(z)))
        if isinstance(w, BandlimitedWavelet):
            return det ** -0.5 * complex(np.conj(_band_space(w, z)))

    if u.kind == "line_delta":
        if isinstance(w, MomentTensorWavelet):
            if d != 2:
                raise UnsupportedCombinationError(
                    "line quadrature route implemented for d = 2 only"
                )
            return _line_moment(u, w, x, M, det)
        if isinstance(w, BandlimitedWavelet):
            return _ray_band(u, w, x, M, det, edge=False)

    if u.kind == "halfspace_edge":
        if isinstance(w, MomentTensorWavelet):
            if d != 2:
                raise UnsupportedCombinationError(
                    "half-space quadrature route implemented for d = 2 only"
                )
            return _halfspace_moment(u, w, x, M, det)
        if isinstance(w, BandlimitedWavelet):
            return _ray_band(u, w, x, M, det, edge=True)

    if u.kind == "gaussian":
        if isinstance(w, MomentTensorWavelet):
            if d != 2:
                raise UnsupportedCombinationError(
                    "gaussian space route implemented for d = 2 only"
                )
            if w.core == "gaussian":
                return _gaussian_moment_freq(u, w, x, M, det)
            return _gaussian_moment(u, w, x, M, det)
        if isinstance(w, BandlimitedWavelet):
            return _freq_route(w, x, M, det, _gaussian_hat(u))

    if u.kind == "grid_function":
        if isinstance(w, MomentTensorWavelet):
            pts, vals = _grid_points(u)
            z = (pts - x) @ unitriangular_inv(M).T
            return det ** -0.5 * complex(
                np.sum(vals * np.conj(w(z))) * u.spacing ** d
            )
        if isinstance(w, BandlimitedWavelet):
            return _freq_route(w, x, M, det, _grid_hat(u))

    raise UnsupportedCombinationError(
        f"no evaluation route for ({u.kind}, {w.kind})"
    )


def _line_moment(u, w: MomentTensorWavelet, x, M, det) -> complex:
    """1D quadrature of conj(pi(x,g)psi) along the line {y_1 = offset}."""
    Minv = unitriangular_inv(M)
    base = Minv @ np.array([u.offset - x[0], -x[1]])
    step = Minv[:, 1]  # z(s) = base + (s) * step, s = y_2 shifted
    rad = w.space_radius()
    # both |z_1| <= rad and |z_2| <= rad must hold for a nonzero integrand
    lo, hi = -np.inf, np.inf
    for b, st in zip(base, step):
        if st == 0.0:
            if abs(b) > rad:
                return 0.0j
            continue
        l1, h1 = sorted([(-rad - b) / st, (rad - b) / st])
        lo, hi = max(lo, l1), min(hi, h1)
    if not lo < hi:
        return 0.0j
    n = _osc_nodes(w.r * abs(step[0]) * (hi - lo) / max(w.support_radius, 1e-9),
                   base=200)
    s, ws = _gl(lo, hi, n)
    z = base[None, :] + s[:, None] * step[None, :]
    return det ** -0.5 * complex(np.sum(np.conj(w(z)) * ws))


def _halfspace_moment(u, w: MomentTensorWavelet, x, M, det) -> complex:
    """Reduce the half-space integral to a 1D integral of the psi1 tail."""
    rad = w.space_radius()
    c = u.offset - x[0]
    g11, g12 = M[0, 0], M[0, 1]
    s2, ws = _gl(-rad, rad, 400)
    thresh = (c - g12 * s2) / g11
    tails = w.psi1_tail(thresh)
    if g11 < 0:
        # integral over z_1 < thresh; the full psi1 integral vanishes
        tails = -tails
    vals = w.phi(s2) * tails
    return det ** 0.5 * w.amplitude * complex(np.sum(np.conj(vals) * ws))


def _gaussian_moment_freq(u, w: MomentTensorWavelet, x, M, det) -> complex:
    """Frequency-side route for smooth data and the gaussian-core wavelet.

    W = |det g|^(1/2) integral of uhat(xi) conj(psi_hat(g^T xi))
        exp(2 pi i <x, xi>) d xi.  Every factor is a smooth envelope times a
    phase, so high moment counts r do not suffer the catastrophic
    cancellation of the space-side Hermite evaluation.
    """
    uhat = _gaussian_hat(u)
    ximax = 12.0 / u.width
    n = 480
    x1, w1 = _gl(-ximax, ximax, n)
    x2, w2 = _gl(-ximax, ximax, n)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    xi = np.stack([X1.ravel(), X2.ravel()], axis=-1)
    wt = (w1[:, None] * w2[None, :]).ravel()
    zeta = xi @ M
    vals = uhat(xi) * np.conj(w.hat(zeta)) * np.exp(2j * np.pi * (xi @ x))
    return det ** 0.5 * complex(np.sum(vals * wt))


def _gaussian_moment(u, w: MomentTensorWavelet, x, M, det) -> complex:
    """W = |det g|^(1/2) integral of u(x + g z) conj(psi(z)) dz over supp psi."""
    rad = w.space_radius()
    n = 160
    s1, w1 = _gl(-rad, rad, n)
    s2, w2 = _gl(-rad, rad, n)
    Z1, Z2 = np.meshgrid(s1, s2, indexing="ij")
    z = np.stack([Z1.ravel(), Z2.ravel()], axis=-1)
    y = x[None, :] + z @ M.T
    cen = np.asarray(u.center)
    uvals = np.exp(
        -np.sum((y - cen) ** 2, axis=-1) / (2.0 * u.width ** 2)
    ) / (2.0 * np.pi * u.width ** 2)
    wt = (w1[:, None] * w2[None, :]).ravel()
    return det ** 0.5 * complex(np.sum(uvals * np.conj(w(z)) * wt))


def _ray_band(u, w: BandlimitedWavelet, x, M, det, edge: bool) -> complex:
    """Frequency-side 1D route for line and edge distributions.

    W = |det g|^(1/2) * integral over xi_1 of conj(psi_hat(xi_1 * row))
        * exp(2 pi i (x_1 - offset) xi_1) * [1 / (2 pi i xi_1) for the edge],
    row = g^T e_1.  The support of psi_hat confines xi_1 to a bounded
    interval (and its mirror for real wavelets).
    """
    row = M[0, :].copy()
    win = w.window
    lo = win.tau1 / row[0]
    hi = win.tau2 / row[0]
    if lo > hi:
        lo, hi = hi, lo
    shift = x[0] - u.offset
    n = _osc_nodes(abs(shift) * (hi - lo))
    xs, ws = _gl(lo, hi, n)
    zeta = xs[:, None] * row[None, :]
    vals = np.conj(_half_hat_on_box(w, zeta)) * np.exp(
        2j * np.pi * shift * xs
    )
    if edge:
        vals = vals / (2j * np.pi * xs)
    part = complex(np.sum(vals * ws))
    if w.mirrored:
        part = part + np.conj(part)
    return det ** 0.5 * part


def _gaussian_hat(u: SyntheticDistribution):
    cen = np.asarray(u.center)
    width = u.width

    def uhat(xi):
        return np.exp(
            -2.0 * np.pi ** 2 * width ** 2 * np.sum(xi ** 2, axis=-1)
            - 2j * np.pi * (xi @ cen)
        )

    return uhat


def _grid_hat(u: SyntheticDistribution):
    pts, vals = _grid_points(u)
    cell = u.spacing ** pts.shape[1]

    def uhat(xi):
        phases = np.exp(-2j * np.pi * (xi @ pts.T))
        return cell * phases @ vals

    return uhat


def _freq_route(w: BandlimitedWavelet, x, M, det, uhat) -> complex:
    """W = |det g|^(-1/2) integral over supp psi_hat of
    uhat(g^-T zeta) conj(psi_hat(zeta)) exp(2 pi i <x, g^-T zeta>) d zeta."""
    lo, hi = w.frequency_box()
    MinvT = unitriangular_inv(M).T
    xg = MinvT.T @ x  # <x, g^-T zeta> = <g^-1 x, zeta>
    nodes, wts = [], []
    for j in range(w.d):
        cyc = abs(xg[j]) * (hi[j] - lo[j])
        xs, ws = _gl(lo[j], hi[j], _osc_nodes(cyc))
        nodes.append(xs)
        wts.append(ws)
    mesh = np.meshgrid(*nodes, indexing="ij")
    zeta = np.stack([m.ravel() for m in mesh], axis=-1)
    wt = np.ones(len(zeta))
    for m in np.meshgrid(*wts, indexing="ij"):
        wt = wt * m.ravel()
    rho = zeta @ MinvT.T
    vals = uhat(rho) * np.conj(_half_hat_on_box(w, zeta)) * np.exp(
        2j * np.pi * (zeta @ xg)
    )
    part = complex(np.sum(vals * wt))
    if w.mirrored:
        part = part + np.conj(part)
    return det ** -0.5 * part


# ---------------------------------------------------------------------------
# batch evaluation

@dataclass(frozen=True)
class CoefficientField:
    values: np.ndarray  # complex, shape (n_points, n_dilations)
    points: tuple
    dilations: tuple
    wavelet_id: str
    distribution_id: str


def coefficient_field(u: SyntheticDistribution, w: Wavelet, points,
                      dilations) -> CoefficientField:
    points = [np.asarray(p, dtype=float) for p in points]
    dilations = tuple(dilations)
    values = np.empty((len(points), len(dilations)), dtype=complex)
    for i, p in enumerate(points):
        for j, g in enumerate(dilations):
            values[i, j] = coefficient(u, w, p, g)
    return CoefficientField(
        values=values,
        points=tuple(tuple(p) for p in points),
        dilations=dilations,
        wavelet_id=f"{w.kind}",
        distribution_id=u.label(),
    )


# ---------------------------------------------------------------------------
# distribution pairing with test functions

def pair(u: SyntheticDistribution, f, radius: float = 20.0) -> complex:
    """<u | f> = u(conj f) for a pointwise-evaluable test function f."""
    if u.kind == "point_delta":
        return complex(np.conj(f(np.asarray(u.x0))))
    if u.kind == "line_delta":
        val, _ = integrate.quad(
            lambda s: np.real(np.conj(f(np.array([u.offset, s])))),
            -radius, radius, limit=200)
        vali, _ = integrate.quad(
            lambda s: np.imag(np.conj(f(np.array([u.offset, s])))),
            -radius, radius, limit=200)
        return complex(val + 1j * vali)
    if u.kind == "halfspace_edge":
        re, _ = integrate.dblquad(
            lambda y2, y1: np.real(np.conj(f(np.array([y1, y2])))),
            u.offset, u.offset + radius, -radius, radius)
        im, _ = integrate.dblquad(
            lambda y2, y1: np.imag(np.conj(f(np.array([y1, y2])))),
            u.offset, u.offset + radius, -radius, radius)
        return complex(re + 1j * im)
    if u.kind == "gaussian":
        cen = np.asarray(u.center)
        lim = 8.0 * u.width
        n = 200
        xs, ws = _gl(-lim, lim, n)
        X1, X2 = np.meshgrid(xs + cen[0], xs + cen[1], indexing="ij")
        pts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
        dens = np.exp(
            -np.sum((pts - cen) ** 2, axis=-1) / (2.0 * u.width ** 2)
        ) / (2.0 * np.pi * u.width ** 2)
        fv = np.array([np.conj(f(p)) for p in pts])
        wt = (ws[:, None] * ws[None, :]).ravel()
        return complex(np.sum(dens * fv * wt))
    if u.kind == "grid_function":
        pts, vals = _grid_points(u)
        fv = np.array([np.conj(f(p)) for p in pts])
        return complex(np.sum(vals * fv) * u.spacing ** pts.shape[1])
    raise UnsupportedCombinationError(f"unknown distribution kind {u.kind}")
