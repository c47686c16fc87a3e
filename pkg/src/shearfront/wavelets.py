"""Wavelet constructions: bandlimited bumps and finite-moment tensor wavelets.

Fourier convention throughout: f_hat(xi) = integral f(x) exp(-2 pi i <x, xi>) dx.

Bandlimited wavelets are defined on the Fourier side in orbit coordinates,
supported in a FrequencyWindow (optionally plus a mirrored copy making them
real-valued).  Moment wavelets are space-side tensor products
psi(x) = psi1(x_1) * prod_j phi(x_j) with psi1 the r-th derivative of a
Gaussian or an r-fold finite difference of a compactly supported bump, so
the first r moments in the x_1 direction vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np
from scipy import integrate, interpolate

from .errors import ConstraintViolation, QuadratureError
from .groups import GroupSpec, HaarLattice, nilpotency_degree, to_matrix
from .orbit import FrequencyWindow


def bump(s):
    """C-infinity bump exp(-1/(1-s^2)) on |s| < 1, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


@dataclass(frozen=True)
class Wavelet:
    kind: str
    d: int
    real_valued: bool
    declared_moments: int | None
    amplitude: float = 1.0

    def hat(self, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def scaled(self, c: float) -> "Wavelet":
        import dataclasses
        return dataclasses.replace(self, amplitude=self.amplitude * c)


@dataclass(frozen=True)
class BandlimitedWavelet(Wavelet):
    """psi_hat(Omega(tau, v)) = bump((tau - c)/w) * bump(|v|/eps0) on V.

    mirrored variants add the reflected copy psi_hat(-xi), making psi real.
    """

    window: FrequencyWindow = None
    mirrored: bool = False

    def __post_init__(self):
        if self.window is None:
            raise ConstraintViolation("bandlimited wavelet needs a window")

    def hat(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        vals = self._half_hat(xi)
        if self.mirrored:
            vals = vals + self._half_hat(-xi)
        return self.amplitude * vals

    def _half_hat(self, xi: np.ndarray) -> np.ndarray:
        w = self.window
        tau = xi[..., 0]
        out = np.zeros_like(tau)
        pos = tau > 0
        if not np.any(pos):
            return out
        c = 0.5 * (w.tau1 + w.tau2)
        half = 0.5 * (w.tau2 - w.tau1)
        taup = tau[pos]
        v = xi[pos, ..., 1:] / taup[..., None]
        vnorm = np.sqrt(np.sum(v * v, axis=-1))
        out[pos] = bump((taup - c) / half) * bump(vnorm / w.eps0)
        return out

    def frequency_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box of the positive-frequency support component."""
        w = self.window
        lo = np.full(self.d, -w.tau2 * w.eps0)
        hi = np.full(self.d, w.tau2 * w.eps0)
        lo[0], hi[0] = w.tau1, w.tau2
        return lo, hi


# 1D Gaussian building blocks, width sigma: g(x) = exp(-x^2 / (2 sigma^2))

def _gauss(x, sigma):
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (2.0 * sigma * sigma))


def _gauss_hat(xi, sigma):
    xi = np.asarray(xi, dtype=float)
    return sigma * np.sqrt(2.0 * np.pi) * np.exp(
        -2.0 * np.pi ** 2 * sigma ** 2 * xi * xi
    )


def _gauss_deriv(x, sigma, r):
    """d^r/dx^r exp(-x^2/(2 sigma^2)) via probabilists' Hermite polynomials."""
    x = np.asarray(x, dtype=float)
    if r == 0:
        return _gauss(x, sigma)
    he = np.polynomial.hermite_e.hermeval(x / sigma, [0.0] * r + [1.0])
    return (-1.0) ** r * sigma ** (-r) * he * _gauss(x, sigma)


@dataclass(frozen=True)
class MomentTensorWavelet(Wavelet):
    """Real tensor wavelet with r vanishing moments in the x_1 direction."""

    core: str = "gaussian"
    support_radius: float = 1.0
    # shift of the finite-difference stencil for the spline core
    fd_step: float = field(default=0.5)

    def __post_init__(self):
        if self.declared_moments is None or self.declared_moments < 1:
            raise ConstraintViolation("moment wavelet needs r >= 1")
        if self.core not in ("gaussian", "spline"):
            raise ConstraintViolation("core must be 'gaussian' or 'spline'")
        if self.support_radius <= 0:
            raise ConstraintViolation("support_radius > 0 required")

    @property
    def r(self) -> int:
        return self.declared_moments

    # -- 1D factors ---------------------------------------------------------

    def psi1(self, x1):
        if self.core == "gaussian":
            return _gauss_deriv(x1, self.support_radius, self.r)
        x1 = np.asarray(x1, dtype=float)
        step = self.fd_step * self.support_radius
        out = np.zeros_like(x1)
        for k in range(self.r + 1):
            out += (-1.0) ** k * comb(self.r, k) * bump(
                (x1 - k * step) / self.support_radius
            )
        return out

    def phi(self, xj):
        if self.core == "gaussian":
            return _gauss(xj, self.support_radius)
        return bump(np.asarray(xj, dtype=float) / self.support_radius)

    def psi1_tail(self, s) -> np.ndarray:
        """integral of psi1 over (s, infinity); closed form for the Gaussian core."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.core == "gaussian":
            # psi1 = g^(r), g -> 0 at +inf, so the tail is -g^(r-1)(s)
            return -_gauss_deriv(s, self.support_radius, self.r - 1)
        step = self.fd_step * self.support_radius
        out = np.zeros_like(s)
        for k in range(self.r + 1):
            out += (-1.0) ** k * comb(self.r, k) * self._bump_tail(
                s - k * step
            )
        return out

    def _bump_tail(self, s) -> np.ndarray:
        tail = self._bump_tail_table
        R = self.support_radius
        return tail(np.clip(np.asarray(s, dtype=float), -R, R))

    @cached_property
    def _bump_tail_table(self):
        R = self.support_radius
        xs = np.linspace(-R, R, 2049)
        vals = bump(xs / R)
        # cumulative integral from the right
        cum = -integrate.cumulative_trapezoid(vals[::-1], xs[::-1], initial=0.0)
        return interpolate.interp1d(xs, cum[::-1], kind="cubic")

    # -- tensor evaluation --------------------------------------------------

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = self.psi1(x[..., 0])
        for j in range(1, self.d):
            vals = vals * self.phi(x[..., j])
        return self.amplitude * vals

    def space_radius(self) -> float:
        """Radius beyond which psi vanishes (spline) or is negligible (gaussian)."""
        if self.core == "spline":
            return self.support_radius * (1.0 + self.r * self.fd_step)
        return 12.0 * self.support_radius

    # -- Fourier side -------------------------------------------------------

    def psi1_hat(self, xi1) -> np.ndarray:
        xi1 = np.asarray(xi1, dtype=float)
        if self.core == "gaussian":
            return (2j * np.pi * xi1) ** self.r * _gauss_hat(
                xi1, self.support_radius
            )
        step = self.fd_step * self.support_radius
        return self._bump_hat(xi1) * (
            1.0 - np.exp(-2j * np.pi * xi1 * step)
        ) ** self.r

    def phi_hat(self, xij) -> np.ndarray:
        if self.core == "gaussian":
            return _gauss_hat(xij, self.support_radius)
        return self._bump_hat(np.asarray(xij, dtype=float))

    @cached_property
    def _bump_hat_table(self):
        R = self.support_radius
        n = 1 << 14
        span = 64.0 * R
        xs = (np.arange(n) - n // 2) * (span / n)
        vals = bump(xs / R)
        spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(vals))) * (span / n)
        freqs = np.fft.fftshift(np.fft.fftfreq(n, d=span / n))
        return interpolate.interp1d(
            freqs, spec.real, kind="cubic", bounds_error=False, fill_value=0.0
        )

    def _bump_hat(self, xi) -> np.ndarray:
        # the bump is even, so its transform is real
        return self._bump_hat_table(xi)

    def hat(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        vals = self.psi1_hat(xi[..., 0]).astype(complex)
        for j in range(1, self.d):
            vals = vals * self.phi_hat(xi[..., j])
        return self.amplitude * vals


def make_bandlimited(window: FrequencyWindow, mirrored: bool = False,
                     d: int = 2) -> BandlimitedWavelet:
    return BandlimitedWavelet(
        kind="bandlimited", d=d, real_valued=mirrored,
        declared_moments=None, window=window, mirrored=mirrored,
    )


def make_moment_wavelet(r: int, core: str = "gaussian",
                        support_radius: float = 1.0,
                        d: int = 2) -> MomentTensorWavelet:
    return MomentTensorWavelet(
        kind="moment_tensor", d=d, real_valued=True, declared_moments=r,
        core=core, support_radius=support_radius,
    )


# ---------------------------------------------------------------------------
# moment verification

@dataclass(frozen=True)
class MomentCheck:
    passed: bool
    failed_order: int | None = None
    residual: float = 0.0


def check_vanishing_moments(w: Wavelet, r: int, tol: float = 1e-8) -> MomentCheck:
    """Verify the first r moments (orders 0..r-1) vanish in the x_1 direction."""
    if r < 1:
        raise ConstraintViolation("r >= 1 required")
    if isinstance(w, BandlimitedWavelet):
        # support avoids xi_1 = 0 entirely, so all derivatives vanish there
        xi1 = np.linspace(-w.window.tau1 / 2, w.window.tau1 / 2, 33)
        grid = np.zeros((33, w.d))
        grid[:, 0] = xi1
        resid = float(np.max(np.abs(w.hat(grid))))
        return MomentCheck(passed=resid <= tol, failed_order=None,
                           residual=resid)
    if not isinstance(w, MomentTensorWavelet):
        raise ConstraintViolation("unknown wavelet kind")
    lim = w.space_radius()
    scale = max(
        abs(integrate.quad(lambda x: abs(w.psi1(x)), -lim, lim, limit=200)[0]),
        1e-30,
    )
    for k in range(r):
        val, _ = integrate.quad(lambda x: x ** k * w.psi1(x), -lim, lim,
                                limit=200)
        if abs(val) / scale > tol:
            return MomentCheck(passed=False, failed_order=k,
                               residual=abs(val) / scale)
    return MomentCheck(passed=True)


# ---------------------------------------------------------------------------
# admissibility constant

@dataclass(frozen=True)
class AdmissibilityResult:
    value: float
    rel_change: float
    converged: bool


def admissibility_constant(w: Wavelet, spec: GroupSpec, xi0=None,
                           spacing: float = 1.0 / 128,
                           log_a_range: tuple[float, float] | None = None,
                           t_max: float | None = None) -> AdmissibilityResult:
    """C_psi = integral over H of |psi_hat(h^T xi0)|^2 dh by lattice quadrature.

    Runs the quadrature at the given spacing and at half the spacing on a
    slightly enlarged box; flags non-convergence when the value moves by
    more than 5%.
    """
    if xi0 is None:
        xi0 = np.eye(spec.d)[0]
    xi0 = np.asarray(xi0, dtype=float)

    if log_a_range is None or t_max is None:
        if isinstance(w, BandlimitedWavelet):
            win = w.window
            la = (np.log(win.tau1) - 0.1, np.log(win.tau2) + 0.1)
            tm = 2.0 * win.eps0 * max(1.0, win.tau2)
        else:
            la = (np.log(1e-3), np.log(1e2))
            tm = 8.0 * w.support_radius
        log_a_range = log_a_range or la
        t_max = t_max or tm

    def run(sp, la_lo, la_hi, tm):
        lat = HaarLattice(spec=spec, t_max=tm, log_a_min=la_lo,
                          log_a_max=la_hi, spacing=sp,
                          include_negative=not isinstance(
                              w, BandlimitedWavelet) or w.mirrored)
        t_ax, log_a = lat.axes()
        grids = np.meshgrid(*([t_ax] * (spec.d - 1)), indexing="ij")
        t_pts = np.stack([gax.ravel() for gax in grids], axis=-1)
        cell = sp ** (spec.d - 1) * sp
        total = 0.0
        signs = (1.0, -1.0) if lat.include_negative else (1.0,)
        for la_val in log_a:
            for sgn in signs:
                a = sgn * float(np.exp(la_val))
                xis = np.empty((len(t_pts), spec.d))
                for i, t in enumerate(t_pts):
                    xis[i] = to_matrix(spec.element(t, a)).T @ xi0
                weight = abs(a) ** -(spec.d - spec.trace_Y)
                total += float(
                    np.sum(np.abs(w.hat(xis)) ** 2)
                ) * weight * cell
        return total

    lo, hi = log_a_range
    v1 = run(spacing, lo, hi, t_max)
    v2 = run(spacing / 2, lo - 0.25, hi + 0.25, t_max * 1.1)
    rel = abs(v2 - v1) / max(abs(v2), 1e-300)
    return AdmissibilityResult(value=v2, rel_change=rel, converged=rel <= 0.05)


# ---------------------------------------------------------------------------
# vanishing-moment requirement for decay transfer

def moment_thresholds(spec: GroupSpec,
                      n0: int | None = None) -> tuple[Fraction, Fraction, Fraction]:
    """The (s0, s1, s2) thresholds controlling required moment counts.

    Exact rational arithmetic in (lambda_min, lambda_max, d, n0).
    """
    spec.require_detection_usable()
    if n0 is None:
        n0 = nilpotency_degree(spec)
    lmin = Fraction(spec.lambda_min)
    lmax = Fraction(spec.lambda_max)
    d = Fraction(spec.d)
    m = Fraction(n0 + 1)
    s0 = (
        1
        + (Fraction(3, 2) + 1 / (2 * lmin)) * d
        + m * (
            Fraction(13, 2) * d
            + (1 / (2 * lmin) + (3 + 3 * lmax) / (2 - 2 * lmax)) * d
            + 3
        )
    )
    s1 = 1 + m * (1 + lmin / (1 - lmax) + lmin * lmax / (1 - lmax))
    s2 = 1 + 1 / lmin + m * (2 + 1 / lmin + 2 / (1 - lmax))
    return s0, s1, s2


def required_moments(N: int, N_u: int, spec: GroupSpec) -> int:
    """Smallest moment count r certified to transfer decay of order N.

    r = floor(s0 + s1*N + s2*N_u) + 1 (strict inequality made integral).
    """
    if N < 0 or N_u < 0:
        raise ConstraintViolation("N >= 0 and N_u >= 0 required")
    s0, s1, s2 = moment_thresholds(spec)
    total = s0 + s1 * N + s2 * N_u
    return math.floor(total) + 1
