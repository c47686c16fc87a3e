"""Numerical validation of the constants ledger and lemma-level inequalities.

The ledger evaluates every constant twice through independent arithmetic
paths (exact rationals and a symbolic re-derivation) and asserts all
inequalities the decay-transfer machinery relies on.  The remaining checks
sample or integrate the corresponding estimates at desk scale: norm bounds
on the outer dilation set, the overlap-control integral, the group
convolution identity, cross-kernel decay, and wavelet-to-wavelet decay
transfer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .detector import build_ladder, estimate_decay
from .errors import ConstraintViolation
from .groups import (
    GroupElement,
    GroupSpec,
    HaarLattice,
    invert,
    multiply,
    nilpotency_degree,
    operator_norm,
    to_matrix,
    unitriangular_inv,
)
from .orbit import ConeSpec, FrequencyWindow, in_outer_set, lemma_box_inner, \
    lemma_box_outer, r_sufficient
from .transform import SyntheticDistribution, _gl, _gaussian_hat, _grid_hat
from .wavelets import (
    BandlimitedWavelet,
    MomentTensorWavelet,
    Wavelet,
    admissibility_constant,
    moment_thresholds,
    required_moments,
)

EPS_STAR = Fraction(1, 100)


# ---------------------------------------------------------------------------
# constants ledger

@dataclass(frozen=True)
class ConstantsLedger:
    d: int
    n0: int
    N: int
    N_u: int
    alpha1: Fraction
    alpha2: Fraction
    ell1: int
    gamma0: Fraction
    gamma1: Fraction
    gamma2: Fraction
    s0: Fraction
    s1: Fraction
    s2: Fraction
    beta1: int
    beta2: Fraction
    beta3: Fraction
    required_r: int

    def rows(self):
        for name in ("alpha1", "alpha2", "ell1", "gamma0", "gamma1",
                     "gamma2", "s0", "s1", "s2", "beta1", "beta2", "beta3",
                     "required_r"):
            val = getattr(self, name)
            yield name, val, float(val)


def _sympy_thresholds(lmin, lmax, d, n0):
    """Independent symbolic evaluation of the moment thresholds."""
    fm, fM = Fraction(lmin), Fraction(lmax)
    lm = sympy.Rational(fm.numerator, fm.denominator)
    lM = sympy.Rational(fM.numerator, fM.denominator)
    dd = sympy.Integer(d)
    m = sympy.Integer(n0 + 1)
    s0 = sympy.together(
        1 + (sympy.Rational(3, 2) + 1 / (2 * lm)) * dd
        + m * (sympy.Rational(13, 2) * dd
               + (1 / (2 * lm) + (3 + 3 * lM) / (2 - 2 * lM)) * dd + 3)
    )
    s1 = sympy.together(1 + m * (1 + lm / (1 - lM) + lm * lM / (1 - lM)))
    s2 = sympy.together(1 + 1 / lm + m * (2 + 1 / lm + 2 / (1 - lM)))
    return tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1]))
                 for v in (sympy.nsimplify(s0), sympy.nsimplify(s1),
                           sympy.nsimplify(s2)))


def compute_ledger(spec: GroupSpec, N: int, N_u: int) -> ConstantsLedger:
    spec.require_detection_usable()
    d = spec.d
    n0 = nilpotency_degree(spec)
    lmin = Fraction(spec.lambda_min)
    lmax = Fraction(spec.lambda_max)
    dim_H = d  # one scaling parameter plus d-1 shears

    alpha1 = 1 / lmin
    alpha2 = d / lmin + EPS_STAR
    ell1 = n0 + 1
    gamma0 = Fraction(2 * d + 1)
    gamma1 = lmin / (1 - lmax)
    gamma2 = lmin * lmax / (1 - lmax)

    s0, s1, s2 = moment_thresholds(spec, n0)
    s0b, s1b, s2b = _sympy_thresholds(spec.lambda_min, spec.lambda_max, d, n0)
    if (s0, s1, s2) != (s0b, s1b, s2b):
        raise AssertionError(
            f"moment-threshold double evaluation disagrees: "
            f"{(s0, s1, s2)} vs {(s0b, s1b, s2b)}"
        )

    half_d = Fraction(d, 2)
    beta1 = math.ceil(max(
        N + N_u + alpha1 * (N_u + half_d) + d + 1,
        2 + Fraction(3, 2) * d + N_u,
    ))
    beta2 = max(
        Fraction(dim_H + N + d + 1),
        Fraction(2 + dim_H) + Fraction(3, 2) * d + N_u,
        gamma0 + gamma1 * alpha1 * (Fraction(3, 2) * d + N_u)
        + N_u + gamma1 * N,
    )
    beta3 = max(
        Fraction(dim_H + 2 * d),
        Fraction(1 + dim_H + 3 * d + N_u),
        gamma0 + gamma2 * alpha1 * (Fraction(3, 2) * d + N_u)
        + N_u + Fraction(3, 2) * d + gamma2 * N,
    )

    # assert every transfer condition after numeric substitution
    assert beta1 >= N + N_u + alpha1 * (N_u + half_d) + d + 1
    assert beta1 >= 2 + Fraction(3, 2) * d + N_u
    assert beta2 >= dim_H + N + d + 1
    assert beta2 >= 2 + dim_H + Fraction(3, 2) * d + N_u
    assert beta2 >= gamma0 + gamma1 * alpha1 * (Fraction(3, 2) * d + N_u) \
        + N_u + gamma1 * N
    assert beta3 >= dim_H + 2 * d
    assert beta3 >= 1 + dim_H + 3 * d + N_u
    assert beta3 >= gamma0 + gamma2 * alpha1 * (Fraction(3, 2) * d + N_u) \
        + N_u + Fraction(3, 2) * d + gamma2 * N
    if lmin + lmax >= 1:
        assert gamma1 * alpha1 >= 1 and gamma2 * alpha1 >= 1

    return ConstantsLedger(
        d=d, n0=n0, N=N, N_u=N_u, alpha1=alpha1, alpha2=alpha2, ell1=ell1,
        gamma0=gamma0, gamma1=gamma1, gamma2=gamma2, s0=s0, s1=s1, s2=s2,
        beta1=beta1, beta2=beta2, beta3=beta3,
        required_r=required_moments(N, N_u, spec),
    )


# ---------------------------------------------------------------------------
# norm bounds on the outer dilation set

@dataclass(frozen=True)
class NormLemmaReport:
    n_members: int
    violations: int
    empirical_C1: float
    analytic_C1: float
    pair_violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.pair_violations == 0


def shear_ball_norm_bound(spec: GroupSpec, radius: float,
                          n_grid: int = 64) -> float:
    """max over |t| <= radius of the unipotent factor operator norm."""
    best = 1.0
    rng = np.random.default_rng(7)
    for _ in range(n_grid * 16):
        t = rng.uniform(-1.0, 1.0, spec.d - 1)
        nt = np.linalg.norm(t)
        if nt > 0:
            t = t * (radius * rng.uniform() ** (1 / max(spec.d - 1, 1)) / nt)
        U = spec.shear_matrix(t)
        best = max(best, float(np.linalg.norm(unitriangular_inv(U), 2)))
    return best


def check_norm_lemma(spec: GroupSpec, cone: ConeSpec,
                     window: FrequencyWindow, n_samples: int = 10_000,
                     seed: int = 0) -> NormLemmaReport:
    if cone.R < r_sufficient(cone, window, spec):
        raise ConstraintViolation("R below the certified sufficiency bound")
    rng = np.random.default_rng(seed)
    a1, d1 = lemma_box_outer(cone, window)
    lmin = spec.lambda_min
    C1 = shear_ball_norm_bound(spec, d1)
    members = 0
    violations = 0
    emp = 1.0
    while members < n_samples:
        t = rng.uniform(-d1, d1, spec.d - 1)
        a = float(np.exp(rng.uniform(np.log(1e-4 * a1), np.log(a1))))
        g = spec.element(t, a)
        if not in_outer_set(g, cone, window):
            continue
        members += 1
        nrm = operator_norm(g)
        lo = a ** lmin
        if not (lo * (1 - 1e-12) <= nrm <= C1 * lo * (1 + 1e-12)):
            violations += 1
        emp = max(emp, nrm / lo)
    pair_violations = 0
    for _ in range(n_samples):
        t = rng.uniform(-1, 1, spec.d - 1)
        tp = rng.uniform(-1, 1, spec.d - 1)
        a = float(np.exp(rng.uniform(-4, 2)))
        ap = float(np.exp(rng.uniform(-4, 2)))
        g = spec.element(t, a)
        gp = spec.element(tp, ap)
        nrm = operator_norm(multiply(invert(g), gp))
        if nrm < (ap / a) * (1 - 1e-12):
            pair_violations += 1
    return NormLemmaReport(n_members=members, violations=violations,
                           empirical_C1=emp, analytic_C1=C1,
                           pair_violations=pair_violations)


# ---------------------------------------------------------------------------
# overlap control (d = 2, vectorized)

@dataclass(frozen=True)
class OverlapReport:
    L: float
    s: float
    t: float
    h_scales: tuple
    ratios: tuple
    spread: float

    @property
    def ok(self) -> bool:
        return self.spread < 10.0


def _norms_2x2_lattice(t: np.ndarray, a: np.ndarray, lam: float):
    """Closed-form operator norms of h(t, a) and its inverse, elementwise."""
    al = a ** lam

    def norm2x2(m11, m12, m22):
        q = m11 ** 2 + m12 ** 2 + m22 ** 2
        det = np.abs(m11 * m22)
        disc = np.maximum(q * q - 4.0 * det * det, 0.0)
        return np.sqrt(0.5 * (q + np.sqrt(disc)))

    fwd = norm2x2(a, -t * al, al)
    inv = norm2x2(1.0 / a, t / a, 1.0 / al)
    return fwd, inv


def check_overlap_control(spec: GroupSpec, cone: ConeSpec,
                          window: FrequencyWindow, L_list=(0, 1, 2),
                          h_scales=None, t_box: float = 24.0,
                          log_a_box: float = 9.0,
                          spacing: float = 1.0 / 24) -> list[OverlapReport]:
    """Ratio integral / ||h||^L over an h-ladder in K_o (2D only).

    The integral runs over H_0 minus the h-shifted certified inner box
    (an under-approximation of K_i, hence a conservative domain).
    """
    if spec.d != 2:
        raise ConstraintViolation("overlap quadrature implemented for d = 2")
    lam = spec.lambdas[0]
    a0, d0 = lemma_box_inner(cone, window)
    if h_scales is None:
        h_scales = tuple(0.1 * 2.0 ** -j for j in range(6))

    tp = np.arange(-t_box + spacing / 2, t_box, spacing)
    la = np.arange(-log_a_box + spacing / 2, log_a_box, spacing)
    T, LA = np.meshgrid(tp, la, indexing="ij")
    A = np.exp(LA)
    cell = spacing * spacing
    haar_w = A ** -(spec.d - spec.trace_Y)

    reports = []
    for L in L_list:
        s = float(2 * spec.d + 1) + float(spec.lambda_min / (1 - spec.lambda_max)) * L
        tt = float(2 * spec.d + 1) + float(
            spec.lambda_min * spec.lambda_max / (1 - spec.lambda_max)) * L
        fwd, inv = _norms_2x2_lattice(T, A, lam)
        theta = (1.0 + fwd) ** -s * (1.0 + inv) ** -tt
        ratios = []
        for ah in h_scales:
            g = spec.element([0.0], ah)
            if not in_outer_set(g, cone, window):
                raise ConstraintViolation(
                    f"ladder scale {ah} is not in the outer dilation set")
            # h(0,ah) h(t',a') = h(ah^(1-lam) t', ah a')
            in_ki = (np.abs(ah ** (1 - lam) * T) < d0) & (A * ah < a0)
            integral = float(np.sum(theta * haar_w * ~in_ki)) * cell
            ratios.append(integral / operator_norm(g) ** L)
        spread = max(ratios) / min(ratios)
        reports.append(OverlapReport(L=float(L), s=s, t=tt,
                                     h_scales=tuple(h_scales),
                                     ratios=tuple(ratios), spread=spread))
    return reports


# ---------------------------------------------------------------------------
# group convolution

@dataclass(frozen=True)
class ConvolutionGrid:
    """Lattice over G = R^d x H used by the convolution checks (d = 2)."""

    x_max: float = 6.0
    n_x: int = 49
    t_max: float = 0.8
    n_t: int = 21
    log_a_max: float = 1.0
    n_a: int = 21
    n_interior: int = 3  # interior evaluation cells per axis

    def x_axis(self):
        return np.linspace(-self.x_max, self.x_max, self.n_x)

    def t_axis(self):
        return np.linspace(-self.t_max, self.t_max, self.n_t)

    def log_a_axis(self):
        return np.linspace(-self.log_a_max, self.log_a_max, self.n_a)

    def cells(self):
        dx = self.x_axis()[1] - self.x_axis()[0]
        dt = self.t_axis()[1] - self.t_axis()[0]
        da = self.log_a_axis()[1] - self.log_a_axis()[0]
        return dx * dx, dt * da


def group_convolve(F, K, spec: GroupSpec, grid: ConvolutionGrid,
                   targets) -> np.ndarray:
    """Discrete (F * K)(x', h') = sum F(x,h) K(h^-1(x'-x), h^-1 h') d(x,h).

    F: array of shape (n_x, n_x, n_t, n_a); K: callable K(z_batch, g) with
    z_batch of shape (n, 2); targets: list of ((x'), h').  The G-measure
    d(x,h) = dx dh / |det h| is applied per source cell.
    """
    xs = grid.x_axis()
    ts = grid.t_axis()
    las = grid.log_a_axis()
    cell_x, cell_h = grid.cells()
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    xpts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
    out = np.zeros(len(targets), dtype=complex)
    for it, t in enumerate(ts):
        for ia, la in enumerate(las):
            a = float(np.exp(la))
            h = spec.element([t], a)
            Fh = F[:, :, it, ia].ravel()
            if not np.any(Fh):
                continue
            hinv = invert(h)
            Minv = to_matrix(hinv)
            det_h = a ** spec.trace_Y
            haar = a ** -(spec.d - spec.trace_Y)
            weight = cell_x * cell_h * haar / det_h
            for k, (xp, hp) in enumerate(targets):
                z = (np.asarray(xp)[None, :] - xpts) @ Minv.T
                out[k] += weight * np.sum(Fh * K(z, multiply(hinv, hp)))
    return out


@dataclass(frozen=True)
class ConvolutionReport:
    max_rel_deviation: float
    halfspace_rel_deviation: float
    boundary_fraction: float
    C_psi: float
    inconclusive: bool

    @property
    def ok(self) -> bool:
        return (not self.inconclusive
                and self.max_rel_deviation < 0.10
                and self.halfspace_rel_deviation < 0.10)


def _box_nodes(w: BandlimitedWavelet, n1: int = 20, n2: int = 16,
               both_signs: bool = False):
    lo, hi = w.frequency_box()
    x1, w1 = _gl(lo[0], hi[0], n1)
    x2, w2 = _gl(lo[1], hi[1], n2)
    Z1, Z2 = np.meshgrid(x1, x2, indexing="ij")
    zeta = np.stack([Z1.ravel(), Z2.ravel()], axis=-1)
    wt = (w1[:, None] * w2[None, :]).ravel()
    if both_signs:
        zeta = np.concatenate([zeta, -zeta], axis=0)
        wt = np.concatenate([wt, wt], axis=0)
    return zeta, wt


def _band_field(uhat, w: BandlimitedWavelet, xpts: np.ndarray,
                dilations) -> np.ndarray:
    """Vectorized W_psi u over (points x dilations), frequency quadrature."""
    zeta, wt = _box_nodes(w, both_signs=w.mirrored)
    hatc = np.conj(w.hat(zeta)) * wt
    out = np.empty((len(xpts), len(dilations)), dtype=complex)
    for j, g in enumerate(dilations):
        M = to_matrix(g)
        det = abs(g.a) ** g.spec.trace_Y
        rho = zeta @ unitriangular_inv(M)  # rows: h^-T zeta
        core = uhat(rho) * hatc
        phases = np.exp(2j * np.pi * (xpts @ rho.T))
        out[:, j] = det ** -0.5 * (phases @ core)
    return out


def check_convolution_identity(u: SyntheticDistribution,
                               psi: BandlimitedWavelet,
                               eta: BandlimitedWavelet, spec: GroupSpec,
                               grid: ConvolutionGrid | None = None
                               ) -> ConvolutionReport:
    """W_eta u vs (1/C_psi)(W_psi u * W_eta psi) on interior lattice cells.

    Also runs the half-orbit variant: for real psi the convolution restricted
    to positive scales with the factor 2/C_psi must agree as well.
    """
    if grid is None:
        grid = ConvolutionGrid()
    if u.kind == "gaussian":
        uhat = _gaussian_hat(u)
    elif u.kind == "point_delta":
        x0 = np.asarray(u.x0)

        def uhat(xi):
            return np.exp(-2j * np.pi * (xi @ x0))
    elif u.kind == "grid_function":
        uhat = _grid_hat(u)
    else:
        raise ConstraintViolation(
            "convolution check supports gaussian, point_delta and "
            "grid_function data")

    xs = grid.x_axis()
    ts = grid.t_axis()
    las = grid.log_a_axis()
    cell_x, cell_h = grid.cells()
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    xpts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
    signs = (1.0, -1.0) if psi.mirrored else (1.0,)
    H = [spec.element([t], s * float(np.exp(la)))
         for s in signs for t in ts for la in las]

    F = _band_field(uhat, psi, xpts, H)  # (P, |H|)

    # interior targets
    mid = len(xs) // 2
    span = grid.n_interior // 2
    ix = range(mid - span, mid + span + 1)
    xp_idx = [i * len(xs) + j for i in ix for j in ix]
    tmid, lamid = len(ts) // 2, len(las) // 2
    hp_list = [spec.element([ts[i]], float(np.exp(las[j])))
               for i in range(tmid - span, tmid + span + 1)
               for j in range(lamid - span, lamid + span + 1)]
    xp_pts = xpts[xp_idx]

    lhs = _band_field(uhat, eta, xp_pts, hp_list)

    zeta, wt = _box_nodes(psi, both_signs=psi.mirrored)
    psihat_w = psi.hat(zeta) * wt

    def accumulate(sign_filter):
        rhs = np.zeros((len(xp_pts), len(hp_list)), dtype=complex)
        boundary = np.zeros_like(rhs)
        n_t, n_a = len(ts), len(las)
        for col, h in enumerate(H):
            if sign_filter == "positive" and h.a < 0:
                continue
            M = to_matrix(h)
            a = abs(h.a)
            det_h = a ** spec.trace_Y
            nu = zeta @ unitriangular_inv(M)  # h^-T zeta per row
            Fh = F[:, col]
            A = np.exp(-2j * np.pi * (xpts @ nu.T)).T @ Fh  # (Q,)
            core = psihat_w * A
            phases = np.exp(2j * np.pi * (xp_pts @ nu.T))  # (P', Q)
            haar = a ** -(spec.d - spec.trace_Y)
            base_w = cell_x * cell_h * haar / det_h
            flat = col % (n_t * n_a)
            on_edge = (flat // n_a in (0, n_t - 1)
                       or flat % n_a in (0, n_a - 1))
            for k, hp in enumerate(hp_list):
                gpp = multiply(invert(h), hp)
                det_g = abs(gpp.a) ** spec.trace_Y
                etav = np.conj(eta.hat(nu @ to_matrix(hp)))
                term = base_w * det_g ** 0.5 * (phases @ (core * etav))
                rhs[:, k] += term
                if on_edge:
                    boundary[:, k] += term
        return rhs, boundary

    C_res = admissibility_constant(psi, spec, spacing=1.0 / 96)
    C_psi = C_res.value

    rhs_full, bd = accumulate("all")
    rhs_full /= C_psi
    bd /= C_psi
    scale = float(np.max(np.abs(lhs)))
    dev_full = float(np.max(np.abs(lhs - rhs_full))) / scale
    boundary_fraction = float(np.max(np.abs(bd))) / scale

    if psi.mirrored:
        rhs_half, _ = accumulate("positive")
        rhs_half *= 2.0 / C_psi
        dev_half = float(np.max(np.abs(rhs_full - rhs_half))) / scale
    else:
        dev_half = dev_full

    return ConvolutionReport(
        max_rel_deviation=dev_full,
        halfspace_rel_deviation=dev_half,
        boundary_fraction=boundary_fraction,
        C_psi=C_psi,
        inconclusive=boundary_fraction > 0.20,
    )


# ---------------------------------------------------------------------------
# cross-kernel decay

@dataclass(frozen=True)
class CrossKernelReport:
    empirical_D: float
    near_max: float
    far_max: float
    n_samples: int

    @property
    def ok(self) -> bool:
        return self.far_max <= 10.0 * max(self.near_max, 1e-300)


def check_cross_kernel_decay(psi1: Wavelet, psi2: BandlimitedWavelet,
                             r: int | None, beta_triple, spec: GroupSpec,
                             n_samples: int = 1000,
                             seed: int = 0) -> CrossKernelReport:
    """|W_psi1 psi2| against D (1+|x|)^-b1 (1+|h|)^-b2 (1+|h^-1|)^-b3."""
    b1, b2, b3 = beta_triple
    ell1 = nilpotency_degree(spec) + 1
    if r is not None and not r > spec.d / 2 + ell1 * (b1 + b2 + b3) + b1:
        raise ConstraintViolation(
            "moment count r does not satisfy "
            "r > d/2 + ell1*(b1+b2+b3) + b1")
    rng = np.random.default_rng(seed)
    zeta, wt = _box_nodes(psi2, both_signs=getattr(psi2, "mirrored", False))
    hat2_w = psi2.hat(zeta) * wt
    ratios = []
    sizes = []
    for _ in range(n_samples):
        x = rng.uniform(-8, 8, spec.d)
        t = rng.uniform(-0.5, 0.5, spec.d - 1)
        a = float(np.exp(rng.uniform(-0.5, 0.5)))
        g = spec.element(t, a * rng.choice([-1.0, 1.0]))
        M = to_matrix(g)
        det = abs(g.a) ** spec.trace_Y
        val = det ** 0.5 * np.sum(
            hat2_w * np.conj(psi1.hat(zeta @ M))
            * np.exp(2j * np.pi * (zeta @ x))
        )
        n1 = operator_norm(g)
        n2 = operator_norm(invert(g))
        env = ((1.0 + np.linalg.norm(x)) ** -b1
               * (1.0 + n1) ** -b2 * (1.0 + n2) ** -b3)
        ratios.append(abs(val) / env)
        sizes.append((1.0 + np.linalg.norm(x)) * (1.0 + n1) * (1.0 + n2))
    ratios = np.asarray(ratios)
    sizes = np.asarray(sizes)
    order = np.argsort(sizes)
    half = n_samples // 2
    near = float(np.max(ratios[order[:half]]))
    far = float(np.max(ratios[order[half:]]))
    return CrossKernelReport(empirical_D=float(np.max(ratios)),
                             near_max=near, far_max=far,
                             n_samples=n_samples)


# ---------------------------------------------------------------------------
# decay transfer

@dataclass(frozen=True)
class TransferReport:
    exponent_band: float
    exponent_moment: float
    N: int
    margin: float

    @property
    def ok(self) -> bool:
        return (self.exponent_moment
                >= min(self.exponent_band, float(self.N)) - self.margin)


def check_transfer(u: SyntheticDistribution, psi_band: BandlimitedWavelet,
                   psi_moment: MomentTensorWavelet, x, N: int,
                   spec: GroupSpec, cone: ConeSpec, window: FrequencyWindow,
                   n_scales: int = 8, y_radius: float = 0.15,
                   margin: float = 0.2) -> TransferReport:
    """Decay transfers from the bandlimited to the moment wavelet.

    The moment wavelet must be real with at least required_moments(N, N(u))
    vanishing moments; its exponent on an outer-set ladder must reach
    min(bandlimited exponent on the inner-box ladder, N) - margin.
    """
    if not psi_moment.real_valued:
        raise ConstraintViolation("transfer requires a real moment wavelet")
    need = required_moments(N, u.order, spec)
    if psi_moment.declared_moments < need:
        raise ConstraintViolation(
            f"transfer at order N={N} needs r >= {need} vanishing moments, "
            f"got {psi_moment.declared_moments}")
    lad_i = build_ladder(cone, window, spec, n_scales, mode="inner_box")
    lad_o = build_ladder(cone, window, spec, n_scales, mode="exact_Ko")
    est_b = estimate_decay(u, psi_band, x, lad_i, y_radius=y_radius)
    est_m = estimate_decay(u, psi_moment, x, lad_o, y_radius=y_radius)
    return TransferReport(exponent_band=est_b.exponent,
                          exponent_moment=est_m.exponent, N=N, margin=margin)
