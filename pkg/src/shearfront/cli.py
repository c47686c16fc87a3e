"""Command-line entry point: group | wavelet | transform | detect | verify.

Exit codes: 0 success, 1 checks-ran-and-failed, 2 usage/configuration error.
All tables are TSV with a leading comment line naming units and the
constants snapshot in effect; raw dumps are one text header line
(``dims: P D 2``) followed by little-endian 64-bit floats.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .detector import build_ladder, classify, estimate_decay, wavefront_map
from .errors import ShearfrontError
from .groups import operator_norm
from .orbit import r_sufficient
from .transform import (
    SyntheticDistribution,
    coefficient_field,
    gaussian,
    halfspace_edge,
    line_delta,
    point_delta,
)
from .verifier import (
    check_convolution_identity,
    check_cross_kernel_decay,
    check_norm_lemma,
    check_overlap_control,
    check_transfer,
    compute_ledger,
)
from .wavelets import (
    admissibility_constant,
    check_vanishing_moments,
    make_bandlimited,
    make_moment_wavelet,
)

USAGE_ERROR = 2
CHECK_FAILED = 1


def _fmt(v) -> str:
    return repr(float(v))


def _snapshot(cfg: ExperimentConfig) -> str:
    s = cfg.spec
    return (f"# shearfront {__version__}; units: space/frequency dimensionless"
            f"; group={s.family_tag} d={s.d} lambda={list(s.lambdas)}"
            f"; window=({cfg.window.tau1},{cfg.window.tau2},{cfg.window.eps0})"
            f"; cone=(eps={cfg.cone.eps},R={cfg.cone.R}); seed={cfg.seed}")


def _open_out(cfg: ExperimentConfig, name: str):
    os.makedirs(cfg.output, exist_ok=True)
    return open(os.path.join(cfg.output, name), "w", encoding="utf-8")


def _signal(cfg: ExperimentConfig) -> SyntheticDistribution:
    tab = cfg.signal
    kind = tab.get("kind", "gaussian")
    if kind == "point_delta":
        return point_delta(tab.get("x0", [0.0] * cfg.spec.d))
    if kind == "line_delta":
        return line_delta(float(tab.get("offset", 0.0)))
    if kind == "halfspace_edge":
        return halfspace_edge(float(tab.get("offset", 0.0)))
    if kind == "gaussian":
        return gaussian(tab.get("center", [0.0] * cfg.spec.d),
                        float(tab.get("width", 0.5)))
    raise ShearfrontError(f"unknown signal kind '{kind}'")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_group(cfg: ExperimentConfig, args) -> int:
    if args.action == "validate":
        violations = cfg.spec.detection_violations()
        with _open_out(cfg, "group_validate.tsv") as fh:
            fh.write(_snapshot(cfg) + "\n")
            fh.write("check\tstatus\n")
            fh.write("algebra_closure\tpass\n")  # enforced at construction
            if violations:
                for v in violations:
                    fh.write(f"detection\tfail: {v}\n")
            else:
                fh.write("detection\tpass\n")
        return CHECK_FAILED if violations else 0
    # constants
    led = compute_ledger(cfg.spec, cfg.detect.N, 0)
    with _open_out(cfg, "group_constants.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        fh.write("name\texact\tfloat\n")
        for name, val, f in led.rows():
            fh.write(f"{name}\t{val}\t{f!r}\n")
    return 0


def _cmd_wavelet(cfg: ExperimentConfig, args) -> int:
    w = cfg.wavelet
    if args.action == "make":
        xs = np.linspace(-4.0, 4.0, 161)
        grid = np.zeros((len(xs), cfg.spec.d))
        grid[:, 0] = xs
        hat = w.hat(grid)
        with _open_out(cfg, "wavelet_profile.tsv") as fh:
            fh.write(_snapshot(cfg) + "\n")
            fh.write("xi1\tRe_hat\tIm_hat\n")
            for x, v in zip(xs, hat):
                fh.write(f"{_fmt(x)}\t{_fmt(v.real)}\t{_fmt(v.imag)}\n")
        return 0
    # check
    r = w.declared_moments if w.declared_moments is not None else 1
    mom = check_vanishing_moments(w, r)
    adm = admissibility_constant(w, cfg.spec)
    with _open_out(cfg, "wavelet_check.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        fh.write("check\tvalue\tstatus\n")
        fh.write(f"vanishing_moments\t{mom.residual!r}\t"
                 f"{'pass' if mom.passed else 'fail'}\n")
        fh.write(f"admissibility_constant\t{adm.value!r}\t"
                 f"{'converged' if adm.converged else 'not_converged'}\n")
    return 0 if mom.passed and adm.converged else CHECK_FAILED


def _cmd_transform(cfg: ExperimentConfig, args) -> int:
    u = _signal(cfg)
    w = cfg.wavelet
    n = args.grid
    axis = np.linspace(-1.0, 1.0, n)
    mesh = np.meshgrid(*([axis] * cfg.spec.d), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    scales = [2.0 ** -(3 + j) for j in range(args.scales)]
    dilations = [cfg.spec.element([0.0] * (cfg.spec.d - 1), a)
                 for a in scales]
    field = coefficient_field(u, w, points, dilations)
    with _open_out(cfg, "transform.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        cols = [f"x{i + 1}" for i in range(cfg.spec.d)]
        cols += [f"t{i + 1}" for i in range(cfg.spec.d - 1)]
        fh.write("\t".join(cols + ["a", "absW", "ReW", "ImW"]) + "\n")
        for i, x in enumerate(points):
            for j, g in enumerate(dilations):
                v = field.values[i, j]
                row = [_fmt(c) for c in x] + [_fmt(c) for c in g.t]
                row += [_fmt(g.a), _fmt(abs(v)), _fmt(v.real), _fmt(v.imag)]
                fh.write("\t".join(row) + "\n")
    if args.raw:
        os.makedirs(cfg.output, exist_ok=True)
        path = os.path.join(cfg.output, args.raw)
        with open(path, "wb") as fh:
            fh.write(f"dims: {len(points)} {len(dilations)} 2\n"
                     .encode("ascii"))
            out = np.empty(field.values.shape + (2,))
            out[..., 0] = field.values.real
            out[..., 1] = field.values.imag
            fh.write(out.astype("<f8").tobytes())
    return 0


def _cmd_detect(cfg: ExperimentConfig, args) -> int:
    u = _signal(cfg)
    w = cfg.wavelet
    det = cfg.detect
    N = args.N if args.N is not None else det.N
    n_scales = args.scales if args.scales is not None else det.scales
    n_grid = args.grid if args.grid is not None else det.grid
    n_dir = args.directions if args.directions is not None else det.directions
    mode = args.mode if args.mode is not None else det.mode
    ladder = build_ladder(cfg.cone, cfg.window, cfg.spec, n_scales,
                          mode="inner_box" if mode == "inner" else "exact_Ki")
    axis = np.linspace(-1.0, 1.0, n_grid)
    mesh = np.meshgrid(*([axis] * cfg.spec.d), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    angles = np.pi * (np.arange(n_dir) + 0.5) / n_dir - np.pi / 2
    if cfg.spec.d != 2:
        raise ShearfrontError("detect grid directions implemented for d = 2")
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    cells = wavefront_map(u, w, points, directions, N, ladder, cfg.spec,
                          y_radius=det.y_radius, n_y=det.n_y)
    n_singular = 0
    with _open_out(cfg, "detect_verdicts.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        fh.write("x1\tx2\txi1\txi2\tN\texponent\tverdict\n")
        for cell in cells:
            if cell.skipped:
                fh.write("\t".join(_fmt(v) for v in cell.point)
                         + "\t" + "\t".join(_fmt(v) for v in cell.direction)
                         + f"\t{N}\tnan\tout_of_orbit\n")
                continue
            v = cell.verdict
            n_singular += v.label == "singular_at_N"
            fh.write("\t".join(_fmt(c) for c in cell.point)
                     + "\t" + "\t".join(_fmt(c) for c in cell.direction)
                     + f"\t{N}\t{_fmt(v.exponent)}\t{v.label}\n")
    # per-cell log-log curves for plotting
    with _open_out(cfg, "detect_loglog.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        fh.write("cell\tlog_norm\tlog_absW\n")
        from .detector import steer_ladder, steering_element
        from .transform import coefficient
        for idx, cell in enumerate(cells):
            if cell.skipped:
                continue
            xi = np.asarray(cell.direction)
            rep = xi if xi[0] > 0 else -xi
            g_dir = steering_element(cfg.spec, rep[1:] / rep[0])
            for g in steer_ladder(ladder, g_dir).elements:
                val = abs(coefficient(u, w, cell.point, g))
                fh.write(f"{idx}\t{_fmt(np.log(operator_norm(g)))}\t"
                         f"{_fmt(np.log(max(val, 1e-300)))}\n")
    return CHECK_FAILED if n_singular else 0


def _cmd_verify(cfg: ExperimentConfig, args) -> int:
    suite = args.suite
    seed = args.seed if args.seed is not None else cfg.seed
    rows = []
    ok = True
    if suite == "constants":
        led = compute_ledger(cfg.spec, cfg.detect.N, 0)
        rows = [(name, str(val), "pass") for name, val, _ in led.rows()]
    elif suite == "norms":
        rep = check_norm_lemma(cfg.spec, cfg.cone, cfg.window,
                               n_samples=2000, seed=seed)
        ok = rep.ok
        rows = [("violations", str(rep.violations), "pass" if ok else "fail"),
                ("pair_violations", str(rep.pair_violations), ""),
                ("empirical_C1", repr(rep.empirical_C1), ""),
                ("analytic_C1", repr(rep.analytic_C1), "")]
    elif suite == "overlap":
        reps = check_overlap_control(cfg.spec, cfg.cone, cfg.window)
        ok = all(r.ok for r in reps)
        rows = [(f"spread_L{int(r.L)}", repr(r.spread),
                 "pass" if r.ok else "fail") for r in reps]
    elif suite == "convolution":
        psi = make_bandlimited(cfg.window, mirrored=True, d=cfg.spec.d)
        rep = check_convolution_identity(gaussian([0.0] * cfg.spec.d, 0.5),
                                         psi, psi, cfg.spec)
        ok = rep.ok
        rows = [("max_rel_deviation", repr(rep.max_rel_deviation),
                 "pass" if rep.max_rel_deviation < 0.10 else "fail"),
                ("halfspace_rel_deviation", repr(rep.halfspace_rel_deviation),
                 "pass" if rep.halfspace_rel_deviation < 0.10 else "fail"),
                ("C_psi", repr(rep.C_psi), ""),
                ("boundary_fraction", repr(rep.boundary_fraction),
                 "inconclusive" if rep.inconclusive else "")]
    elif suite == "crosskernel":
        led = compute_ledger(cfg.spec, cfg.detect.N, 0)
        psi = make_bandlimited(cfg.window, mirrored=True, d=cfg.spec.d)
        rep = check_cross_kernel_decay(
            psi, psi, None,
            (led.beta1, float(led.beta2), float(led.beta3)),
            cfg.spec, n_samples=500, seed=seed)
        ok = rep.ok
        rows = [("empirical_D", repr(rep.empirical_D),
                 "pass" if ok else "fail"),
                ("near_max", repr(rep.near_max), ""),
                ("far_max", repr(rep.far_max), "")]
    elif suite == "transfer":
        N = cfg.detect.N
        from .wavelets import required_moments
        r = required_moments(N, 0, cfg.spec)
        psi_b = make_bandlimited(cfg.window, mirrored=True, d=cfg.spec.d)
        psi_m = make_moment_wavelet(r, core="gaussian", d=cfg.spec.d)
        u = _signal(cfg)
        x = cfg.signal.get("x0", cfg.signal.get("center",
                                                [0.0] * cfg.spec.d))
        rep = check_transfer(u, psi_b, psi_m, x, N, cfg.spec, cfg.cone,
                             cfg.window)
        ok = rep.ok
        rows = [("exponent_band", repr(rep.exponent_band),
                 "pass" if ok else "fail"),
                ("exponent_moment", repr(rep.exponent_moment), ""),
                ("required_r", str(r), "")]
    with _open_out(cfg, f"verify_{suite}.tsv") as fh:
        fh.write(_snapshot(cfg) + "\n")
        fh.write("name\tvalue\tstatus\n")
        for name, val, status in rows:
            fh.write(f"{name}\t{val}\t{status}\n")
    return 0 if ok else CHECK_FAILED


# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shearfront")
    p.add_argument("--config", required=True, help="TOML configuration file")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group")
    g.add_argument("action", choices=["validate", "constants"])

    wv = sub.add_parser("wavelet")
    wv.add_argument("action", choices=["make", "check"])

    tr = sub.add_parser("transform")
    tr.add_argument("--grid", type=int, default=3)
    tr.add_argument("--scales", type=int, default=6)
    tr.add_argument("--raw", default=None,
                    help="also write a raw float64 dump to this file name")

    dt = sub.add_parser("detect")
    dt.add_argument("--N", type=int, default=None)
    dt.add_argument("--scales", type=int, default=None)
    dt.add_argument("--grid", type=int, default=None)
    dt.add_argument("--directions", type=int, default=None)
    dt.add_argument("--mode", choices=["inner", "exact"], default=None)

    vf = sub.add_parser("verify")
    vf.add_argument("--suite", required=True,
                    choices=["constants", "norms", "overlap", "convolution",
                             "crosskernel", "transfer"])
    vf.add_argument("--seed", type=int, default=None)
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return USAGE_ERROR
    except ShearfrontError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        handler = {
            "group": _cmd_group,
            "wavelet": _cmd_wavelet,
            "transform": _cmd_transform,
            "detect": _cmd_detect,
            "verify": _cmd_verify,
        }[args.command]
        return handler(cfg, args)
    except ShearfrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CHECK_FAILED


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
