"""TOML experiment configuration: parsing, validation, defaults.

Every numeric gate is validated at parse time and reported by naming the
violated inequality; unknown keys and duplicate sections are rejected.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConstraintViolation, SpecMismatchError
from .groups import GroupSpec, standard_basis, toeplitz_basis
from .orbit import ConeSpec, FrequencyWindow, r_sufficient
from .wavelets import (
    BandlimitedWavelet,
    MomentTensorWavelet,
    Wavelet,
    make_bandlimited,
    make_moment_wavelet,
)

_KNOWN = {
    "": {"output", "seed"},
    "group": {"family", "d", "lambda", "delta", "basis"},
    "window": {"tau1", "tau2", "eps0"},
    "cone": {"eps", "R"},
    "wavelet": {"kind", "r", "core", "support_radius", "mirrored"},
    "signal": {"kind", "x0", "offset", "center", "width"},
    "detect": {"N", "scales", "grid", "directions", "mode", "y_radius",
               "n_y"},
    "verify": {"suite", "seed"},
}


@dataclass(frozen=True)
class DetectSettings:
    N: int = 1
    scales: int = 8
    grid: int = 3
    directions: int = 4
    mode: str = "inner"
    y_radius: float = 0.01
    n_y: int = 5


@dataclass(frozen=True)
class ExperimentConfig:
    spec: GroupSpec
    window: FrequencyWindow
    cone: ConeSpec
    wavelet: Wavelet
    signal: dict
    detect: DetectSettings
    verify: dict
    output: str = "."
    seed: int = 0


def _reject_unknown(section: str, table: dict):
    known = _KNOWN[section]
    for key in table:
        if isinstance(table[key], dict):
            continue
        if key not in known:
            where = f"[{section}]" if section else "top level"
            raise ConstraintViolation(f"unknown key '{key}' in {where}")


def _check_lambdas(spec: GroupSpec) -> GroupSpec:
    if not spec.lambda_min > 0:
        raise ConstraintViolation("lambda_min > 0 required in [group]")
    if not spec.lambda_max < 1:
        raise ConstraintViolation("lambda_max < 1 required in [group]")
    return spec


def _build_group(table: dict) -> GroupSpec:
    _reject_unknown("group", table)
    family = table.get("family", "standard")
    d = int(table.get("d", 2))
    if family == "standard":
        lambdas = table.get("lambda")
        if lambdas is None:
            lambdas = [0.5] * (d - 1)
        if len(lambdas) != d - 1:
            raise ConstraintViolation(
                "len(lambda) == d - 1 violated in [group]")
        return _check_lambdas(standard_basis([float(v) for v in lambdas]))
    if family == "toeplitz":
        if "delta" not in table:
            raise ConstraintViolation(
                "toeplitz family requires 'delta' in [group]")
        return _check_lambdas(toeplitz_basis(d, float(table["delta"])))
    if family == "custom":
        if "lambda" not in table or "basis" not in table:
            raise ConstraintViolation(
                "custom family requires 'lambda' and 'basis' in [group]")
        basis = tuple(
            np.asarray(rows, dtype=float).reshape(d, d)
            for rows in table["basis"]
        )
        return _check_lambdas(
            GroupSpec(d=d, lambdas=tuple(float(v) for v in table["lambda"]),
                      shearing_basis=basis, family_tag="custom"))
    raise ConstraintViolation(
        f"unknown group family '{family}' (standard|toeplitz|custom)")


def _build_cone(table: dict, window: FrequencyWindow,
                spec: GroupSpec) -> ConeSpec:
    _reject_unknown("cone", table)
    eps = float(table.get("eps", 0.1))
    R = table.get("R", "auto")
    if R == "auto":
        probe = ConeSpec(eps=eps, R=2.0)
        R = 1.05 * r_sufficient(probe, window, spec)
    return ConeSpec(eps=eps, R=float(R))


def _build_wavelet(table: dict, window: FrequencyWindow,
                   d: int) -> Wavelet:
    _reject_unknown("wavelet", table)
    kind = table.get("kind", "bandlimited")
    if kind == "bandlimited":
        return make_bandlimited(window, mirrored=bool(
            table.get("mirrored", False)), d=d)
    if kind == "moment":
        return make_moment_wavelet(
            int(table.get("r", 4)),
            core=str(table.get("core", "gaussian")),
            support_radius=float(table.get("support_radius", 1.0)),
            d=d,
        )
    raise ConstraintViolation(
        f"unknown wavelet kind '{kind}' (bandlimited|moment)")


def _build_detect(table: dict) -> DetectSettings:
    _reject_unknown("detect", table)
    out = DetectSettings(
        N=int(table.get("N", 1)),
        scales=int(table.get("scales", 8)),
        grid=int(table.get("grid", 3)),
        directions=int(table.get("directions", 4)),
        mode=str(table.get("mode", "inner")),
        y_radius=float(table.get("y_radius", 0.01)),
        n_y=int(table.get("n_y", 5)),
    )
    if out.N < 0:
        raise ConstraintViolation("N >= 0 violated in [detect]")
    if out.mode not in ("inner", "exact"):
        raise ConstraintViolation("[detect] mode must be inner|exact")
    return out


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # duplicate sections/keys surface here with position information
        raise SpecMismatchError(f"config syntax error: {exc}") from exc
    _reject_unknown("", data)
    for section in data:
        if isinstance(data[section], dict) and section not in _KNOWN:
            raise ConstraintViolation(f"unknown section [{section}]")

    spec = _build_group(data.get("group", {}))

    wtab = dict(data.get("window", {}))
    _reject_unknown("window", wtab)
    window = FrequencyWindow(
        tau1=float(wtab.get("tau1", 0.9)),
        tau2=float(wtab.get("tau2", 1.1)),
        eps0=float(wtab.get("eps0", 0.1)),
    )
    cone = _build_cone(dict(data.get("cone", {})), window, spec)
    wavelet = _build_wavelet(dict(data.get("wavelet", {})), window, spec.d)

    stab = dict(data.get("signal", {"kind": "gaussian"}))
    _reject_unknown("signal", stab)

    vtab = dict(data.get("verify", {}))
    _reject_unknown("verify", vtab)

    return ExperimentConfig(
        spec=spec,
        window=window,
        cone=cone,
        wavelet=wavelet,
        signal=stab,
        detect=_build_detect(dict(data.get("detect", {}))),
        verify=vtab,
        output=str(data.get("output", ".")),
        seed=int(data.get("seed", 0)),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
