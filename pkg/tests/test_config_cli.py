import struct

import numpy as np
import pytest

from shearfront import ConstraintViolation, ShearfrontError, SpecMismatchError
from shearfront.cli import main
from shearfront.config import parse_config

BASE = """\
output = "{out}"
seed = 7

[group]
family = "standard"
d = 2
lambda = [0.5]

[window]
tau1 = 0.9
tau2 = 1.1
eps0 = 0.1

[cone]
eps = 0.1
R = {R}

[wavelet]
kind = "bandlimited"
mirrored = true

[signal]
kind = "gaussian"
center = [0.0, 0.0]
width = 0.5

[detect]
N = 1
scales = 6
grid = 1
directions = 2
"""


def _cfg_text(out=".", R="10.0"):
    return BASE.format(out=out, R=R)


# ---------------------------------------------------------------------------
# parsing

def test_parse_defaults():
    cfg = parse_config(_cfg_text())
    assert cfg.seed == 7
    assert cfg.spec.d == 2
    assert cfg.cone.R == 10.0
    assert cfg.detect.N == 1 and cfg.detect.mode == "inner"
    assert cfg.wavelet.real_valued


def test_parse_R_auto():
    cfg = parse_config(_cfg_text(R='"auto"'))
    assert cfg.cone.R == pytest.approx(1.05 * 8.8)


def test_unknown_key_rejected():
    with pytest.raises(ConstraintViolation, match="bogus"):
        parse_config(_cfg_text() + "\n[verify]\nbogus = 1\n")


def test_unknown_section_rejected():
    with pytest.raises(ConstraintViolation, match="mystery"):
        parse_config(_cfg_text() + "\n[mystery]\nx = 1\n")


def test_duplicate_section_rejected():
    with pytest.raises(SpecMismatchError):
        parse_config(_cfg_text() + "\n[window]\ntau1 = 0.8\n")


def test_lambda_gate_named_in_error():
    bad = _cfg_text().replace("lambda = [0.5]", "lambda = [1.2]")
    with pytest.raises(ShearfrontError, match=r"lambda_max < 1.*\[group\]"):
        parse_config(bad)


# ---------------------------------------------------------------------------
# CLI

@pytest.fixture()
def cfgfile(tmp_path):
    out = tmp_path / "out"
    path = tmp_path / "exp.toml"
    path.write_text(_cfg_text(out=str(out)))
    return str(path), out


def test_cli_group_and_wavelet(cfgfile):
    path, out = cfgfile
    assert main(["--config", path, "group", "validate"]) == 0
    assert main(["--config", path, "group", "constants"]) == 0
    assert main(["--config", path, "wavelet", "check"]) == 0
    for name in ("group_validate.tsv", "group_constants.tsv",
                 "wavelet_check.tsv"):
        text = (out / name).read_text()
        assert text.startswith("# shearfront 0.1.0;")
        assert "seed=7" in text.splitlines()[0]


def test_cli_verify_constants(cfgfile):
    path, out = cfgfile
    assert main(["--config", path, "verify", "--suite", "constants"]) == 0
    body = (out / "verify_constants.tsv").read_text()
    assert "s1\t17/2\tpass" in body
    assert "required_r\t96\tpass" in body  # detect N=1 in this config


def test_cli_constants_deterministic(cfgfile):
    path, out = cfgfile
    main(["--config", path, "group", "constants"])
    first = (out / "group_constants.tsv").read_bytes()
    main(["--config", path, "group", "constants"])
    assert (out / "group_constants.tsv").read_bytes() == first


def test_cli_transform_raw(cfgfile, tmp_path):
    path, out = cfgfile
    raw = tmp_path / "coeffs.bin"
    assert main(["--config", path, "transform", "--grid", "2",
                 "--scales", "3", "--raw", str(raw)]) == 0
    blob = raw.read_bytes()
    header, _, rest = blob.partition(b"\n")
    assert header == b"dims: 4 3 2"
    vals = np.frombuffer(rest, dtype="<f8")
    assert vals.size == 4 * 3 * 2
    tsv = (out / "transform.tsv").read_text().splitlines()
    # TSV magnitudes must agree with the raw Re/Im payload
    arr = vals.reshape(4, 3, 2)
    mags = np.abs(arr[..., 0] + 1j * arr[..., 1])
    assert np.isfinite(mags).all()


def test_cli_detect_regular_signal(cfgfile):
    path, out = cfgfile
    assert main(["--config", path, "detect"]) == 0
    verdicts = (out / "detect_verdicts.tsv").read_text()
    assert "singular_at_N" not in verdicts
    assert (out / "detect_loglog.tsv").exists()


def test_cli_detect_singular_exit_code(cfgfile, tmp_path):
    path, out = cfgfile
    text = _cfg_text(out=str(out)).replace(
        'kind = "gaussian"\ncenter = [0.0, 0.0]\nwidth = 0.5',
        'kind = "point_delta"\nx0 = [0.0, 0.0]')
    p2 = tmp_path / "sing.toml"
    p2.write_text(text)
    # grid=3 puts the origin itself among the probed points
    assert main(["--config", str(p2), "detect", "--grid", "3"]) == 1
    assert "singular_at_N" in (out / "detect_verdicts.tsv").read_text()


def test_cli_missing_config_is_usage_error(tmp_path):
    assert main(["--config", str(tmp_path / "absent.toml"),
                 "group", "validate"]) == 2


def test_cli_bad_usage(cfgfile):
    path, _ = cfgfile
    assert main(["--config", path, "group", "frobnicate"]) == 2
    assert main(["--config", path, "verify", "--suite", "nope"]) == 2
    assert main([]) == 2


def test_cli_bad_config_is_usage_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text(_cfg_text() + "\n[mystery]\nx = 1\n")
    assert main(["--config", str(bad), "group", "validate"]) == 2
