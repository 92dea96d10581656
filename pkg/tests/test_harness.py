import os
import subprocess
import sys

import numpy as np
import pytest

from usol.harness.config import (ConfigError, ExperimentConfig, load_config,
                                 parse_lambda_seq, parse_pair, parse_z_sweep)
from usol.harness.experiments import exp_dyadic_check, exp_normest, exp_region
from usol.harness.report import render_csv, write_svg


def test_parse_pair():
    ip, iq = parse_pair("5/6,1/6")
    assert ip * 6 == 5 and iq * 6 == 1
    ip, iq = parse_pair("0.75, 0.25")
    assert float(ip) == 0.75
    with pytest.raises(ConfigError):
        parse_pair("0.75")


def test_parse_lambda_seq():
    seq = parse_lambda_seq("0.125:0.0078125:5")
    assert len(seq) == 5
    assert seq[0] == pytest.approx(0.125)
    assert seq[-1] == pytest.approx(0.0078125)
    with pytest.raises(ConfigError):
        parse_lambda_seq("2.0:0.1:5")


def test_parse_z_sweep():
    zs = parse_z_sweep("circle:16")
    assert len(zs) == 16
    assert min(abs(z.imag) for z in zs) >= np.sin(np.pi / 16) - 1e-12
    assert all(abs(abs(z) - 1.0) < 1e-12 for z in zs)
    zs = parse_z_sweep("line:0.5:0.1:0.9:5")
    assert zs[0] == 0.5 + 0.1j and zs[-1] == 0.5 + 0.9j


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("dim = 4\n# a comment\nseed = 7\nbox_L = 10.0\n")
    cfg = load_config(str(path))
    assert cfg.dim == 4 and cfg.seed == 7 and cfg.box_L == 10.0
    cfg = load_config(str(path), overrides={"dim": 3})
    assert cfg.dim == 3 and cfg.seed == 7
    bad = tmp_path / "bad.cfg"
    bad.write_text("dim: 3\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    bad2 = tmp_path / "bad2.cfg"
    bad2.write_text("unknown_key = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(bad2))


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(dim=2).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(signature_k=3).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(grid_n=24).validate()


def test_region_csv_has_twelve_rows():
    cfg = ExperimentConfig().validate()
    rep = exp_region(cfg)
    assert len(rep.rows) == 12
    assert rep.passed
    text = render_csv(rep, timestamp=False)
    data_lines = [l for l in text.splitlines()
                  if l and not l.startswith("#")]
    assert len(data_lines) == 13  # header + 12 records


def test_csv_determinism():
    cfg = ExperimentConfig().validate()
    a = render_csv(exp_normest(cfg), timestamp=False)
    b = render_csv(exp_normest(cfg), timestamp=False)
    assert a == b
    # the timestamp line is the only nondeterministic content
    c = render_csv(exp_normest(cfg), timestamp=True)
    stripped = "\n".join(l for l in c.splitlines()
                         if not l.startswith("# generated:"))
    assert stripped + "\n" == a


def test_report_self_consistency():
    from usol.harness.experiments import exp_sharpness_knapp

    cfg = ExperimentConfig().validate()
    rep = exp_sharpness_knapp(cfg)
    assert rep.passed
    for fit in rep.fits:
        refit = rep.refit_from_rows(fit)
        assert refit == pytest.approx(fit.slope, abs=1e-12)


def test_svg_written(tmp_path):
    from usol.harness.experiments import exp_sharpness_knapp

    cfg = ExperimentConfig().validate()
    rep = exp_sharpness_knapp(cfg)
    path = tmp_path / "knapp.svg"
    assert write_svg(rep, str(path))
    blob = path.read_text()
    assert blob.lstrip().startswith("<?xml") and "svg" in blob[:300]
    assert 2000 < len(blob)


def test_cli_exit_codes(tmp_path):
    env = dict(os.environ)
    out = subprocess.run([sys.executable, "-m", "usol.harness.cli", "region",
                          "--dim", "3", "--no-timestamp",
                          "--out", str(tmp_path / "r.csv")],
                         capture_output=True, text=True, env=env)
    assert out.returncode == 0
    assert (tmp_path / "r.csv").exists()
    out = subprocess.run([sys.executable, "-m", "usol.harness.cli", "region",
                          "--dim", "2"], capture_output=True, text=True, env=env)
    assert out.returncode == 2
    assert "configuration error" in out.stderr
    out = subprocess.run([sys.executable, "-m", "usol.harness.cli", "region",
                          "--pair", "nonsense"], capture_output=True, text=True,
                         env=env)
    assert out.returncode == 2


def test_cli_csv_bytes_deterministic(tmp_path):
    env = dict(os.environ)
    paths = []
    for tag in ("a", "b"):
        p = tmp_path / f"dy-{tag}.csv"
        out = subprocess.run([sys.executable, "-m", "usol.harness.cli",
                              "dyadic-check", "--seed", "5", "--no-timestamp",
                              "--no-svg", "--out", str(p)],
                             capture_output=True, text=True, env=env)
        assert out.returncode == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
