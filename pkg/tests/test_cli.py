import csv
import os

import numpy as np
import pytest

from zenosim import ParameterError
from zenosim.cli import (build_config, load_config_file, main, parse_value_list,
                         RunConfig)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return rows


SMALL = ["--L", "32", "--n", "512", "--tol", "1e-8"]


def test_parse_value_list_forms():
    assert parse_value_list("0,1,2.5") == (0.0, 1.0, 2.5)
    assert parse_value_list("0:40:10") == (0.0, 10.0, 20.0, 30.0, 40.0)
    assert parse_value_list("0:2:0.5") == (0.0, 0.5, 1.0, 1.5, 2.0)
    with pytest.raises(ParameterError):
        parse_value_list("0:10")
    with pytest.raises(ParameterError):
        parse_value_list("0:10:-1")


def test_config_file_and_flag_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\ngamma = 5.0\nwidth=0.5\nn = 512\n"
                        "record_density = true\ngammas = 0,1,2\n")
    values = load_config_file(cfg_file)
    assert values == {"gamma": 5.0, "width": 0.5, "n": 512,
                      "record_density": True, "gammas": (0.0, 1.0, 2.0)}

    class Args:
        config = str(cfg_file)
        gamma = 7.5
    ns = Args()
    for f in ("g", "vh", "width", "xd", "gammas", "widths", "xds", "L", "n", "dt",
              "t_final", "tol", "stride", "record_density", "workers", "dt_check",
              "out"):
        if not hasattr(ns, f):
            setattr(ns, f, None)
    cfg = build_config(ns)
    assert cfg.gamma == 7.5          # flag wins
    assert cfg.width == 0.5          # file value kept
    assert cfg.n == 512


def test_config_file_rejects_unknown_keys(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    with pytest.raises(ParameterError):
        load_config_file(bad)


def test_ground_noninteracting_closed_form(tmp_path):
    out = str(tmp_path)
    rc = main(["ground", "--g", "0", "--out", out] + SMALL)
    assert rc == 0
    meta = read_csv(os.path.join(out, "ground_state_meta.csv"))[0]
    assert float(meta["mu"]) == pytest.approx(np.sqrt(2 * 5e-4) / 2, abs=1e-6)
    assert float(meta["residual"]) <= 1e-8
    assert float(meta["E_int"]) == 0.0
    rows = read_csv(os.path.join(out, "ground_state.csv"))
    assert len(rows) == 512
    assert set(rows[0]) == {"x", "re_psi", "im_psi", "density"}


def test_ground_default_mu_in_bracket(tmp_path):
    out = str(tmp_path)
    assert main(["ground", "--out", out] + SMALL) == 0
    meta = read_csv(os.path.join(out, "ground_state_meta.csv"))[0]
    assert 0.0158 < float(meta["mu"]) < 0.026


def test_invalid_width_exits_2_without_files(tmp_path):
    out = str(tmp_path / "sub")
    rc = main(["evolve", "--width", "0", "--out", out] + SMALL)
    assert rc == 2
    assert not os.path.exists(out)


def test_evolve_files_and_row_counts(tmp_path):
    out = str(tmp_path)
    rc = main(["evolve", "--gamma", "23.4", "--width", "0.5", "--xd", "0",
               "--t-final", "1", "--dt", "1e-3", "--stride", "10",
               "--out", out] + SMALL)
    assert rc == 0
    rows = read_csv(os.path.join(out, "trajectory.csv"))
    assert len(rows) == 101
    p = np.array([float(r["p_rem"]) for r in rows])
    assert p[0] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.diff(p) < 0)
    assert os.path.exists(os.path.join(out, "manifest.txt"))
    assert not os.path.exists(os.path.join(out, "density.csv"))


def test_evolve_without_dissipation_conserves_norm(tmp_path):
    out = str(tmp_path)
    rc = main(["evolve", "--gamma", "0", "--width", "0.5", "--t-final", "1",
               "--out", out] + SMALL)
    assert rc == 0
    rows = read_csv(os.path.join(out, "trajectory.csv"))
    assert float(rows[-1]["p_rem"]) == pytest.approx(1.0, abs=1e-6)


def test_evolve_density_long_format(tmp_path):
    out = str(tmp_path)
    rc = main(["evolve", "--gamma", "5", "--width", "0.5", "--t-final", "0.2",
               "--stride", "100", "--record-density", "--out", out] + SMALL)
    assert rc == 0
    with open(os.path.join(out, "density.csv")) as fh:
        header = fh.readline().strip()
        n_rows = sum(1 for _ in fh)
    assert header == "t,x,rho"
    assert n_rows == 3 * 512         # samples at t = 0, 0.1, 0.2


def test_manifest_round_trip_reproduces_bytes(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["evolve", "--gamma", "11.25", "--width", "0.5", "--t-final", "0.5",
            "--stride", "50"] + SMALL
    assert main(args + ["--out", out1]) == 0
    manifest = os.path.join(out1, "manifest.txt")
    assert main(["evolve", "--config", manifest, "--out", out2]) == 0
    for name in ("trajectory.csv",):
        with open(os.path.join(out1, name), "rb") as fh:
            b1 = fh.read()
        with open(os.path.join(out2, name), "rb") as fh:
            b2 = fh.read()
        assert b1 == b2


def test_saturation_warning_emitted(tmp_path, capsys):
    out = str(tmp_path)
    rc = main(["evolve", "--gamma", "23.4", "--width", "0.5", "--t-final", "0.5",
               "--out", out] + SMALL)
    assert rc == 0
    assert "not yet saturated" in capsys.readouterr().err


def test_sweep_writes_named_loss_curve(tmp_path):
    out = str(tmp_path)
    rc = main(["sweep", "--width", "0.5", "--xd", "-5", "--gammas", "0,2,4",
               "--t-final", "0.5", "--out", out] + SMALL)
    assert rc == 0
    rows = read_csv(os.path.join(out, "loss_curve_0.5_-5.csv"))
    assert [float(r["gamma"]) for r in rows] == [0.0, 2.0, 4.0]
    assert float(rows[0]["final_loss"]) == pytest.approx(0.0, abs=1e-6)


def test_zeno_scan_matrix_and_collapse_report(tmp_path):
    out = str(tmp_path)
    rc = main(["zeno-scan", "--widths", "0.5,2.0", "--xds", "0,-5",
               "--gammas", "0:6:2", "--t-final", "0.5", "--out", out] + SMALL)
    assert rc == 0
    for w in ("0.5", "2"):
        for xd in ("0", "-5"):
            assert os.path.exists(os.path.join(out, f"loss_curve_{w}_{xd}.csv"))
    report = read_csv(os.path.join(out, "collapse_report.csv"))
    assert len(report) == 4
    refs = [r for r in report if float(r["x_d"]) == 0.0]
    for r in refs:
        assert float(r["scale"]) == 1.0
        assert float(r["residual"]) == 0.0
    # monotone rising curves have no critical point: field left empty
    w2 = [r for r in report if float(r["w"]) == 2.0]
    assert all(r["gamma_star"] == "" for r in w2)


def test_zeno_scan_single_curve_report(tmp_path):
    out = str(tmp_path)
    rc = main(["zeno-scan", "--widths", "0.5", "--xds", "0", "--gammas", "0,1,2",
               "--t-final", "0.5", "--out", out] + SMALL)
    assert rc == 0
    report = read_csv(os.path.join(out, "collapse_report.csv"))
    assert len(report) == 1
    assert float(report[0]["scale"]) == 1.0
    assert float(report[0]["residual"]) == 0.0


def test_boundary_contamination_exit_code(tmp_path):
    out = str(tmp_path / "sub")
    rc = main(["evolve", "--gamma", "0", "--width", "0.5", "--L", "16",
               "--n", "256", "--t-final", "0.5", "--out", out])
    assert rc == 5


def test_outdir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("ZENOSIM_OUTDIR", str(tmp_path / "envout"))
    rc = main(["ground", "--g", "0"] + SMALL)
    assert rc == 0
    assert os.path.exists(tmp_path / "envout" / "ground_state.csv")


def test_runconfig_defaults_match_reference_setup():
    cfg = RunConfig()
    assert cfg.g == 0.1 and cfg.vh == 5e-4
    assert cfg.L == 32.0 and cfg.n == 10240
    assert cfg.dt == 1e-3 and cfg.t_final == 4.0
    assert cfg.widths == (0.025, 0.1, 0.5, 1.0, 2.0)
    assert cfg.xds == (0.0, -5.0, -10.0)
