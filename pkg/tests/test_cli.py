"""Command-line interface: config validation, outputs, manifests, exit
codes, and rerun determinism."""

import csv
import hashlib
import json
import os

import pytest

from hfbdyn.cli import (EXIT_CONFIG, EXIT_GUARD, EXIT_OK, config_hash,
                        load_config, main)


BASE = {
    "schema_version": 1,
    "lattice": {"dimension": 1, "cutoff": 1, "particle_counts": [1, 1]},
    "potential": {"kind": "gaussian", "params": {"v0": -0.4, "sigma": 1.5}},
    "initial_state": {"kind": "random-pure", "seed": 3},
    "dynamics": {"variant": "hfb", "t_final": 0.2},
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_evolve_outputs_and_manifest(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    out = tmp_path / "out"
    assert main(["evolve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    (rundir,) = out.iterdir()
    traj = rundir / "trajectory.csv"
    manifest = json.loads((rundir / "manifest.json").read_text())
    assert manifest["files"]["trajectory.csv"] == sha(traj)
    with open(traj) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["t"] == "0.0"
    assert float(rows[-1]["t"]) == pytest.approx(0.2)
    assert abs(float(rows[-1]["trace_omega"])
               - float(rows[0]["trace_omega"])) <= 1e-9
    assert float(rows[-1]["purity_residual"]) <= 1e-9
    # rerunning the identical config reproduces the file byte for byte
    h1 = sha(traj)
    assert main(["evolve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert sha(traj) == h1


def test_evolve_with_overrides(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    out = tmp_path / "out"
    code = main(["evolve", "--config", cfg, "--out", str(out),
                 "--override", "dynamics.t_final=0.1",
                 "--override", "dynamics.variant=\"hb\""])
    assert code == EXIT_OK
    (rundir,) = out.iterdir()
    resolved = json.loads((rundir / "resolved_config.json").read_text())
    assert resolved["dynamics"]["t_final"] == 0.1
    assert resolved["dynamics"]["variant"] == "hb"


def test_invalid_config_exits_2(tmp_path, capsys):
    bad = dict(BASE, dynamics={"variant": "bogus", "t_final": 0.2})
    cfg = write_cfg(tmp_path, bad)
    assert main(["evolve", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config"
    assert "/dynamics" in err["message"]


def test_unknown_key_rejected(tmp_path, capsys):
    bad = dict(BASE)
    bad["extra_block"] = {}
    cfg = write_cfg(tmp_path, bad)
    assert main(["evolve", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_compare_guard_on_large_lattice(tmp_path, capsys):
    big = json.loads(json.dumps(BASE))
    big["lattice"]["cutoff"] = 3  # 14 modes
    big["oracle"] = {"enabled": True, "l_max": 10, "times": [0.1]}
    cfg = write_cfg(tmp_path, big)
    assert main(["compare", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == EXIT_GUARD
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "guard"


def test_compare_produces_error_kernel_table(tmp_path):
    cfg_d = json.loads(json.dumps(BASE))
    cfg_d["oracle"] = {"enabled": True, "l_max": 8, "times": [0.1, 0.2]}
    cfg = write_cfg(tmp_path, cfg_d)
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == EXIT_OK
    (rundir,) = out.iterdir()
    with open(rundir / "error_kernels.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["t"]) for r in rows] == pytest.approx([0.0, 0.1, 0.2])
    assert float(rows[0]["err2_hs"]) <= 1e-10  # Wick-exact at t = 0
    assert float(rows[0]["err4_hs"]) <= 1e-10
    assert float(rows[-1]["ratio4"]) >= 0.0


def test_compare_sweep(tmp_path):
    cfg_d = json.loads(json.dumps(BASE))
    cfg_d["oracle"] = {"enabled": True, "l_max": 8, "times": [0.1]}
    cfg_d["sweep"] = {"particle_counts_list": [[1, 1], [2, 1]]}
    cfg = write_cfg(tmp_path, cfg_d)
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out),
                 "--workers", "2"]) == EXIT_OK
    (rundir,) = out.iterdir()
    assert (rundir / "N1-1" / "error_kernels.csv").exists()
    assert (rundir / "N2-1" / "error_kernels.csv").exists()


def test_appendix_a_tables(tmp_path):
    cfg_d = {
        "schema_version": 1,
        "lattice": {"dimension": 1, "cutoff": 3, "particle_counts": [3, 1]},
        "potential": {"kind": "gaussian",
                      "params": {"v0": -0.3, "sigma": 1.2}},
        "appendix_a": {"trials": 50, "seed": 7, "n_grid": [1, 3]},
    }
    cfg = write_cfg(tmp_path, cfg_d)
    out = tmp_path / "out"
    assert main(["appendix-a", "--config", cfg, "--out", str(out)]) == EXIT_OK
    (rundir,) = out.iterdir()
    with open(rundir / "ground_state_scan.csv") as fh:
        (row,) = list(csv.DictReader(fh))
    assert float(row["min_gap"]) >= -1e-9
    with open(rundir / "pairing_bounds.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["N"]) for r in rows] == [2, 6]


def test_config_hash_is_canonical(tmp_path):
    a = {"x": 1, "y": {"b": 2, "a": 3}}
    b = {"y": {"a": 3, "b": 2}, "x": 1}
    assert config_hash(a) == config_hash(b)


def test_load_config_missing_required_block(tmp_path):
    cfg = write_cfg(tmp_path, {"schema_version": 1,
                               "lattice": BASE["lattice"]})
    from hfbdyn.cli import ConfigError
    with pytest.raises(ConfigError):
        load_config(cfg, [])
