import json
import subprocess
import sys

import numpy as np
import pytest

from xylab import experiments as xp


def ensemble_json(n=16, realizations=4, seed=11, eps=0.1):
    return {
        "n": n,
        "mu": {"kind": "constant", "value": eps},
        "gamma": {"kind": "constant", "value": 0.0},
        "nu": {"kind": "uniform", "lo": -1.0, "hi": 1.0},
        "base_seed": seed,
        "realizations": realizations,
    }


def test_time_grid():
    grid = xp.TimeGrid(T=1.0, dt=0.25)
    assert np.allclose(grid.times(), [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(xp.ConfigError):
        xp.TimeGrid(T=1.0, dt=0.0)
    with pytest.raises(xp.ConfigError):
        xp.TimeGrid(T=1.0, dt=2.0)


def test_aggregate():
    assert xp.aggregate([5.0]) == {"mean": 5.0, "stderr": 0.0, "count": 1}
    agg = xp.aggregate([1.0, 3.0])
    assert agg["mean"] == 2.0 and agg["stderr"] == pytest.approx(1.0) and agg["count"] == 2
    with pytest.raises(ValueError):
        xp.aggregate([])


def test_parse_config_errors():
    with pytest.raises(xp.ConfigError, match="experiment"):
        xp.parse_config({"ensemble": ensemble_json()})
    with pytest.raises(xp.ConfigError, match="ensemble"):
        xp.parse_config({"experiment": "eigencorrelator"})
    with pytest.raises(xp.ConfigError, match="ensemble"):
        xp.parse_config({"experiment": "eigencorrelator",
                         "ensemble": {"n": 4, "mu": {"kind": "zeta"}}})
    with pytest.raises(xp.ConfigError, match="time_grid.dt"):
        xp.parse_config({"experiment": "eigencorrelator", "ensemble": ensemble_json(),
                         "time_grid": {"T": 1.0}})
    with pytest.raises(xp.ConfigError, match="workers"):
        xp.parse_config({"experiment": "eigencorrelator", "ensemble": ensemble_json(),
                         "workers": 0})
    with pytest.raises(xp.ConfigError, match="time_grid"):
        cfg = xp.parse_config({"experiment": "transport_particle",
                               "ensemble": ensemble_json(),
                               "params": {"s1": [8], "s2": [1, 16]}})
        xp.run(cfg)


def test_eigencorrelator_run_and_determinism(tmp_path):
    out = tmp_path / "a"
    base = {
        "experiment": "eigencorrelator",
        "ensemble": ensemble_json(),
        "params": {"min_distance": 1, "max_distance": 10},
        "output_dir": str(out),
    }
    payload1 = xp.run(xp.parse_config(base))
    csv_first = (out / "eigencorrelator.csv").read_bytes()
    summary_first = (out / "summary.json").read_bytes()
    payload2 = xp.run(xp.parse_config(base))
    assert payload1["fit"]["eta"] > 0
    assert payload1 == payload2
    assert (out / "eigencorrelator.csv").read_bytes() == csv_first
    assert (out / "summary.json").read_bytes() == summary_first
    header = csv_first.decode().splitlines()[0]
    assert header == "distance,mean,stderr,count"


def test_workers_do_not_change_output(tmp_path):
    base = {
        "experiment": "eigencorrelator",
        "ensemble": ensemble_json(),
        "params": {"min_distance": 1, "max_distance": 10},
    }
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    xp.run(xp.parse_config({**base, "output_dir": str(serial), "workers": 1}))
    xp.run(xp.parse_config({**base, "output_dir": str(parallel), "workers": 3}))
    assert (serial / "eigencorrelator.csv").read_bytes() == (parallel / "eigencorrelator.csv").read_bytes()


def test_lr_bound_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "lr_bound",
        "ensemble": ensemble_json(n=12, realizations=3),
        "time_grid": {"T": 5.0, "dt": 0.5},
        "params": {"block": True, "min_distance": 1, "max_distance": 8},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["verdicts"]["dominated_by_eigencorrelator"]


def test_transport_particle_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "transport_particle",
        "ensemble": ensemble_json(n=24, realizations=3, eps=0.05),
        "time_grid": {"T": 5.0, "dt": 0.5},
        "params": {"s1": [12], "s2": list(range(1, 5)) + list(range(21, 25)),
                   "fit_min_distance": 2, "fit_max_distance": 10},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["baseline"] == pytest.approx(0.0, abs=1e-12)
    assert payload["pass"]
    lines = (tmp_path / "particle_transport.csv").read_text().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 12  # header + 11 grid points


def test_correlations_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "correlations",
        "ensemble": ensemble_json(n=24, realizations=4, eps=0.1),
        "time_grid": {"T": 8.0, "dt": 0.5},
        "params": {"min_distance": 2, "max_distance": 12, "state_seed": 5},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["verdicts"]["clustering_rate_positive"]
    assert payload["fit"]["eta"] > 0
    assert (tmp_path / "clustering.csv").exists()


def test_entanglement_static_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "entanglement_static",
        "ensemble": ensemble_json(n=20, realizations=4, eps=0.05),
        "params": {"ells": [5, 10], "strategy": "sampled", "samples": 40,
                   "fit_min_distance": 2, "fit_max_distance": 10},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["verdicts"]["flat_in_ell"]
    assert payload["verdicts"]["below_fitted_bound"]
    rows = (tmp_path / "entanglement_static.csv").read_text().splitlines()
    assert rows[0] == "ell,statistic,mean,stderr,count,strategy"
    assert len(rows) == 5  # header + 2 statistics x 2 ells


def test_entanglement_quench_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "entanglement_quench",
        "ensemble": ensemble_json(n=16, realizations=3, eps=0.05),
        "time_grid": {"T": 6.0, "dt": 0.5},
        "params": {"ells": [4, 8]},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert "flat_in_ell" in payload["verdicts"]
    assert (tmp_path / "entanglement_quench.csv").exists()


def test_transport_energy_isotropic_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "transport_energy",
        "ensemble": ensemble_json(n=24, realizations=3, eps=0.05),
        "time_grid": {"T": 5.0, "dt": 0.5},
        "params": {"s1": [12], "s2": list(range(1, 5)) + list(range(21, 25)),
                   "fit_min_distance": 2, "fit_max_distance": 10},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["pass"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert {"baseline", "sup", "bound", "pass"} <= set(summary)


def test_transport_energy_flatness_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "transport_energy",
        "ensemble": {
            "n": 16,
            "mu": {"kind": "constant", "value": 0.05},
            "gamma": {"kind": "uniform", "lo": -0.5, "hi": 0.5},
            "nu": {"kind": "uniform", "lo": 0.5, "hi": 1.5},
            "base_seed": 3,
            "realizations": 6,
        },
        "time_grid": {"T": 5.0, "dt": 0.5},
        "params": {"variant": "anisotropic_flatness", "sizes": [16, 24],
                   "s1": [1, 2, 3], "eta_profile": "ones"},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["verdicts"]["flat_in_n"]
    assert (tmp_path / "energy_fluctuation.csv").exists()


def test_fock_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "fock",
        "ensemble": ensemble_json(n=40, realizations=5, eps=0.05),
        "params": {"alpha": 1.25, "tau": 0.5, "pair_count": 30,
                   "fit_min_distance": 2, "fit_max_distance": 15},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    data = json.loads((tmp_path / "fock_report.json").read_text())
    assert set(data) == {"alpha", "tau", "eta", "matched_fraction",
                         "certified_fraction", "overlap_pass_fraction", "fallback_total"}
    assert payload["matched_fraction"] == 1.0


def test_oracle_check_run(tmp_path):
    cfg = xp.parse_config({
        "experiment": "oracle_check",
        "params": {"n": 6, "seed": 42, "realizations": 5},
        "output_dir": str(tmp_path),
    })
    payload = xp.run(cfg)
    assert payload["all_pass"]
    data = json.loads((tmp_path / "oracle_check.json").read_text())
    assert data["all_pass"]
    assert all(data["checks"].values())


def _run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "xylab.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def test_cli_run_and_rerun_byte_identical(tmp_path):
    config = {
        "experiment": "eigencorrelator",
        "ensemble": ensemble_json(n=12, realizations=2),
        "params": {"min_distance": 1, "max_distance": 8},
        "output_dir": str(tmp_path / "out"),
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    r1 = _run_cli(["run", str(cfg_path)], tmp_path)
    assert r1.returncode == 0, r1.stderr
    first = (tmp_path / "out" / "eigencorrelator.csv").read_bytes()
    r2 = _run_cli(["run", str(cfg_path)], tmp_path)
    assert r2.returncode == 0
    assert (tmp_path / "out" / "eigencorrelator.csv").read_bytes() == first
    assert "PASS" in r1.stdout


def test_cli_rejects_malformed_config(tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"experiment": "eigencorrelator",
                                    "ensemble": {"n": 4, "mu": {"kind": "what"}}}))
    r = _run_cli(["run", str(cfg_path)], tmp_path)
    assert r.returncode != 0
    assert "ensemble" in r.stderr
    cfg_path.write_text("{not json")
    r2 = _run_cli(["run", str(cfg_path)], tmp_path)
    assert r2.returncode != 0
    assert "JSON" in r2.stderr


def test_cli_oracle_check(tmp_path):
    r = _run_cli(["oracle-check", "--n", "4", "--seed", "1", "--realizations", "1"], tmp_path)
    assert r.returncode == 0, r.stderr
    assert r.stdout.count("PASS") >= 8


def test_cli_fit(tmp_path):
    d = np.arange(0, 12)
    csv = tmp_path / "profile.csv"
    lines = ["distance,mean,stderr,count"]
    lines += [f"{di},{float(3.0 * np.exp(-0.7 * di))!r},0.0,5" for di in d]
    csv.write_text("\n".join(lines) + "\n")
    r = _run_cli(["fit", str(csv), "--min-distance", "2"], tmp_path)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["C"] == pytest.approx(3.0, rel=1e-6)
    assert out["eta"] == pytest.approx(0.7, rel=1e-6)


def test_xylab_workers_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("XYLAB_WORKERS", "2")
    assert xp.effective_workers(1) == 2
    monkeypatch.delenv("XYLAB_WORKERS")
    assert xp.effective_workers(3) == 3
