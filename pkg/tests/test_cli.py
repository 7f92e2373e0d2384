# tests/test_cli.py

import json

import numpy as np
import pandas as pd
import pytest
from rich.console import Console

import tools.hedgehog_ode as hedgehog_ode
import tools.relax3d as relax3d
from experiments.relax_experiment import RelaxExperiment
from main import main
from tools.run_config import load_run_config

SMALL = ["--set", "t=100", "--set", "R=12", "--set", "N=400"]


def _run(tmp_path, *args):
    return main(list(args) + ["--out-dir", str(tmp_path)])


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_profile_writes_csv_and_bounds(tmp_path):
    assert _run(tmp_path, "profile", "--set", "t=100", "--set", "R=50", "--set", "N=2000") == 0
    frame = pd.read_csv(tmp_path / "profile.csv")
    assert list(frame.columns) == ["r", "h", "dh", "residual"]
    assert len(frame) == 2000
    report = _json(tmp_path / "bounds_report.json")
    assert report["all_passed"] is True
    assert report["config"]["t"] == 100.0
    assert _json(tmp_path / "run_config.json")["config"]["N"] == 2000


def test_outputs_are_byte_identical_on_rerun(tmp_path):
    assert _run(tmp_path, "profile", *SMALL) == 0
    first = {name: (tmp_path / name).read_bytes() for name in ("profile.csv", "bounds_report.json")}
    assert _run(tmp_path, "profile", *SMALL) == 0
    for name, content in first.items():
        assert (tmp_path / name).read_bytes() == content


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reduced block\nt = 100\nR = 12\nN = 300\n", encoding="utf-8")
    assert main(["profile", "--config", str(cfg), "--set", "N=250", "--out-dir", str(tmp_path / "out")]) == 0
    assert len(pd.read_csv(tmp_path / "out" / "profile.csv")) == 250


@pytest.mark.parametrize(
    "argv",
    [
        ["profile", "--set", "R=50"],
        ["profile", "--set", "t=100", "--set", "R=50", "--set", "bogus=1"],
        ["profile", "--set", "t=100", "--set", "R=50", "--set", "a2=1"],
        ["explode"],
        [],
    ],
)
def test_usage_errors_exit_1(tmp_path, argv):
    assert main(argv + (["--out-dir", str(tmp_path)] if argv and argv[0] == "profile" else [])) == 1


def test_solver_failure_exits_2(tmp_path, monkeypatch):
    monkeypatch.setattr(hedgehog_ode, "NEWTON_MAX_ITER", 1)
    assert _run(tmp_path, "profile", *SMALL) == 2


def test_verify_rejects_low_order(tmp_path):
    assert _run(tmp_path, "verify", *SMALL, "--set", "order=4") == 1
    assert not (tmp_path / "verify.json").exists()


def test_verify_writes_checks(tmp_path):
    code = _run(tmp_path, "verify", "--set", "t=100", "--set", "R=50", "--set", "n_seeds=5", "--set", "threads=2")
    data = _json(tmp_path / "verify.json")
    assert code == (0 if data["all_passed"] else 1)
    assert data["all_passed"] is True
    assert {"identity_name", "value", "tolerance", "pass"} <= set(data["checks"][0])


def test_verify_with_material_block_adds_scaling_checks(tmp_path):
    material = ["--set", "a2=4", "--set", "b2=1", "--set", "c2=1", "--set", "L=1", "--set", "R0=25"]
    assert _run(tmp_path, "verify", *material, "--set", "n_seeds=2") == 0
    checks = {c["identity_name"]: c["pass"] for c in _json(tmp_path / "verify.json")["checks"]}
    assert checks["dimensional_el_scaling"] is True
    assert checks["dimensional_bulk_scaling"] is True


def test_energy_harmonic_benchmark(tmp_path):
    code = _run(
        tmp_path, "energy", "--set", "t=100", "--set", "R=10", "--set", "harmonic=true",
        "--set", "grid_n=33", "--set", "radii=20",
    )
    assert code == 0
    data = _json(tmp_path / "energy.json")
    assert {"elastic", "bulk", "total", "err_est", "R", "t", "grid_n"} <= set(data)
    assert data["total"] / (12.0 * np.pi * 10.0) == pytest.approx(1.0, abs=1e-8)
    assert data["field"]["total"] / data["reference_12piR"] == pytest.approx(1.0, abs=0.1)
    scan = pd.read_csv(tmp_path / "monotonicity.csv")
    assert list(scan.columns) == ["r", "E_over_r"]
    assert len(scan) == 20


def test_energy_of_hedgehog(tmp_path):
    assert _run(tmp_path, "energy", *SMALL, "--set", "grid_n=25") == 0
    data = _json(tmp_path / "energy.json")
    assert data["harmonic"] is False
    assert data["total"] < data["reference_12piR"]
    assert data["field"]["err_est"] > 0.0


def test_relax_with_checkpoints_and_resume(tmp_path):
    args = (*SMALL, "--set", "grid_n=33", "--set", "max_steps=20", "--set", "checkpoint_every=10")
    assert _run(tmp_path / "a", "relax", *args) == 0
    result = _json(tmp_path / "a" / "relax.json")
    assert result["steps"] == 20
    assert (tmp_path / "a" / "checkpoints" / "step_0000010.csv").exists()
    assert (tmp_path / "a" / "field.csv").exists() and (tmp_path / "a" / "field.json").exists()
    assert len(pd.read_csv(tmp_path / "a" / "history.csv")) == 20

    checkpoint = tmp_path / "a" / "checkpoints" / "step_0000010.csv"
    assert _run(tmp_path / "b", "relax", *args, "--set", f"resume={checkpoint}") == 0
    resumed = _json(tmp_path / "b" / "relax.json")
    assert resumed["steps"] == 20
    assert result["norm_bounded"] is True and resumed["norm_bounded"] is True
    assert resumed["energy"]["total"] == pytest.approx(result["energy"]["total"], abs=1e-12)
    a = pd.read_csv(tmp_path / "a" / "field.csv", float_precision="round_trip")
    b = pd.read_csv(tmp_path / "b" / "field.csv", float_precision="round_trip")
    np.testing.assert_allclose(b.to_numpy(), a.to_numpy(), atol=1e-12, rtol=0.0)


def test_relax_summary_rows(tmp_path):
    cfg = load_run_config(overrides=["t=100", "R=12", "N=400", "grid_n=33", "max_steps=5"])
    console = Console(record=True, width=120)
    assert RelaxExperiment(cfg, tmp_path, console=console).execute() == 0
    text = console.export_text()
    assert "max beta, |x| < 5" in text
    assert "beta^2" not in text
    assert "|Q| within bound" in text


def test_relax_instability_exits_3(tmp_path, monkeypatch):
    monkeypatch.setattr(relax3d, "time_step", lambda cfg: 5.0 * cfg.dx**2)
    code = _run(tmp_path, "relax", *SMALL, "--set", "grid_n=33", "--set", "init=perturbed_hedgehog")
    assert code == 3


def test_compare_writes_summary(tmp_path):
    assert _run(tmp_path, "compare", *SMALL, "--set", "grid_n=33", "--set", "max_steps=10") == 0
    data = _json(tmp_path / "compare.json")
    assert {"E_H", "E_Hb", "E_relaxed", "delta", "err_est", "reference_12piR"} <= set(data)
    assert data["delta"] == pytest.approx(data["E_Hb"] - data["E_H"])
    assert data["err_est"] == pytest.approx(abs(data["delta"] - data["delta_coarse"]) / 3.0)
    assert data["E_relaxed"] <= data["E_Hb"]


@pytest.mark.slow
def test_compare_perturbation_lowers_energy(tmp_path):
    code = _run(tmp_path, "compare", "--set", "t=10000", "--set", "R=40", "--set", "grid_n=65")
    assert code == 0
    assert _json(tmp_path / "compare.json")["E_relaxed"] < _json(tmp_path / "compare.json")["E_H"]
