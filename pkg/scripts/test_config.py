import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import pytest

import qsdp.config as config
from qsdp.config import (
    EstimationSettings,
    MarginalSettings,
    SolverOptions,
    estimation_settings,
    load_config,
    marginal_settings,
    solver_options,
)

CFG = {
    "solver": {"gap_tol": 1e-7, "max_iter": 150},
    "estimation": {"threshold": 1e-5},
    "marginal": {"match_tol": 1e-6},
    "tasks": {
        "marginal-eps": {"solver": {"max_iter": 300}, "marginal": {"bisect_tol": 1e-3}},
    },
}


def test_defaults_without_config():
    assert solver_options() == SolverOptions()
    assert estimation_settings(None) == EstimationSettings()
    assert marginal_settings({}) == MarginalSettings()


def test_layered_overrides():
    opts = solver_options(CFG)
    assert opts.max_iter == 150
    assert opts.gap_tol == pytest.approx(1e-7)
    assert opts.feas_tol == SolverOptions().feas_tol

    # task section beats the global section
    assert solver_options(CFG, "marginal-eps").max_iter == 300
    assert solver_options(CFG, "feasibility").max_iter == 150
    assert marginal_settings(CFG, "marginal-eps").bisect_tol == pytest.approx(1e-3)
    assert marginal_settings(CFG, "marginal-eps").match_tol == pytest.approx(1e-6)

    # flags beat both; None means the flag was not given
    assert solver_options(CFG, "marginal-eps", max_iter=5).max_iter == 5
    assert solver_options(CFG, "marginal-eps", max_iter=None).max_iter == 300
    assert estimation_settings(CFG, threshold=1e-4).threshold == pytest.approx(1e-4)
    assert estimation_settings(CFG, threshold=None).threshold == pytest.approx(1e-5)


def test_load_config_tolerates_bom(tmp_path):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(CFG), encoding="utf-8-sig")
    assert load_config(p) == CFG


def test_missing_default_config_means_defaults(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "CONFIG_PATH", tmp_path / "config.json")
    assert load_config() == {}
    with pytest.raises(OSError):
        load_config(tmp_path / "elsewhere.json")


def test_example_config_parses():
    cfg = load_config(ROOT / "config.example.json")
    assert solver_options(cfg, "marginal-eps").max_iter == 300
    assert solver_options(cfg, "fidelity-mixed").gap_tol == pytest.approx(1e-7)
    assert cfg["cli"]["save_report_json"] is False
