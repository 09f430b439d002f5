from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

CONFIG_PATH = Path(__file__).resolve().parents[1] / "config.json"


def load_config(path: Path | str | None = None) -> dict:
    """Read the JSON config. A missing default ``config.json`` means "all defaults"."""
    if path is None:
        if not CONFIG_PATH.exists():
            return {}
        p = CONFIG_PATH
    else:
        p = Path(path)
    # Use utf-8-sig to tolerate BOM in JSON files written by various tools
    with p.open("r", encoding="utf-8-sig") as f:
        return json.load(f)


@dataclass(frozen=True, slots=True)
class SolverOptions:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-9
    max_iter: int = 200
    # an engine stop short of tolerance still counts as Optimal when the measured
    # gap and residuals are within stall_factor x tolerance
    stall_factor: float = 1e3
    show_progress: bool = False


@dataclass(frozen=True, slots=True)
class EstimationSettings:
    threshold: float = 1e-6
    certificate_margin: float = 1e-10


@dataclass(frozen=True, slots=True)
class MarginalSettings:
    match_tol: float = 1e-7
    bisect_tol: float = 1e-4


def _section(cfg: dict | None, name: str, task: str | None) -> dict:
    cfg = cfg or {}
    merged = dict(cfg.get(name) or {})
    if task:
        tcfg = (cfg.get("tasks") or {}).get(task) or {}
        merged.update(tcfg.get(name) or {})
    return merged


def _overlay(obj, overrides: dict):
    # None means "flag not given"
    given = {k: v for k, v in overrides.items() if v is not None}
    return replace(obj, **given) if given else obj


def solver_options(cfg: dict | None = None, task: str | None = None, **overrides) -> SolverOptions:
    """
    Resolve solver options.

    Priority:
    1. keyword overrides (CLI flags)
    2. tasks.<task>.solver
    3. solver
    4. SolverOptions defaults
    """
    sec = _section(cfg, "solver", task)
    d = SolverOptions()
    opts = SolverOptions(
        gap_tol=float(sec.get("gap_tol", d.gap_tol)),
        feas_tol=float(sec.get("feas_tol", d.feas_tol)),
        max_iter=int(sec.get("max_iter", d.max_iter)),
        stall_factor=float(sec.get("stall_factor", d.stall_factor)),
        show_progress=bool(sec.get("show_progress", d.show_progress)),
    )
    return _overlay(opts, overrides)


def estimation_settings(cfg: dict | None = None, task: str | None = None, **overrides) -> EstimationSettings:
    sec = _section(cfg, "estimation", task)
    d = EstimationSettings()
    settings = EstimationSettings(
        threshold=float(sec.get("threshold", d.threshold)),
        certificate_margin=float(sec.get("certificate_margin", d.certificate_margin)),
    )
    return _overlay(settings, overrides)


def marginal_settings(cfg: dict | None = None, task: str | None = None, **overrides) -> MarginalSettings:
    sec = _section(cfg, "marginal", task)
    d = MarginalSettings()
    settings = MarginalSettings(
        match_tol=float(sec.get("match_tol", d.match_tol)),
        bisect_tol=float(sec.get("bisect_tol", d.bisect_tol)),
    )
    return _overlay(settings, overrides)
