"""Result reports: JSON-ready dicts, a prose table, and optional run-record files."""
from __future__ import annotations

import json
import logging
from datetime import datetime
from pathlib import Path

import numpy as np
import pytz

from .estimation import CertificateCheck, InfeasibilityCertificate
from .operators import DensityOperator, matrix_to_literal, state_to_bloch

logger = logging.getLogger("qsdp")

_ROOT = Path(__file__).resolve().parents[1]
_DATA_DIR = _ROOT / "data"
REPORT_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3


def timestamp(tzname: str = "UTC") -> str:
    try:
        tz = pytz.timezone(tzname)
    except pytz.UnknownTimeZoneError:
        logger.warning(f"WARN unknown timezone {tzname!r}, using UTC")
        tz = pytz.utc
    return datetime.now(tz).isoformat(timespec="seconds")


def state_entry(state: DensityOperator, digits: int = 12) -> dict:
    entry = {
        "dim": state.dim,
        "matrix": matrix_to_literal(state.matrix, digits),
        "eigenvalues": [round(float(v), digits) for v in state.eigvalsh()],
    }
    if state.dim == 2:
        entry["bloch"] = [round(v, digits) for v in state_to_bloch(state).r]
    return entry


def certificate_entry(cert: InfeasibilityCertificate, check: CertificateCheck | None = None) -> dict:
    entry = cert.as_dict()
    if check is not None:
        entry.update({"beta": check.beta, "lambda_max_W": check.lambda_max, "valid": check.valid})
    return entry


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def build_report(
    task: str,
    name: str,
    verdict: str | None = None,
    values: dict | None = None,
    state: dict | None = None,
    certificate: dict | None = None,
    analytic_certificate: dict | None = None,
    diagnostics: dict | None = None,
    recheck: dict | None = None,
    wall_time_s: float | None = None,
    tzname: str = "UTC",
    extra: dict | None = None,
) -> dict:
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "task": task,
        "name": name,
        "verdict": verdict,
        "values": values or {},
        "state": state,
        "certificate": certificate,
        "analytic_certificate": analytic_certificate,
        "diagnostics": diagnostics or {},
        "recheck": recheck,
        "wall_time_s": None if wall_time_s is None else round(float(wall_time_s), 4),
        "timestamp": timestamp(tzname),
    }
    if extra:
        report.update(extra)
    return _jsonable(report)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list) and v and all(isinstance(x, (int, float)) for x in v):
        return "[" + ", ".join(_fmt(float(x)) for x in v) + "]"
    return str(v)


def render_text(report: dict) -> str:
    """Two-column prose table; matrices are summarised by their spectrum."""
    rows: list[tuple[str, str]] = [("task", report["task"]), ("name", report.get("name") or "")]
    if report.get("verdict"):
        rows.append(("verdict", report["verdict"]))
    for k, v in (report.get("values") or {}).items():
        rows.append((k, _fmt(v)))
    state = report.get("state")
    if state:
        rows.append(("state.eigenvalues", _fmt(state["eigenvalues"])))
        if "bloch" in state:
            rows.append(("state.bloch", _fmt(state["bloch"])))
    for key in ("certificate", "analytic_certificate"):
        cert = report.get(key)
        if cert:
            rows.append((f"{key}.z", _fmt(cert["z"])))
            rows.append((f"{key}.t", _fmt(cert["t"])))
            for k in ("beta", "lambda_max_W", "valid"):
                if k in cert:
                    rows.append((f"{key}.{k}", _fmt(cert[k])))
    for k, v in (report.get("diagnostics") or {}).items():
        if v is not None:
            rows.append((f"solver.{k}", _fmt(v)))
    if report.get("recheck") is not None:
        rows.append(("recheck", "passed" if report["recheck"].get("passed") else "FAILED"))
    if report.get("error"):
        rows.append(("error", report["error"]))
    if report.get("wall_time_s") is not None:
        rows.append(("wall_time_s", _fmt(report["wall_time_s"])))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _ensure_data_dir(data_dir: Path) -> None:
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
    except OSError:
        pass


def save_report_payload(entries: list[dict], path: Path | None = None, meta: dict | None = None,
                        data_dir: Path | None = None) -> Path | None:
    """Write ``{"meta": ..., "entries": [...]}`` to data/report-<ts>.json."""
    data_dir = data_dir or _DATA_DIR
    _ensure_data_dir(data_dir)
    if path is None:
        ts = datetime.now().strftime("%Y%m%d-%H%M%S")
        path = data_dir / f"report-{ts}.json"
    payload = {"meta": meta or {}, "entries": entries or []}
    try:
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")
        logger.info(f"DONE saved run record to {path}")
        return path
    except OSError as e:
        logger.warning(f"WARN could not save run record: {e}")
        return None
