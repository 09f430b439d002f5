from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .closeness import fidelity_pure_range, max_sqrt_fidelity, min_trace_distance, property_range
from .config import (
    EstimationSettings,
    MarginalSettings,
    SolverOptions,
    estimation_settings,
    load_config,
    marginal_settings,
    solver_options,
)
from .errors import CertificateUnavailable, InfeasibleDataError, InfeasibleSpecError, QsdpError, SolverFailure
from .estimation import (
    EstimationOutcome,
    InfeasibilityCertificate,
    Verdict,
    anticommuting_certificate,
    expectations,
    extract_certificate,
    feasibility,
    feasibility_intervals,
    feasibility_problem,
    interval_problem,
    relax_l1,
    relax_linf,
    relaxation_problem,
    verify_certificate,
)
from .marginal import (
    bisect_eps_threshold,
    eps_threshold,
    interval_records,
    marginal_dual_bound,
    marginal_feasibility,
    marginal_feasibility_eps,
    marginal_mismatch,
    marginal_records,
    max_avg_fidelity_pure_marginals,
    pair_schmidt_bound,
    projector_bound,
)
from .operators import DensityOperator
from .problem_file import Problem, load_problem
from .report import (
    EXIT_ERROR,
    EXIT_INFEASIBLE,
    EXIT_NUMERICAL,
    EXIT_OK,
    build_report,
    certificate_entry,
    render_text,
    save_report_payload,
    state_entry,
)
from .sdp import check_feasible

logger = logging.getLogger("qsdp")

USAGE = """
Usage:
  python run.py run <problem.json> [--json] [--tol T] [--max-iter N] [--recheck] [--seed S]
  python run.py run --batch <dir> [flags]
  python run.py validate <problem.json>
"""

_VERDICT_EXIT = {Verdict.FEASIBLE: EXIT_OK, Verdict.INFEASIBLE: EXIT_INFEASIBLE, Verdict.MARGINAL: EXIT_NUMERICAL}
# batch exit code: worst member by this precedence
_EXIT_RANK = {EXIT_ERROR: 3, EXIT_NUMERICAL: 2, EXIT_INFEASIBLE: 1, EXIT_OK: 0}


def setup_logging(level: str = "INFO") -> None:
    """Colored console logs for the CLI.

    Lifecycle prefixes (START / DONE / WARN / FLAG) become highlighted labels and
    key fields (status=, verdict=, delta*=, beta=, 耗时=) are colored.  Plain text
    when colorama is missing or stderr is not a terminal.
    """
    try:
        from colorama import Fore, Style, init as colorama_init  # type: ignore
    except Exception:  # pragma: no cover
        class _DummyStyle:
            RESET_ALL = ""
            BRIGHT = ""

        class _DummyFore:
            BLACK = RED = GREEN = YELLOW = BLUE = MAGENTA = CYAN = WHITE = ""

        Fore = _DummyFore()  # type: ignore
        Style = _DummyStyle()  # type: ignore

        def colorama_init():  # type: ignore
            return None

    colorama_init()
    use_color = bool(getattr(sys.stderr, "isatty", lambda: False)())
    labels = {
        "START": ("开始", Fore.CYAN + Style.BRIGHT),
        "DONE": ("完成", Fore.GREEN + Style.BRIGHT),
        "WARN": ("警告", Fore.YELLOW + Style.BRIGHT),
        "FLAG": ("标记", Fore.MAGENTA + Style.BRIGHT),
    }
    keys = {
        "status=": Fore.CYAN,
        "verdict=": Fore.MAGENTA + Style.BRIGHT,
        "delta*=": Fore.YELLOW,
        "beta=": Fore.YELLOW,
        "gap=": Fore.WHITE,
        "耗时=": Fore.MAGENTA + Style.BRIGHT,
    }

    def _color_kv(message: str, key: str, color: str) -> str:
        """高亮形如 key=value,... 的片段。"""
        idx = message.find(key)
        if idx == -1:
            return message
        end = message.find(",", idx)
        if end == -1:
            end = len(message)
        return message[:idx] + color + message[idx:end] + Style.RESET_ALL + message[end:]

    class ColorFormatter(logging.Formatter):
        def format(self, record: logging.LogRecord) -> str:  # type: ignore[override]
            if not use_color:
                return super().format(record)
            raw = record.getMessage()
            m = raw
            tag = raw.split(" ", 1)[0]
            if tag in labels and " " in raw:
                label, color = labels[tag]
                m = f"{color}[{label}]{Style.RESET_ALL} {raw.split(' ', 1)[1]}"
            for key, color in keys.items():
                m = _color_kv(m, key, color)
            saved = record.msg, record.args
            record.msg, record.args = m, ()
            try:
                return super().format(record)
            finally:
                record.msg, record.args = saved

    fmt = ColorFormatter("%(asctime)s | qsdp | %(levelname)s | %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
    for h in logger.handlers:
        h.setFormatter(fmt)
    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    for noisy in ("matplotlib", "numexpr"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


@dataclass
class RunContext:
    cfg: dict = field(default_factory=dict)
    tol: float | None = None
    max_iter: int | None = None
    recheck: bool = False
    seed: int | None = None
    tzname: str = "UTC"

    def solver(self, task: str) -> SolverOptions:
        return solver_options(self.cfg, task, max_iter=self.max_iter)

    def estimation(self, task: str) -> EstimationSettings:
        return estimation_settings(self.cfg, task, threshold=self.tol)

    def marginal(self, task: str) -> MarginalSettings:
        return marginal_settings(self.cfg, task)

    def recheck_tol(self, task: str) -> float:
        if self.tol is not None:
            return max(self.tol, 1e-9)
        return max(10 * self.estimation(task).threshold, 1e-6)


@dataclass
class TaskResult:
    verdict: str | None = None
    values: dict = field(default_factory=dict)
    state: DensityOperator | None = None
    certificate: dict | None = None
    analytic_certificate: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    recheck: dict | None = None
    extra: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


# --- recheck helpers --------------------------------------------------------------------

def _recheck_state(problem, candidate: dict, tol: float) -> dict:
    rep = check_feasible(problem, candidate, tol)
    return {"passed": rep.feasible, **rep.as_dict()}


def _merge_recheck(*parts: dict | None) -> dict:
    parts = [p for p in parts if p is not None]
    return {"passed": all(p.get("passed", False) for p in parts), "checks": parts}


def _cert_recheck(cert: InfeasibilityCertificate, data) -> dict:
    check = verify_certificate(cert, data)
    return {"passed": check.valid, "beta": check.beta, "lambda_max_W": check.lambda_max}


def _analytic(data) -> dict | None:
    try:
        cert = anticommuting_certificate(data)
    except CertificateUnavailable:
        return None
    return certificate_entry(cert, verify_certificate(cert, data))


def _solution_diag(sol) -> dict:
    return sol.diagnostics() if sol is not None else {}


# --- task handlers ----------------------------------------------------------------------

def _estimation_result(out: EstimationOutcome, data, ctx: RunContext, task: str, check_problem, candidate) -> TaskResult:
    res = TaskResult(verdict=out.verdict.value, exit_code=_VERDICT_EXIT[out.verdict])
    res.values["delta_star"] = out.delta_star
    res.diagnostics = _solution_diag(out.solution)
    if out.state is not None:
        res.state = out.state
        res.values["expectations"] = expectations(out.state, data).tolist()
    if out.certificate is not None:
        res.certificate = certificate_entry(out.certificate, verify_certificate(out.certificate, data))
        res.analytic_certificate = _analytic(data)
    if out.notes:
        res.extra["notes"] = list(out.notes)
    if ctx.recheck:
        tol = ctx.recheck_tol(task)
        parts = []
        if out.state is not None:
            parts.append(_recheck_state(check_problem, candidate(out), tol))
        if out.certificate is not None:
            parts.append(_cert_recheck(out.certificate, data))
        res.recheck = _merge_recheck(*parts)
    return res


def _run_feasibility(problem: Problem, ctx: RunContext) -> TaskResult:
    data = problem.payload.to_records()
    task = problem.task
    opts, est = ctx.solver(task), ctx.estimation(task)
    if task == "feasibility":
        out = feasibility(data, opts, est)
        check = feasibility_problem(data)
    else:
        out = feasibility_intervals(data, opts, est)
        check = interval_problem(data)
    return _estimation_result(out, data, ctx, task, check, lambda o: {"rho": o.state})


def _l1_candidate(out: EstimationOutcome, data) -> dict:
    cand = {"rho": out.state}
    for k, (e, rec) in enumerate(zip(expectations(out.state, data), data)):
        cand[f"p{k}"] = np.array([[max(0.0, e - rec.value)]])
        cand[f"q{k}"] = np.array([[max(0.0, rec.value - e)]])
    return cand


def _run_relax(problem: Problem, ctx: RunContext) -> TaskResult:
    data = [rec.exact() for rec in problem.payload.to_records()]
    task = problem.task
    opts, est = ctx.solver(task), ctx.estimation(task)
    if task == "relax-linf":
        out = relax_linf(data, opts, est)
        # recheck at delta* plus tolerance: the state must violate no record by more than that
        return _estimation_result(out, data, ctx, task, relaxation_problem(data, "linf"),
                                  lambda o: {"rho": o.state, "delta": np.array([[o.delta_star]])})
    out = relax_l1(data, opts, est)
    return _estimation_result(out, data, ctx, task, relaxation_problem(data, "l1"), lambda o: _l1_candidate(o, data))


def _run_certificate(problem: Problem, ctx: RunContext) -> TaskResult:
    data = problem.payload.to_records()
    res = TaskResult()
    try:
        cert = extract_certificate(data, ctx.solver("certificate"), ctx.estimation("certificate"))
    except CertificateUnavailable as e:
        res.verdict = Verdict.FEASIBLE.value
        res.values["delta_star"] = e.delta_star
        res.extra["notes"] = [str(e)]
        return res
    check = verify_certificate(cert, data)
    res.verdict = Verdict.INFEASIBLE.value
    res.certificate = certificate_entry(cert, check)
    res.analytic_certificate = _analytic(data)
    res.exit_code = EXIT_INFEASIBLE
    if ctx.recheck:
        res.recheck = _merge_recheck(_cert_recheck(cert, data))
    return res


def _run_verify(problem: Problem, ctx: RunContext) -> TaskResult:
    data = problem.payload.to_records()
    cert = problem.payload.certificate.to_certificate()
    check = verify_certificate(cert, data)
    res = TaskResult(values={"beta": check.beta, "lambda_max_W": check.lambda_max, "valid": check.valid})
    res.certificate = certificate_entry(cert, check)
    if check.valid:
        res.verdict, res.exit_code = Verdict.INFEASIBLE.value, EXIT_INFEASIBLE
    else:
        res.verdict = "Unproven"
    if ctx.recheck:
        res.recheck = _merge_recheck(_cert_recheck(cert, data)) if check.valid else {"passed": True, "checks": []}
    return res


def _closeness_recheck(data, dim: int, states, ctx: RunContext, task: str) -> dict:
    check = interval_problem(data, dim=dim)
    return _merge_recheck(*(_recheck_state(check, {"rho": s}, ctx.recheck_tol(task)) for s in states))


def _run_closeness(problem: Problem, ctx: RunContext) -> TaskResult:
    pl = problem.payload
    data = pl.to_records()
    task = problem.task
    opts, est = ctx.solver(task), ctx.estimation(task)
    res = TaskResult(verdict=Verdict.FEASIBLE.value)
    if task == "property-range":
        rng = property_range(data, pl.observable, opts, est)
        res.values.update({"min": rng.min, "max": rng.max})
        res.state = rng.maximum.state
        res.extra["state_min"] = state_entry(rng.minimum.state)
        res.diagnostics = _solution_diag(rng.maximum.solution)
        states, dim = (rng.minimum.state, rng.maximum.state), pl.observable.dim
    else:
        target = pl.target_state()
        dim = target.dim
        if task == "trace-distance":
            r = min_trace_distance(data, target, opts, est)
            res.values["trace_distance"] = r.value
            states = (r.state,)
        elif task == "fidelity-pure":
            lo, hi = fidelity_pure_range(data, target, opts, est)
            res.values.update({"fidelity_min": lo.value, "fidelity_max": hi.value})
            res.extra["state_min"] = state_entry(lo.state)
            r, states = hi, (lo.state, hi.state)
        else:
            r = max_sqrt_fidelity(data, target, opts, est)
            res.values.update({"sqrt_fidelity": r.value, "fidelity": r.value**2})
            states = (r.state,)
        res.state = r.state
        res.diagnostics = _solution_diag(r.solution)
    if ctx.recheck:
        res.recheck = _closeness_recheck(data, dim, states, ctx, task)
    return res


def _pure_pair(spec) -> tuple[np.ndarray, np.ndarray] | None:
    """Top eigenvectors of pure XY and YZ targets, when exactly those two are given."""
    if set(spec.targets) != {"XY", "YZ"} or not all(t.is_pure() for t in spec.targets.values()):
        return None
    out = []
    for label in ("XY", "YZ"):
        _, v = np.linalg.eigh(spec.targets[label].matrix)
        out.append(v[:, -1])
    return out[0], out[1]


def _marginal_recheck(state, spec, certificate, data, tol: float, distance: str = "trace",
                      eps: float = 0.0) -> dict:
    parts = []
    if state is not None:
        mism = marginal_mismatch(state, spec, distance)
        worst = max(mism.values()) if mism else 0.0
        parts.append({"passed": worst <= eps + tol, "worst_mismatch": worst, "tol": tol})
    if certificate is not None:
        parts.append(_cert_recheck(certificate, data))
    return _merge_recheck(*parts)


def _run_marginal(problem: Problem, ctx: RunContext) -> TaskResult:
    pl = problem.payload
    spec = pl.to_spec()
    task = problem.task
    opts, ms, est = ctx.solver(task), ctx.marginal(task), ctx.estimation(task)
    res = TaskResult()
    notes: list[str] = []
    if task == "marginal":
        out = marginal_feasibility(spec, opts, ms, est)
        data = marginal_records(spec)
        distance, eps = "trace", 0.0
    else:
        out = marginal_feasibility_eps(spec, pl.eps, pl.distance, opts, ms, est)
        data = interval_records(spec, pl.eps, pl.distance) if pl.eps > 0 else marginal_records(spec)
        distance, eps = pl.distance, pl.eps
        res.values.update({"eps": pl.eps, "distance": pl.distance})
        # eps* is extra information; failing to find it must not change the verdict
        try:
            if pl.bisect or out.verdict is Verdict.INFEASIBLE:
                eps_star, _ = eps_threshold(spec, pl.distance, opts, ms)
                res.values["eps_star"] = eps_star
            if pl.bisect:
                res.values["eps_star_bisect"] = bisect_eps_threshold(spec, distance=pl.distance, opts=opts,
                                                                     settings=ms)
        except SolverFailure as e:
            logger.warning(f"WARN run {problem.name} | eps* unavailable: {e}")
            notes.append(f"eps* unavailable: {e}")
    # the estimation fallback only bounds each basis record, so pair distances get a looser floor
    tol = ctx.tol if ctx.tol is not None else max(ms.match_tol, 10 * ctx.recheck_tol(task))
    res.verdict = out.verdict.value
    res.exit_code = _VERDICT_EXIT[out.verdict]
    res.state = out.global_state
    res.diagnostics = _solution_diag(out.solution)
    if out.mismatch:
        res.values["mismatch"] = dict(out.mismatch)
    if out.certificate is not None:
        res.certificate = certificate_entry(out.certificate, verify_certificate(out.certificate, data))
    notes = list(out.notes) + notes
    if notes:
        res.extra["notes"] = notes
    pair = _pure_pair(spec)
    if pair is not None:
        res.values["dual_bound"] = marginal_dual_bound(*pair, spec.shape)
    if ctx.recheck:
        res.recheck = _marginal_recheck(out.global_state, spec, out.certificate, data, tol, distance, eps)
    return res


def _run_pure_marginal(problem: Problem, ctx: RunContext) -> TaskResult:
    pl = problem.payload
    psi_xy, psi_yz = pl.kets()
    shape = pl.dims
    res = TaskResult()
    mu = marginal_dual_bound(psi_xy, psi_yz, shape)
    res.values.update({
        "dual_bound": mu,
        "projector_bound": projector_bound(psi_xy, psi_yz, shape),
        "schmidt_bound": pair_schmidt_bound(psi_xy, psi_yz, shape),
    })
    if problem.task == "marginal-purefid":
        value, state = max_avg_fidelity_pure_marginals(psi_xy, psi_yz, shape, ctx.solver(problem.task))
        res.values.update({"average_fidelity": value, "dual_gap": mu - value})
        res.state = state
        if ctx.recheck:
            tr = float(np.trace(state.matrix).real)
            ok = abs(tr - 1) <= ctx.recheck_tol(problem.task) and float(state.eigvalsh()[0]) >= -1e-9
            res.recheck = {"passed": bool(ok and value <= mu + 1e-6), "checks": []}
    return res


HANDLERS = {
    "feasibility": _run_feasibility,
    "intervals": _run_feasibility,
    "relax-linf": _run_relax,
    "relax-l1": _run_relax,
    "certificate": _run_certificate,
    "verify-certificate": _run_verify,
    "trace-distance": _run_closeness,
    "fidelity-pure": _run_closeness,
    "fidelity-mixed": _run_closeness,
    "property-range": _run_closeness,
    "marginal": _run_marginal,
    "marginal-eps": _run_marginal,
    "marginal-purefid": _run_pure_marginal,
    "marginal-dual": _run_pure_marginal,
}


def run_problem(problem: Problem, ctx: RunContext) -> tuple[dict, int]:
    t0 = time.perf_counter()
    logger.info(f"START run {problem.name} | task={problem.task}")
    try:
        res = HANDLERS[problem.task](problem, ctx)
    except InfeasibleDataError as e:
        res = TaskResult(verdict=Verdict.INFEASIBLE.value, exit_code=EXIT_INFEASIBLE)
        res.extra["notes"] = [str(e)]
        if e.certificate is not None:
            data = problem.payload.to_records()
            res.certificate = certificate_entry(e.certificate, verify_certificate(e.certificate, data))
            res.analytic_certificate = _analytic(data)
            if ctx.recheck:
                res.recheck = _merge_recheck(_cert_recheck(e.certificate, data))
    except InfeasibleSpecError as e:
        res = TaskResult(verdict=Verdict.INFEASIBLE.value, exit_code=EXIT_INFEASIBLE, extra={"notes": [str(e)]})
    except SolverFailure as e:
        logger.warning(f"WARN run {problem.name} | solver failure: {e}")
        res = TaskResult(exit_code=EXIT_NUMERICAL, extra={"error": str(e)})
        if e.solution is not None:
            res.diagnostics = e.solution.diagnostics()
    if res.recheck is not None and not res.recheck.get("passed", False):
        logger.warning(f"FLAG run {problem.name} | recheck failed")
        res.exit_code = EXIT_ERROR
    elapsed = time.perf_counter() - t0
    extra = dict(res.extra)
    if ctx.seed is not None:
        extra["seed"] = ctx.seed
    report = build_report(
        task=problem.task,
        name=problem.name,
        verdict=res.verdict,
        values=res.values,
        state=state_entry(res.state) if res.state is not None else None,
        certificate=res.certificate,
        analytic_certificate=res.analytic_certificate,
        diagnostics=res.diagnostics,
        recheck=res.recheck,
        wall_time_s=elapsed,
        tzname=ctx.tzname,
        extra=extra,
    )
    logger.info(f"DONE run {problem.name} | verdict={res.verdict}, exit={res.exit_code}, 耗时={elapsed:.2f}s")
    return report, res.exit_code


def _error_report(path: Path, err: Exception, ctx: RunContext) -> dict:
    return build_report(task="?", name=path.stem, tzname=ctx.tzname, extra={"error": str(err), "file": str(path)})


def run_file(path: Path, ctx: RunContext) -> tuple[dict, int]:
    try:
        problem = load_problem(path)
    except QsdpError as e:
        logger.error(f"{path}: {e}")
        return _error_report(path, e, ctx), EXIT_ERROR
    try:
        return run_problem(problem, ctx)
    except QsdpError as e:
        logger.error(f"{path}: {e}")
        rep = _error_report(path, e, ctx)
        rep["task"] = problem.task
        return rep, EXIT_ERROR


def worst_exit(codes) -> int:
    codes = list(codes)
    return max(codes, key=lambda c: _EXIT_RANK.get(c, 3)) if codes else EXIT_OK


def run_batch(directory: Path, ctx: RunContext, concurrency: int = 4) -> tuple[list[dict], int]:
    files = sorted(p for p in directory.glob("*.json") if p.is_file())
    if not files:
        logger.warning(f"WARN batch | no *.json files in {directory}")
        return [], EXIT_ERROR
    logger.info(f"START batch | dir={directory}, files={len(files)}, workers={concurrency}")
    results: dict[Path, tuple[dict, int]] = {}
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as ex:
        futs = {ex.submit(run_file, p, ctx): p for p in files}
        for fut in as_completed(futs):
            results[futs[fut]] = fut.result()
    reports = [results[p][0] for p in files]
    code = worst_exit(results[p][1] for p in files)
    logger.info(f"DONE batch | files={len(files)}, exit={code}")
    return reports, code


def validate_file(path: Path) -> tuple[str, int]:
    try:
        problem = load_problem(path)
    except QsdpError as e:
        return f"{path}: {e}", EXIT_ERROR
    return f"{path}: ok ({problem.task})", EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsdp", description="Quantum state estimation and marginal SDPs.")
    ap.add_argument("--version", action="version", version=f"qsdp {__version__}")
    sub = ap.add_subparsers(dest="command")
    run = sub.add_parser("run", help="solve a problem file (or a directory with --batch)")
    run.add_argument("path", nargs="?", type=Path)
    run.add_argument("--batch", type=Path, default=None, metavar="DIR")
    run.add_argument("--json", action="store_true", help="print the report as JSON")
    run.add_argument("--tol", type=float, default=None, help="decision threshold and recheck tolerance")
    run.add_argument("--max-iter", type=int, default=None)
    run.add_argument("--recheck", action="store_true", help="re-verify witnesses and certificates arithmetically")
    run.add_argument("--seed", type=int, default=None, help="recorded in the report")
    run.add_argument("--config", type=Path, default=None)
    run.add_argument("--verbose", action="store_true")
    val = sub.add_parser("validate", help="schema check only, never solves")
    val.add_argument("path", type=Path)
    return ap


def _emit(reports: list[dict], as_json: bool, batch: bool) -> None:
    if as_json:
        payload = reports if batch else reports[0]
        print(json.dumps(payload, ensure_ascii=False, indent=2))
        return
    print("\n\n".join(render_text(r) for r in reports))


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(sys.argv[1:] if argv is None else argv)
    if args.command == "validate":
        msg, code = validate_file(args.path)
        print(msg, file=sys.stdout if code == EXIT_OK else sys.stderr)
        return code
    if args.command != "run" or (args.path is None and args.batch is None):
        print(USAGE)
        return EXIT_ERROR

    try:
        cfg = load_config(args.config)
    except (OSError, json.JSONDecodeError) as e:
        print(f"cannot load config: {e}", file=sys.stderr)
        return EXIT_ERROR
    setup_logging("DEBUG" if args.verbose else cfg.get("log_level", "INFO"))
    ctx = RunContext(cfg=cfg, tol=args.tol, max_iter=args.max_iter, recheck=args.recheck, seed=args.seed,
                     tzname=cfg.get("timezone", "UTC"))
    cli_cfg = cfg.get("cli", {}) or {}

    if args.batch is not None:
        reports, code = run_batch(args.batch, ctx, int(cli_cfg.get("concurrency", 4)))
    else:
        report, code = run_file(args.path, ctx)
        reports = [report]
    _emit(reports, args.json, args.batch is not None)

    if cli_cfg.get("save_report_json", False):
        data_dir = Path(cli_cfg["data_dir"]) if cli_cfg.get("data_dir") else None
        meta = {"argv": list(sys.argv[1:] if argv is None else argv), "exit_code": code, "version": __version__}
        save_report_payload(reports, meta=meta, data_dir=data_dir)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
