"""State estimation from expectation values.

Given records (M_x, m_x[, Delta_x]) decide whether some density operator rho has
tr(M_x rho) = m_x (or lies within m_x +/- Delta_x), using the relaxation

    min delta  s.t.  -delta <= tr(M_x rho) - m_x <= delta,  rho >= 0,  tr rho = 1

which is feasible for any data.  Its dual multipliers give z (trace row) and
t = u - v (lower minus upper rows), and W = z I + sum_x t_x M_x <= 0 with
||t||_1 <= 1.  Whenever beta = z + t.m > 0 no state reproduces the data, and this
is checked with two eigenvalue computations and no solver.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .config import EstimationSettings, SolverOptions
from .errors import CertificateUnavailable, ShapeMismatchError, SolverFailure
from .operators import DensityOperator, HermitianOperator, as_matrix, nearest_density
from .sdp import SdpBuilder, SdpProblem, SdpSolution, Status, scaled_trace, solve

logger = logging.getLogger("qsdp")

CERT_EIG_TOL = 1e-9
CERT_NORM_TOL = 1e-9
_ONE = np.eye(1)


class Verdict(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    MARGINAL = "Marginal"


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    observable: HermitianOperator
    value: float
    half_width: float | None = None
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.observable, HermitianOperator):
            object.__setattr__(self, "observable", HermitianOperator(self.observable))
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"record {self.label or '?'}: value must be finite, got {self.value!r}")
        object.__setattr__(self, "value", v)
        if self.half_width is not None:
            hw = float(self.half_width)
            if not math.isfinite(hw) or hw < 0:
                raise ValueError(f"record {self.label or '?'}: half_width must be >= 0, got {self.half_width!r}")
            object.__setattr__(self, "half_width", hw)

    @property
    def dim(self) -> int:
        return self.observable.dim

    @property
    def width(self) -> float:
        return self.half_width or 0.0

    def exact(self) -> "MeasurementRecord":
        return replace(self, half_width=None) if self.half_width is not None else self


@dataclass(frozen=True)
class InfeasibilityCertificate:
    z: float
    t: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "t", tuple(float(v) for v in self.t))

    def witness(self, data: Sequence[MeasurementRecord]) -> np.ndarray:
        """W = z I + sum_x t_x M_x."""
        if len(self.t) != len(data):
            raise ShapeMismatchError(f"certificate has {len(self.t)} weights for {len(data)} records")
        d = dataset_dim(data)
        w = self.z * np.eye(d, dtype=np.complex128)
        for tx, rec in zip(self.t, data):
            w = w + tx * rec.observable.matrix
        return w

    def as_dict(self) -> dict:
        return {"z": self.z, "t": list(self.t)}


class CertificateCheck(NamedTuple):
    beta: float
    lambda_max: float
    valid: bool


@dataclass(frozen=True, eq=False)
class EstimationOutcome:
    verdict: Verdict
    state: DensityOperator | None = None
    delta_star: float | None = None
    certificate: InfeasibilityCertificate | None = None
    solution: SdpSolution | None = None
    check: CertificateCheck | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE


def dataset_dim(data: Sequence[MeasurementRecord], dim: int | None = None) -> int:
    """Common observable dimension; names the first two records that disagree."""
    if not data:
        if dim is None:
            raise ValueError("at least one measurement record is required")
        return int(dim)
    d0 = data[0].dim if dim is None else int(dim)
    for k, rec in enumerate(data):
        if rec.dim != d0:
            first = "dim argument" if dim is not None else _name(data, 0)
            raise ShapeMismatchError(
                f"inconsistent observable dimensions: {first} has dim {d0}, {_name(data, k)} has dim {rec.dim}"
            )
    return d0


def _name(data: Sequence[MeasurementRecord], k: int) -> str:
    return f"record {k}" + (f" ({data[k].label})" if data[k].label else "")


def expectations(state, data: Sequence[MeasurementRecord]) -> np.ndarray:
    return np.array([rec.observable.expectation(state) for rec in data])


# --- problem builders -------------------------------------------------------------------

def add_data_constraints(b: SdpBuilder, rho: str, data: Sequence[MeasurementRecord]) -> None:
    """Equalities for exact records, a pair of 1x1 inequalities for records with a width."""
    for k, rec in enumerate(data):
        m = rec.observable.matrix
        label = rec.label or f"record {k}"
        if rec.width == 0.0:
            b.equality({rho: m}, rec.value, label)
        else:
            b.lmi([[-(rec.value - rec.width)]], [scaled_trace(rho, m, _ONE)], f"{label} lower")
            b.lmi([[rec.value + rec.width]], [scaled_trace(rho, -m, _ONE)], f"{label} upper")


def state_builder(name: str, dim: int) -> tuple[SdpBuilder, str]:
    """Builder holding a density-operator block ``rho`` (trace row first, PSD LMI first)."""
    b = SdpBuilder(name)
    rho = b.block("rho", dim)
    b.equality({rho: np.eye(dim)}, 1.0, "trace")
    b.psd(rho, "rho >= 0")
    return b, rho


def feasibility_problem(data: Sequence[MeasurementRecord], dim: int | None = None) -> SdpProblem:
    """Find rho >= 0, tr rho = 1 reproducing the data (zero objective)."""
    d = dataset_dim(data, dim)
    b, rho = state_builder("feasibility", d)
    add_data_constraints(b, rho, [rec.exact() for rec in data])
    b.minimize({})
    return b.build()


def interval_problem(data: Sequence[MeasurementRecord], dim: int | None = None) -> SdpProblem:
    d = dataset_dim(data, dim)
    b, rho = state_builder("intervals", d)
    add_data_constraints(b, rho, data)
    b.minimize({})
    return b.build()


def relaxation_problem(data: Sequence[MeasurementRecord], norm: str = "linf", dim: int | None = None) -> SdpProblem:
    """Smallest violation of the data by a state, in the l-infinity or (halved) l1 sense.

    linf layout: equality 0 is the trace row; LMI 0 is rho >= 0, LMI 1 is delta >= 0,
    then per record the lower row (2 + 2x) and the upper row (3 + 2x).  Half-widths
    present on the records widen the rows.
    """
    d = dataset_dim(data, dim)
    if norm not in ("linf", "l1"):
        raise ValueError(f"norm must be 'linf' or 'l1', got {norm!r}")
    b, rho = state_builder(f"relax-{norm}", d)
    if norm == "linf":
        delta = b.block("delta", 1, real=True)
        b.nonneg(delta, "delta >= 0")
        for k, rec in enumerate(data):
            m, label = rec.observable.matrix, rec.label or f"record {k}"
            lo, hi = rec.value - rec.width, rec.value + rec.width
            b.lmi([[-lo]], [scaled_trace(delta, _ONE, _ONE), scaled_trace(rho, m, _ONE)], f"{label} lower")
            b.lmi([[hi]], [scaled_trace(delta, _ONE, _ONE), scaled_trace(rho, -m, _ONE)], f"{label} upper")
        b.minimize({delta: _ONE})
    else:
        objective = {}
        for k, rec in enumerate(data):
            label = rec.label or f"record {k}"
            p = b.block(f"p{k}", 1, real=True)
            q = b.block(f"q{k}", 1, real=True)
            b.nonneg(p, f"{label} p >= 0")
            b.nonneg(q, f"{label} q >= 0")
            b.equality({rho: rec.observable.matrix, p: -_ONE, q: _ONE}, rec.value, label)
            objective[p] = objective[q] = 0.5 * _ONE
        b.minimize(objective)
    return b.build()


# --- solving ------------------------------------------------------------------------------

def _require_solved(sol: SdpSolution, what: str) -> None:
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(f"{what}: solver returned {sol.status.value} ({sol.message})", sol)


def _solve_linf(data, opts: SolverOptions) -> tuple[SdpSolution, float]:
    sol = solve(relaxation_problem(data, "linf"), opts)
    _require_solved(sol, "relax-linf")
    return sol, max(0.0, float(sol.objective_value))


def harvest_certificate(sol: SdpSolution, data: Sequence[MeasurementRecord]) -> InfeasibilityCertificate:
    """Read (z, t) off the multipliers of a solved linf relaxation, then repair it.

    Repair shifts z by lambda_max(W) when W is not negative semidefinite and rescales
    (z, t) when ||t||_1 > 1; both keep beta sound.
    """
    if sol.equality_duals is None or sol.lmi_duals is None:
        raise CertificateUnavailable("solver returned no multipliers")
    z = float(sol.equality_duals[0])
    u = np.array([float(sol.lmi_duals[2 + 2 * k][0, 0].real) for k in range(len(data))])
    v = np.array([float(sol.lmi_duals[3 + 2 * k][0, 0].real) for k in range(len(data))])
    cert = InfeasibilityCertificate(z, tuple(u - v))
    return repair_certificate(cert, data)


def repair_certificate(cert: InfeasibilityCertificate, data: Sequence[MeasurementRecord]) -> InfeasibilityCertificate:
    z, t = cert.z, np.array(cert.t)
    lam = float(np.linalg.eigvalsh(cert.witness(data))[-1])
    if lam > 0:
        z -= lam
    n1 = float(np.abs(t).sum())
    if n1 > 1:
        z, t = z / n1, t / n1
    return InfeasibilityCertificate(z, tuple(t))


def verify_certificate(cert: InfeasibilityCertificate, data: Sequence[MeasurementRecord]) -> CertificateCheck:
    """beta = z + t.m - sum |t_x| Delta_x, lambda_max(W) and validity; arithmetic only."""
    t = np.array(cert.t)
    if t.size != len(data):
        raise ShapeMismatchError(f"certificate has {t.size} weights for {len(data)} records")
    m = np.array([rec.value for rec in data])
    widths = np.array([rec.width for rec in data])
    beta = cert.z + float(t @ m) - float(np.abs(t) @ widths)
    lam = float(np.linalg.eigvalsh(cert.witness(data))[-1])
    valid = beta > 0 and lam <= CERT_EIG_TOL and float(np.abs(t).sum()) <= 1 + CERT_NORM_TOL
    return CertificateCheck(float(beta), lam, bool(valid))


def anticommuting_certificate(data: Sequence[MeasurementRecord]) -> InfeasibilityCertificate:
    """t = m / ||m||_1, z = -||t||_2 for observables that square to I and pairwise anticommute.

    For such sets the spectrum of t.M is +/- ||t||_2, so W <= 0 exactly.
    """
    d = dataset_dim(data)
    eye = np.eye(d)
    mats = [rec.observable.matrix for rec in data]
    for k, a in enumerate(mats):
        if not np.allclose(a @ a, eye, atol=1e-10):
            raise CertificateUnavailable(f"{_name(data, k)} does not square to the identity")
        for j in range(k):
            if not np.allclose(a @ mats[j] + mats[j] @ a, 0, atol=1e-10):
                raise CertificateUnavailable(f"{_name(data, j)} and {_name(data, k)} do not anticommute")
    m = np.array([rec.value for rec in data])
    n1 = float(np.abs(m).sum())
    if n1 == 0:
        raise CertificateUnavailable("all values are zero")
    t = m / n1
    cert = InfeasibilityCertificate(-float(np.linalg.norm(t)), tuple(t))
    check = verify_certificate(cert, data)
    if not check.valid:
        raise CertificateUnavailable(f"analytic certificate does not separate the data (beta={check.beta:.3g})")
    return cert


def extract_certificate(
    data: Sequence[MeasurementRecord],
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> InfeasibilityCertificate:
    """Certificate harvested from the dual of the linf relaxation; half-widths are honored.

    This is the solver certificate, so on (0.9, 0.5) it gives t ~ (0.647, 0.353) and
    beta ~ 0.02177.  The closed-form t = m / ||m||_1 with beta = 0.021741 comes from
    anticommuting_certificate and is what reports carry as ``analytic_certificate``.
    """
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    sol, delta = _solve_linf(data, opts)
    if delta <= settings.threshold:
        raise CertificateUnavailable(f"data are consistent up to delta*={delta:.3g}", delta_star=delta)
    cert = harvest_certificate(sol, data)
    check = verify_certificate(cert, data)
    if not check.valid:
        raise CertificateUnavailable(
            f"harvested certificate failed verification (beta={check.beta:.3g}, lambda_max={check.lambda_max:.3g})",
            delta_star=delta,
        )
    return cert


def _analytic_fallback(data, settings: EstimationSettings):
    """Closed-form certificate and its check for anticommuting data, else (None, None)."""
    try:
        cert = anticommuting_certificate(data)
    except CertificateUnavailable:
        return None, None
    check = verify_certificate(cert, data)
    return (cert, check) if check.beta > settings.certificate_margin else (None, None)


def _decide(data, opts: SolverOptions, settings: EstimationSettings, task: str) -> EstimationOutcome:
    t0 = time.perf_counter()
    logger.info(f"START {task} | records={len(data)}, dim={dataset_dim(data)}")
    sol, delta = _solve_linf(data, opts)
    cert = harvest_certificate(sol, data)
    check = verify_certificate(cert, data)
    state = nearest_density(sol.value("rho"))
    if check.valid and check.beta > settings.certificate_margin:
        out = EstimationOutcome(Verdict.INFEASIBLE, state=None, delta_star=delta, certificate=cert,
                                solution=sol, check=check)
    elif delta <= settings.threshold:
        out = EstimationOutcome(Verdict.FEASIBLE, state=state, delta_star=delta, solution=sol)
    else:
        closed, closed_check = _analytic_fallback(data, settings)
        if closed is not None:
            cert, check = closed, closed_check
            out = EstimationOutcome(Verdict.INFEASIBLE, state=None, delta_star=delta, certificate=cert,
                                    solution=sol, check=check, notes=("closed-form certificate",))
        else:
            note = f"delta*={delta:.3g} above threshold but no certificate verified (beta={check.beta:.3g})"
            logger.warning(f"WARN {task} | {note}")
            out = EstimationOutcome(Verdict.MARGINAL, state=state, delta_star=delta, solution=sol, check=check,
                                    notes=(note,))
    beta = f", beta={check.beta:.6g}" if out.certificate else ""
    logger.info(
        f"DONE {task} | verdict={out.verdict.value}, delta*={delta:.3g}{beta}, 耗时={time.perf_counter() - t0:.3f}s"
    )
    return out


def feasibility(
    data: Sequence[MeasurementRecord],
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> EstimationOutcome:
    """Feasible with a witness state, or Infeasible with a verified certificate.

    Half-widths are ignored.  When the solver certificate fails to verify, anticommuting
    data fall back to the closed-form certificate; Marginal is left only for delta* above
    the threshold with neither certificate verifying.
    """
    return _decide([rec.exact() for rec in data], opts or SolverOptions(), settings or EstimationSettings(),
                   "feasibility")


def feasibility_intervals(
    data: Sequence[MeasurementRecord],
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> EstimationOutcome:
    for k, rec in enumerate(data):
        if rec.half_width is None:
            raise ValueError(f"{_name(data, k)} has no half_width")
    return _decide(list(data), opts or SolverOptions(), settings or EstimationSettings(), "intervals")


def _relax_outcome(sol, delta, data, opts, settings, task) -> EstimationOutcome:
    band = 10 * opts.gap_tol
    state = nearest_density(sol.value("rho"))
    if abs(delta - settings.threshold) <= band:
        return EstimationOutcome(Verdict.MARGINAL, state=state, delta_star=delta, solution=sol)
    if delta <= settings.threshold:
        return EstimationOutcome(Verdict.FEASIBLE, state=state, delta_star=delta, solution=sol)
    try:
        cert = extract_certificate(data, opts, settings) if task == "relax-l1" else harvest_certificate(sol, data)
    except CertificateUnavailable:
        cert = None
    check = verify_certificate(cert, data) if cert is not None else None
    if check is None or not check.valid:
        return EstimationOutcome(Verdict.MARGINAL, state=state, delta_star=delta, solution=sol, check=check,
                                 notes=("no verified certificate",))
    return EstimationOutcome(Verdict.INFEASIBLE, state=state, delta_star=delta, certificate=cert, solution=sol,
                             check=check)


def relax_linf(
    data: Sequence[MeasurementRecord],
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> EstimationOutcome:
    """delta* = min over states of max_x |tr(M_x rho) - m_x|; always carries the optimal state."""
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    data = [rec.exact() for rec in data]
    sol, delta = _solve_linf(data, opts)
    logger.info(f"DONE relax-linf | delta*={delta:.6g}, iter={sol.iterations}")
    return _relax_outcome(sol, delta, data, opts, settings, "relax-linf")


def relax_l1(
    data: Sequence[MeasurementRecord],
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> EstimationOutcome:
    """delta* = min over states of 1/2 sum_x |tr(M_x rho) - m_x|."""
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    data = [rec.exact() for rec in data]
    sol = solve(relaxation_problem(data, "l1"), opts)
    _require_solved(sol, "relax-l1")
    delta = max(0.0, float(sol.objective_value))
    logger.info(f"DONE relax-l1 | delta*={delta:.6g}, iter={sol.iterations}")
    return _relax_outcome(sol, delta, data, opts, settings, "relax-l1")


def records_from_state(state, observables: Sequence, labels: Sequence[str] | None = None,
                       half_width: float | None = None) -> list[MeasurementRecord]:
    """Exact records tr(M rho) for the given observables (test data, demo problems)."""
    rho = as_matrix(state)
    out = []
    for k, obs in enumerate(observables):
        op = obs if isinstance(obs, HermitianOperator) else HermitianOperator(obs)
        out.append(MeasurementRecord(op, op.expectation(rho), half_width, labels[k] if labels else ""))
    return out
