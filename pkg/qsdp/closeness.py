"""Distances and property ranges over the states compatible with measurement data.

Only best-case quantities are offered: the closest state in trace distance, the
best and worst fidelity to a pure target, the best square-root fidelity to a mixed
target and the range of an unmeasured expectation value.  Worst-case trace distance
or mixed-state fidelity would be maximisations of convex functions and have no
single-SDP form.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .config import EstimationSettings, SolverOptions
from .errors import InfeasibleDataError, ShapeMismatchError, SolverFailure, TargetNotPureError
from .estimation import (
    MeasurementRecord,
    Verdict,
    add_data_constraints,
    dataset_dim,
    feasibility,
    feasibility_intervals,
    state_builder,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    as_matrix,
    nearest_density,
    root_fidelity,
    trace_norm,
)
from .sdp import SdpBuilder, SdpProblem, SdpSolution, Status, congruence, solve

logger = logging.getLogger("qsdp")


class QuantityKind(str, Enum):
    TRACE_DISTANCE = "TraceDistance"
    FIDELITY_PURE = "FidelityPure"
    SQRT_FIDELITY_MIXED = "SqrtFidelityMixed"
    # sqrt F obtained from the linear problem max <psi|rho|psi>
    SQRT_FIDELITY_PURE = "SqrtFidelityPure"
    PROPERTY_MIN = "PropertyMin"
    PROPERTY_MAX = "PropertyMax"


@dataclass(frozen=True, eq=False)
class ClosenessResult:
    value: float
    state: DensityOperator
    kind: QuantityKind
    solution: SdpSolution | None = None


@dataclass(frozen=True, eq=False)
class PropertyRange:
    minimum: ClosenessResult
    maximum: ClosenessResult

    @property
    def min(self) -> float:
        return self.minimum.value

    @property
    def max(self) -> float:
        return self.maximum.value

    def __iter__(self) -> Iterator[float]:
        return iter((self.min, self.max))


def _as_density(x) -> DensityOperator:
    return x if isinstance(x, DensityOperator) else DensityOperator(HermitianOperator(x))


def _clip01(v: float) -> float:
    return float(min(1.0, max(0.0, v)))


def trace_distance(rho, sigma) -> float:
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"state shapes differ: {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


# --- reusable LMI pieces ----------------------------------------------------------------

def add_trace_norm_bound(b: SdpBuilder, rho_terms, sigma, prefix: str = "") -> str:
    """Block X with -X <= rho - sigma <= X, where rho = sum_k K_k Xb_k K_k^H.

    ``rho_terms`` is a list of (block, K).  Returns the name of X; tr X >= ||rho - sigma||_1
    with equality at the optimum of any problem minimising tr X.
    """
    s = as_matrix(sigma)
    d = s.shape[0]
    x = b.block(f"{prefix}X", d)
    eye = np.eye(d)
    plus = [congruence(x, eye, eye)] + [congruence(blk, k, k.conj().T) for blk, k in rho_terms]
    minus = [congruence(x, eye, eye)] + [congruence(blk, -k, k.conj().T) for blk, k in rho_terms]
    b.lmi(-s, plus, f"{prefix}X + (rho - sigma) >= 0")
    b.lmi(s, minus, f"{prefix}X - (rho - sigma) >= 0")
    return x


def add_fidelity_block(b: SdpBuilder, rho_terms, sigma, prefix: str = "") -> str:
    """[[rho, Y + iZ], [Y - iZ, sigma]] >= 0 with Y, Z Hermitian.

    max tr Y over this LMI is the square-root fidelity of rho and sigma.  Returns Y.
    """
    s = as_matrix(sigma)
    d = s.shape[0]
    y = b.block(f"{prefix}Y", d)
    z = b.block(f"{prefix}Z", d)
    top = np.vstack([np.eye(d), np.zeros((d, d))])
    right = np.hstack([np.zeros((d, d)), np.eye(d)])
    const = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    const[d:, d:] = s
    terms = [congruence(y, 2 * top, right), congruence(z, 2j * top, right)]
    for blk, k in rho_terms:
        pk = top @ k
        terms.append(congruence(blk, pk, pk.conj().T))
    b.lmi(const, terms, f"{prefix}fidelity block")
    return y


# --- data-constrained problems -----------------------------------------------------------

def _data_builder(name: str, data: Sequence[MeasurementRecord], dim: int) -> tuple[SdpBuilder, str]:
    b, rho = state_builder(name, dataset_dim(data, dim))
    add_data_constraints(b, rho, data)
    return b, rho


def _raise_infeasible(data, opts, settings, sol: SdpSolution, task: str):
    """Turn a PrimalInfeasible closeness solve into InfeasibleDataError carrying a certificate."""
    if any(rec.half_width is not None for rec in data):
        # exact records inside an interval dataset count as zero width
        data = [rec if rec.half_width is not None else replace(rec, half_width=0.0) for rec in data]
        outcome = feasibility_intervals(data, opts, settings)
    else:
        outcome = feasibility(data, opts, settings)
    if outcome.verdict is Verdict.INFEASIBLE:
        raise InfeasibleDataError(f"{task}: measurement data admit no quantum state",
                                  certificate=outcome.certificate, outcome=outcome)
    raise SolverFailure(f"{task}: solver reported infeasible data but estimation found {outcome.verdict.value}", sol)


def _solve_checked(p: SdpProblem, data, opts, settings, task: str) -> SdpSolution:
    sol = solve(p, opts)
    if sol.status is Status.PRIMAL_INFEASIBLE:
        _raise_infeasible(data, opts, settings, sol, task)
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(f"{task}: solver returned {sol.status.value} ({sol.message})", sol)
    return sol


def trace_distance_problem(data: Sequence[MeasurementRecord], target) -> SdpProblem:
    sigma = _as_density(target)
    b, rho = _data_builder("trace-distance", data, sigma.dim)
    x = add_trace_norm_bound(b, [(rho, np.eye(sigma.dim))], sigma.matrix)
    b.minimize({x: 0.5 * np.eye(sigma.dim)})
    return b.build()


def min_trace_distance(
    data: Sequence[MeasurementRecord],
    target,
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> ClosenessResult:
    """min over data-compatible rho of 1/2 ||rho - target||_1."""
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    sol = _solve_checked(trace_distance_problem(data, target), data, opts, settings, "trace-distance")
    state = nearest_density(sol.value("rho"))
    logger.info(f"DONE trace-distance | value={sol.objective_value:.8g}, iter={sol.iterations}")
    return ClosenessResult(_clip01(sol.objective_value), state, QuantityKind.TRACE_DISTANCE, sol)


def _require_pure(target, what: str = "target") -> DensityOperator:
    sigma = _as_density(target)
    if not sigma.is_pure():
        lam = sigma.eigvalsh()
        raise TargetNotPureError(f"{what} is not rank-1 (second eigenvalue {float(lam[-2]):.3g})")
    return sigma


def _linear_range(data, observable: np.ndarray, dim: int, opts, settings, task: str):
    out = []
    for sense in ("min", "max"):
        b, rho = _data_builder(f"{task}-{sense}", data, dim)
        (b.minimize if sense == "min" else b.maximize)({rho: observable})
        sol = _solve_checked(b.build(), data, opts, settings, task)
        out.append((float(sol.objective_value), nearest_density(sol.value("rho")), sol))
    return out


def fidelity_pure_range(
    data: Sequence[MeasurementRecord],
    target_pure,
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> tuple[ClosenessResult, ClosenessResult]:
    """(min, max) of F = <psi|rho|psi> over data-compatible rho; F itself, not its root."""
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    sigma = _require_pure(target_pure)
    (lo, s_lo, sol_lo), (hi, s_hi, sol_hi) = _linear_range(
        data, sigma.matrix, sigma.dim, opts, settings, "fidelity-pure"
    )
    logger.info(f"DONE fidelity-pure | min={lo:.8g}, max={hi:.8g}")
    return (
        ClosenessResult(_clip01(lo), s_lo, QuantityKind.FIDELITY_PURE, sol_lo),
        ClosenessResult(_clip01(hi), s_hi, QuantityKind.FIDELITY_PURE, sol_hi),
    )


def fidelity_problem(sigma, data: Sequence[MeasurementRecord] | None = None, rho=None) -> SdpProblem:
    """max tr Y over [[rho, Y + iZ], [Y - iZ, sigma]] >= 0.

    With ``rho`` given the state is a constant; otherwise it is a variable block
    constrained by ``data``.
    """
    s = as_matrix(sigma)
    d = s.shape[0]
    if rho is not None:
        r = as_matrix(rho)
        if r.shape != s.shape:
            raise ShapeMismatchError(f"state shapes differ: {r.shape} vs {s.shape}")
        b = SdpBuilder("sqrt-fidelity")
        y = b.block("Y", d)
        z = b.block("Z", d)
        top = np.vstack([np.eye(d), np.zeros((d, d))])
        right = np.hstack([np.zeros((d, d)), np.eye(d)])
        const = np.block([[r, np.zeros((d, d))], [np.zeros((d, d)), s]])
        b.lmi(const, [congruence(y, 2 * top, right), congruence(z, 2j * top, right)], "fidelity block")
    else:
        b, rho_blk = _data_builder("max-sqrt-fidelity", data or [], d)
        y = add_fidelity_block(b, [(rho_blk, np.eye(d))], s)
    b.maximize({y: np.eye(d)})
    return b.build()


def sqrt_fidelity_sdp(rho, sigma, opts: SolverOptions | None = None) -> float:
    sol = solve(fidelity_problem(sigma, rho=rho), opts or SolverOptions())
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(f"sqrt-fidelity: solver returned {sol.status.value}", sol)
    return _clip01(sol.objective_value)


def sqrt_fidelity(rho, sigma, method: str = "closed_form", opts: SolverOptions | None = None) -> float:
    """tr sqrt(sqrt(sigma) rho sqrt(sigma)); square it for F."""
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"state shapes differ: {a.shape} vs {b.shape}")
    if method == "closed_form":
        return _clip01(root_fidelity(a, b))
    if method == "sdp":
        return sqrt_fidelity_sdp(a, b, opts)
    raise ValueError(f"unknown method {method!r}")


def max_sqrt_fidelity(
    data: Sequence[MeasurementRecord],
    target,
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> ClosenessResult:
    """max over data-compatible rho of sqrt F(rho, target).

    Pure targets go through the linear problem max <psi|rho|psi>.
    """
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    sigma = _as_density(target)
    if sigma.is_pure():
        _, best = fidelity_pure_range(data, sigma, opts, settings)
        return ClosenessResult(float(np.sqrt(best.value)), best.state, QuantityKind.SQRT_FIDELITY_PURE,
                               best.solution)
    sol = _solve_checked(fidelity_problem(sigma.matrix, data=data), data, opts, settings, "max-sqrt-fidelity")
    state = nearest_density(sol.value("rho"))
    logger.info(f"DONE max-sqrt-fidelity | value={sol.objective_value:.8g}, iter={sol.iterations}")
    return ClosenessResult(_clip01(sol.objective_value), state, QuantityKind.SQRT_FIDELITY_MIXED, sol)


def property_range(
    data: Sequence[MeasurementRecord],
    observable,
    opts: SolverOptions | None = None,
    settings: EstimationSettings | None = None,
) -> PropertyRange:
    """Extreme values of tr(H rho) over data-compatible states; unpack as ``lo, hi``."""
    opts, settings = opts or SolverOptions(), settings or EstimationSettings()
    h = observable if isinstance(observable, HermitianOperator) else HermitianOperator(observable)
    (lo, s_lo, sol_lo), (hi, s_hi, sol_hi) = _linear_range(data, h.matrix, h.dim, opts, settings, "property-range")
    logger.info(f"DONE property-range | min={lo:.8g}, max={hi:.8g}")
    return PropertyRange(
        ClosenessResult(lo, s_lo, QuantityKind.PROPERTY_MIN, sol_lo),
        ClosenessResult(hi, s_hi, QuantityKind.PROPERTY_MAX, sol_hi),
    )
