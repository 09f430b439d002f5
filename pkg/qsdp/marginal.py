"""Tripartite quantum marginal problems.

A spec fixes some of the two-party reductions rho_XY, rho_XZ, rho_YZ of an unknown
state sigma_XYZ.  Exact compatibility is the estimation problem whose records are a
Hermitian basis of each pair space lifted to the global space, so an incompatible
spec gets an ordinary InfeasibilityCertificate.  Marginals enter LMIs through the
Kraus operators of the partial trace.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .closeness import (
    ClosenessResult,
    PropertyRange,
    QuantityKind,
    add_fidelity_block,
    add_trace_norm_bound,
)
from .config import EstimationSettings, MarginalSettings, SolverOptions
from .errors import InfeasibleSpecError, ShapeMismatchError, SolverFailure, TargetNotPureError
from .estimation import (
    InfeasibilityCertificate,
    MeasurementRecord,
    Verdict,
    add_data_constraints,
    feasibility,
    feasibility_intervals,
    feasibility_problem,
    verify_certificate,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    SubsystemShape,
    as_matrix,
    eig_bounds,
    embed_kept,
    ket_to_density,
    nearest_density,
    partial_trace_kraus,
    ptrace_matrix,
    root_fidelity,
    schmidt_coefficients,
    trace_norm,
)
from .sdp import SdpBuilder, SdpSolution, Status, congruence, hermitian_basis, scaled_trace, solve

logger = logging.getLogger("qsdp")

PAIR_LABELS: dict[str, tuple[int, int]] = {"XY": (0, 1), "XZ": (0, 2), "YZ": (1, 2)}
QUBITS = SubsystemShape((2, 2, 2))
MAX_LOCAL_DIM = 4
DISTANCES = ("trace", "operator", "fidelity")
# largest radius any pair of states can need under each distance
EPS_CAP = {"trace": 2.0, "operator": 1.0, "fidelity": 1.0}
_ONE = np.eye(1)


def _as_density(x) -> DensityOperator:
    if isinstance(x, DensityOperator):
        return x
    a = np.asarray(as_matrix(x))
    if a.ndim == 1:
        return DensityOperator(HermitianOperator(ket_to_density(a)))
    return DensityOperator(HermitianOperator(a))


@dataclass(frozen=True, eq=False)
class MarginalSpec:
    shape: SubsystemShape = QUBITS
    targets: Mapping[str, DensityOperator] = field(default_factory=dict)

    def __post_init__(self):
        shape = self.shape if isinstance(self.shape, SubsystemShape) else SubsystemShape(tuple(self.shape))
        if len(shape.dims) != 3:
            raise ShapeMismatchError(f"marginal problems need three subsystems, got dims {shape.dims}")
        if max(shape.dims) > MAX_LOCAL_DIM:
            raise ShapeMismatchError(f"local dims above {MAX_LOCAL_DIM} are not supported: {shape.dims}")
        targets = {}
        for label, rho in self.targets.items():
            if label not in PAIR_LABELS:
                raise ShapeMismatchError(f"unknown pair label {label!r}; expected one of {sorted(PAIR_LABELS)}")
            rho = _as_density(rho)
            want = shape.kept_dim(PAIR_LABELS[label])
            if rho.dim != want:
                raise ShapeMismatchError(f"target {label} has dim {rho.dim}, subsystem dims give {want}")
            targets[label] = rho
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "targets", {k: targets[k] for k in PAIR_LABELS if k in targets})

    @property
    def dim(self) -> int:
        return self.shape.total

    def only(self, *labels: str) -> "MarginalSpec":
        return MarginalSpec(self.shape, {k: v for k, v in self.targets.items() if k in labels})

    @classmethod
    def from_state(cls, state, shape: SubsystemShape = QUBITS, labels: Sequence[str] = tuple(PAIR_LABELS)):
        """Spec whose targets are the reductions of a global state."""
        m = as_matrix(state)
        return cls(shape, {lb: DensityOperator(HermitianOperator(ptrace_matrix(m, shape.dims, PAIR_LABELS[lb])))
                           for lb in labels})


@dataclass(frozen=True, eq=False)
class MarginalOutcome:
    verdict: Verdict
    global_state: DensityOperator | None = None
    dual_bound: float | None = None
    eps: float | None = None
    certificate: InfeasibilityCertificate | None = None
    solution: SdpSolution | None = None
    distance: str = "trace"
    mismatch: Mapping[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE


def pair_kraus(spec: MarginalSpec, label: str) -> list[np.ndarray]:
    return partial_trace_kraus(spec.shape.dims, PAIR_LABELS[label])


def marginal_records(spec: MarginalSpec) -> list[MeasurementRecord]:
    """One record per Hermitian basis element of each specified pair space."""
    out = []
    for label, rho in spec.targets.items():
        keep = PAIR_LABELS[label]
        for k, h in enumerate(hermitian_basis(rho.dim)):
            obs = HermitianOperator(embed_kept(h, spec.shape.dims, keep))
            value = float(np.einsum("ij,ji->", h, rho.matrix).real)
            out.append(MeasurementRecord(obs, value, None, f"{label}[{k}]"))
    return out


def marginal_mismatch(state, spec: MarginalSpec, distance: str = "trace") -> dict[str, float]:
    """Per pair: ||sigma_pair - rho_pair||_1, the operator norm, or 1 - sqrt F."""
    m = as_matrix(state)
    out = {}
    for label, rho in spec.targets.items():
        red = ptrace_matrix(m, spec.shape.dims, PAIR_LABELS[label])
        if distance == "trace":
            out[label] = trace_norm(red - rho.matrix)
        elif distance == "operator":
            out[label] = float(np.abs(np.linalg.eigvalsh(red - rho.matrix)).max())
        else:
            out[label] = 1.0 - root_fidelity(red, rho.matrix)
    return out


def _global_builder(name: str, spec: MarginalSpec, exact: bool = True) -> tuple[SdpBuilder, str]:
    b = SdpBuilder(name)
    sig = b.block("sigma", spec.dim)
    b.equality({sig: np.eye(spec.dim)}, 1.0, "trace")
    b.psd(sig, "sigma >= 0")
    if exact:
        add_data_constraints(b, sig, marginal_records(spec))
    return b, sig


def _check_distance(distance: str) -> None:
    if distance not in DISTANCES:
        raise ValueError(f"distance must be one of {DISTANCES}, got {distance!r}")


def marginal_feasibility(
    spec: MarginalSpec,
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
    estimation: EstimationSettings | None = None,
) -> MarginalOutcome:
    """Is there a sigma_XYZ whose reductions equal every target?

    The exact SDP is tried first; when it fails or its witness misses the targets by
    more than ``match_tol`` the estimation pipeline decides and supplies the certificate.
    """
    if not spec.targets:
        raise ValueError("marginal_feasibility needs at least one target")
    opts, settings = opts or SolverOptions(), settings or MarginalSettings()
    t0 = time.perf_counter()
    records = marginal_records(spec)
    logger.info(f"START marginal | pairs={','.join(spec.targets)}, dims={spec.shape.dims}")
    sol = solve(feasibility_problem(records, dim=spec.dim), opts)
    if sol.status is Status.OPTIMAL:
        state = nearest_density(sol.value("rho"))
        mism = marginal_mismatch(state, spec)
        if max(mism.values()) <= settings.match_tol:
            logger.info(f"DONE marginal | verdict=Feasible, 耗时={time.perf_counter() - t0:.3f}s")
            return MarginalOutcome(Verdict.FEASIBLE, state, solution=sol, mismatch=mism)

    est = feasibility(records, opts, estimation)
    if est.verdict is Verdict.INFEASIBLE:
        out = MarginalOutcome(Verdict.INFEASIBLE, certificate=est.certificate, solution=est.solution)
    else:
        mism = marginal_mismatch(est.state, spec)
        note = f"exact solve {sol.status.value}; estimation delta*={est.delta_star:.3g}"
        out = MarginalOutcome(est.verdict, est.state, solution=est.solution, mismatch=mism, notes=(note,))
    logger.info(f"DONE marginal | verdict={out.verdict.value}, 耗时={time.perf_counter() - t0:.3f}s")
    return out


def _add_ball(b: SdpBuilder, sig: str, spec: MarginalSpec, label: str, distance: str, radius) -> None:
    """Constrain pair ``label`` to a ball of the given radius around its target.

    ``radius`` is a number or the name of a real 1x1 block.
    """
    rho = spec.targets[label]
    d = rho.dim
    eye = np.eye(d)
    kraus = pair_kraus(spec, label)
    fixed = not isinstance(radius, str)

    def r_terms(matrix):
        return [] if fixed else [scaled_trace(radius, _ONE, matrix)]

    def r_const(matrix):
        return float(radius) * matrix if fixed else 0 * matrix

    if distance == "trace":
        # sigma_pair - rho_pair = omega - zeta with omega, zeta >= 0 and tr(omega + zeta) <= r
        omega = b.block(f"omega_{label}", d)
        zeta = b.block(f"zeta_{label}", d)
        b.psd(omega)
        b.psd(zeta)
        for k, h in enumerate(hermitian_basis(d)):
            coeffs = {sig: embed_kept(h, spec.shape.dims, PAIR_LABELS[label]), omega: -h, zeta: h}
            b.equality(coeffs, float(np.einsum("ij,ji->", h, rho.matrix).real), f"{label} ball[{k}]")
        b.lmi(r_const(_ONE), r_terms(_ONE) + [scaled_trace(omega, -eye, _ONE), scaled_trace(zeta, -eye, _ONE)],
              f"{label} tr(omega + zeta) <= r")
    elif distance == "operator":
        plus = [congruence(sig, k, k.conj().T) for k in kraus]
        minus = [congruence(sig, -k, k.conj().T) for k in kraus]
        b.lmi(r_const(eye) - rho.matrix, r_terms(eye) + plus, f"{label} rI + (sigma - rho) >= 0")
        b.lmi(r_const(eye) + rho.matrix, r_terms(eye) + minus, f"{label} rI - (sigma - rho) >= 0")
    else:
        y = add_fidelity_block(b, [(sig, k) for k in kraus], rho.matrix, prefix=f"{label}_")
        # tr Y >= 1 - r
        b.lmi(r_const(_ONE) - _ONE, r_terms(_ONE) + [scaled_trace(y, eye, _ONE)], f"{label} sqrtF >= 1 - r")


def eps_problem(spec: MarginalSpec, eps: float | None, distance: str = "trace"):
    """Relaxed compatibility; ``eps=None`` makes the radius a variable to minimise."""
    _check_distance(distance)
    b, sig = _global_builder(f"marginal-eps-{distance}", spec, exact=False)
    radius = b.block("r", 1, real=True) if eps is None else float(eps)
    for label in spec.targets:
        _add_ball(b, sig, spec, label, distance, radius)
    if eps is None:
        b.nonneg(radius, "r >= 0")
        b.lmi(EPS_CAP[distance] * _ONE, [scaled_trace(radius, -_ONE, _ONE)], "r <= cap")
        b.minimize({radius: _ONE})
    else:
        b.minimize({})
    return b.build()


def _ball_tol(distance: str, match_tol: float) -> float:
    return match_tol if distance == "trace" else 10 * match_tol


def marginal_feasibility_eps(
    spec: MarginalSpec,
    eps: float,
    distance: str = "trace",
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
    estimation: EstimationSettings | None = None,
) -> MarginalOutcome:
    """Is there a global state whose reductions are each within ``eps`` of their targets?

    ``eps = 0`` is the exact problem.  Infeasible outcomes carry a certificate when the
    interval relaxation (half-width eps * ||H||_inf per basis record) is already
    infeasible, which holds for the trace and operator balls.
    """
    if not spec.targets:
        raise ValueError("marginal_feasibility_eps needs at least one target")
    eps = float(eps)
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    _check_distance(distance)
    if eps == 0:
        out = marginal_feasibility(spec, opts, settings, estimation)
        return MarginalOutcome(out.verdict, out.global_state, eps=0.0, certificate=out.certificate,
                               solution=out.solution, distance=distance, mismatch=out.mismatch, notes=out.notes)
    opts, settings = opts or SolverOptions(), settings or MarginalSettings()
    sol = solve(eps_problem(spec, eps, distance), opts)
    if sol.status is Status.OPTIMAL:
        state = nearest_density(sol.value("sigma"))
        mism = marginal_mismatch(state, spec, distance)
        tol = _ball_tol(distance, settings.match_tol)
        verdict = Verdict.FEASIBLE if max(mism.values()) <= eps + tol else Verdict.MARGINAL
        logger.info(f"DONE marginal-eps | eps={eps:g}, distance={distance}, verdict={verdict.value}")
        return MarginalOutcome(verdict, state, eps=eps, solution=sol, distance=distance, mismatch=mism)
    if sol.status is not Status.PRIMAL_INFEASIBLE:
        raise SolverFailure(f"marginal-eps: solver returned {sol.status.value} ({sol.message})", sol)

    cert, notes = None, ()
    if distance in ("trace", "operator"):
        data = interval_records(spec, eps, distance)
        est = feasibility_intervals(data, opts, estimation)
        if est.verdict is Verdict.INFEASIBLE and verify_certificate(est.certificate, data).valid:
            cert = est.certificate
    if cert is None:
        notes = ("no interval certificate; infeasibility rests on the solver and eps_threshold",)
    logger.info(f"DONE marginal-eps | eps={eps:g}, distance={distance}, verdict=Infeasible")
    return MarginalOutcome(Verdict.INFEASIBLE, eps=eps, certificate=cert, solution=sol, distance=distance,
                           notes=notes)


def interval_records(spec: MarginalSpec, eps: float, distance: str = "trace") -> list[MeasurementRecord]:
    """Basis records widened by eps times the dual norm of each basis element.

    |tr(H (sigma_pair - rho_pair))| is at most ||H||_inf eps on the trace ball and
    ||H||_1 eps on the operator-norm ball.
    """
    basis = [h for rho in spec.targets.values() for h in hermitian_basis(rho.dim)]
    out = []
    for rec, h in zip(marginal_records(spec), basis):
        lam = np.abs(np.linalg.eigvalsh(h))
        dual = float(lam.max() if distance == "trace" else lam.sum())
        out.append(MeasurementRecord(rec.observable, rec.value, eps * dual, rec.label))
    return out


def eps_threshold(
    spec: MarginalSpec,
    distance: str = "trace",
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
) -> tuple[float, DensityOperator]:
    """Smallest eps for which the relaxed problem is feasible, and a state attaining it.

    When the direct solve does not reach Optimal the value comes from
    bisect_eps_threshold, and the state from the relaxed problem at that eps.
    """
    if not spec.targets:
        return 0.0, DensityOperator(HermitianOperator(np.eye(spec.dim) / spec.dim))
    opts = opts or SolverOptions()
    sol = solve(eps_problem(spec, None, distance), opts)
    if sol.status is Status.OPTIMAL:
        value = max(0.0, float(sol.objective_value))
        logger.info(f"DONE eps-threshold | distance={distance}, eps*={value:.8g}")
        return value, nearest_density(sol.value("sigma"))
    logger.warning(f"WARN eps-threshold | distance={distance}, direct solve {sol.status.value}, 改用二分")
    value = bisect_eps_threshold(spec, distance=distance, opts=opts, settings=settings)
    out = marginal_feasibility_eps(spec, value, distance, opts, settings)
    if out.global_state is None:
        raise SolverFailure(f"eps-threshold: no state at the bisected eps={value:.6g}", sol)
    return value, out.global_state


def bisect_eps_threshold(
    spec: MarginalSpec,
    lo: float = 0.0,
    hi: float | None = None,
    tol: float | None = None,
    distance: str = "trace",
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
) -> float:
    """Bisection over eps with marginal_feasibility_eps as the oracle.

    Returns the upper end of the final bracket.  Solver failures count as infeasible.
    """
    settings = settings or MarginalSettings()
    tol = settings.bisect_tol if tol is None else float(tol)
    hi = EPS_CAP[distance] if hi is None else float(hi)

    def ok(eps: float) -> bool:
        try:
            return marginal_feasibility_eps(spec, eps, distance, opts, settings).feasible
        except SolverFailure:
            return False

    if not ok(hi):
        raise SolverFailure(f"bisect-eps: eps={hi} is not feasible; widen the bracket")
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
        steps += 1
        logger.debug(f"bisect-eps | step={steps}, bracket=[{lo:.6g}, {hi:.6g}]")
    logger.info(f"DONE bisect-eps | distance={distance}, eps*~{hi:.6g}, steps={steps}")
    return hi


# --- pure two-pair marginals ---------------------------------------------------------------

def _pure_projector(psi, what: str, dim: int) -> np.ndarray:
    a = np.asarray(as_matrix(psi))
    if a.ndim == 1:
        p = ket_to_density(a)
    else:
        rho = _as_density(a)
        if not rho.is_pure():
            raise TargetNotPureError(f"{what} is not rank-1")
        w, v = np.linalg.eigh(rho.matrix)
        p = np.outer(v[:, -1], v[:, -1].conj())
    if p.shape != (dim, dim):
        raise ShapeMismatchError(f"{what} has dim {p.shape[0]}, expected {dim}")
    return p


def average_fidelity_operator(psi_xy, psi_yz, shape: SubsystemShape = QUBITS) -> np.ndarray:
    """1/2 (|psi_XY><psi_XY| (x) I_Z + I_X (x) |psi_YZ><psi_YZ|)."""
    shape = shape if isinstance(shape, SubsystemShape) else SubsystemShape(tuple(shape))
    dx, dy, dz = shape.dims
    p1 = _pure_projector(psi_xy, "psi_XY", dx * dy)
    p2 = _pure_projector(psi_yz, "psi_YZ", dy * dz)
    return 0.5 * (np.kron(p1, np.eye(dz)) + np.kron(np.eye(dx), p2))


def max_avg_fidelity_pure_marginals(
    psi_xy, psi_yz, shape: SubsystemShape = QUBITS, opts: SolverOptions | None = None
) -> tuple[float, DensityOperator]:
    """max over sigma_XYZ of the average of <psi_XY|sigma_XY|psi_XY> and <psi_YZ|sigma_YZ|psi_YZ>."""
    h = average_fidelity_operator(psi_xy, psi_yz, shape)
    b = SdpBuilder("marginal-purefid")
    sig = b.block("sigma", h.shape[0])
    b.equality({sig: np.eye(h.shape[0])}, 1.0, "trace")
    b.psd(sig)
    b.maximize({sig: h})
    sol = solve(b.build(), opts or SolverOptions())
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(f"marginal-purefid: solver returned {sol.status.value}", sol)
    value = float(sol.objective_value)
    logger.info(f"DONE marginal-purefid | value={value:.8g}, gap={sol.gap:.2e}")
    return value, nearest_density(sol.value("sigma"))


def marginal_dual_bound(psi_xy, psi_yz, shape: SubsystemShape = QUBITS) -> float:
    """mu* = lambda_max of the average-fidelity operator; closed form, no solver."""
    return eig_bounds(average_fidelity_operator(psi_xy, psi_yz, shape))[1]


def projector_bound(psi_xy, psi_yz, shape: SubsystemShape = QUBITS) -> float:
    """1/2 (1 + sqrt ||P2 P1 P2||_inf) for the two lifted projectors."""
    shape = shape if isinstance(shape, SubsystemShape) else SubsystemShape(tuple(shape))
    dx, dy, dz = shape.dims
    p1 = np.kron(_pure_projector(psi_xy, "psi_XY", dx * dy), np.eye(dz))
    p2 = np.kron(np.eye(dx), _pure_projector(psi_yz, "psi_YZ", dy * dz))
    top = max(0.0, eig_bounds(p2 @ p1 @ p2)[1])
    return 0.5 * (1.0 + float(np.sqrt(top)))


def schmidt_bound(p: Sequence[float], q: Sequence[float]) -> float:
    """1/2 (1 + max_i sqrt(p_i q_i)) with both coefficient lists sorted descending."""
    p = np.sort(np.asarray(p, dtype=float))[::-1]
    q = np.sort(np.asarray(q, dtype=float))[::-1]
    n = min(p.size, q.size)
    return 0.5 * (1.0 + float(np.sqrt(np.clip(p[:n] * q[:n], 0, None)).max(initial=0.0)))


def pair_schmidt_bound(psi_xy, psi_yz, shape: SubsystemShape = QUBITS) -> float:
    shape = shape if isinstance(shape, SubsystemShape) else SubsystemShape(tuple(shape))
    dx, dy, dz = shape.dims
    return schmidt_bound(schmidt_coefficients(psi_xy, (dx, dy)), schmidt_coefficients(psi_yz, (dy, dz)))


# --- closeness under marginal constraints ---------------------------------------------------

def _region(spec: MarginalSpec, which: str) -> tuple[int, list[np.ndarray]]:
    if which == "global":
        return spec.dim, [np.eye(spec.dim, dtype=np.complex128)]
    if which not in PAIR_LABELS:
        raise ValueError(f"which must be 'global' or a pair label, got {which!r}")
    return spec.shape.kept_dim(PAIR_LABELS[which]), pair_kraus(spec, which)


def _solve_spec(p, spec, opts, settings, estimation, task) -> SdpSolution:
    sol = solve(p, opts)
    if sol.status is Status.PRIMAL_INFEASIBLE and spec.targets:
        outcome = marginal_feasibility(spec, opts, settings, estimation)
        if outcome.verdict is Verdict.INFEASIBLE:
            raise InfeasibleSpecError(f"{task}: marginal targets admit no global state", outcome)
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(f"{task}: solver returned {sol.status.value} ({sol.message})", sol)
    return sol


def _target_for(target, dim: int) -> DensityOperator:
    sigma = _as_density(target)
    if sigma.dim != dim:
        raise ShapeMismatchError(f"target has dim {sigma.dim}, region has dim {dim}")
    return sigma


def marginal_min_trace_distance(
    spec: MarginalSpec,
    target,
    which: str = "global",
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
    estimation: EstimationSettings | None = None,
) -> ClosenessResult:
    """Closest compatible global state to ``target``, measured on the global state or one pair."""
    opts = opts or SolverOptions()
    d, kraus = _region(spec, which)
    sigma = _target_for(target, d)
    b, sig = _global_builder("marginal-trace-distance", spec)
    x = add_trace_norm_bound(b, [(sig, k) for k in kraus], sigma.matrix)
    b.minimize({x: 0.5 * np.eye(d)})
    sol = _solve_spec(b.build(), spec, opts, settings, estimation, "marginal-trace-distance")
    value = float(min(1.0, max(0.0, sol.objective_value)))
    return ClosenessResult(value, nearest_density(sol.value("sigma")), QuantityKind.TRACE_DISTANCE, sol)


def marginal_max_fidelity(
    spec: MarginalSpec,
    target,
    which: str = "global",
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
    estimation: EstimationSettings | None = None,
) -> ClosenessResult:
    """max sqrt F between ``target`` and the chosen region of a compatible global state."""
    opts = opts or SolverOptions()
    d, kraus = _region(spec, which)
    sigma = _target_for(target, d)
    b, sig = _global_builder("marginal-fidelity", spec)
    if sigma.is_pure():
        lifted = sigma.matrix if which == "global" else embed_kept(sigma.matrix, spec.shape.dims, PAIR_LABELS[which])
        b.maximize({sig: lifted})
    else:
        y = add_fidelity_block(b, [(sig, k) for k in kraus], sigma.matrix)
        b.maximize({y: np.eye(d)})
    sol = _solve_spec(b.build(), spec, opts, settings, estimation, "marginal-fidelity")
    raw = float(min(1.0, max(0.0, sol.objective_value)))
    state = nearest_density(sol.value("sigma"))
    if sigma.is_pure():
        return ClosenessResult(float(np.sqrt(raw)), state, QuantityKind.SQRT_FIDELITY_PURE, sol)
    return ClosenessResult(raw, state, QuantityKind.SQRT_FIDELITY_MIXED, sol)


def marginal_property_range(
    spec: MarginalSpec,
    hamiltonian,
    opts: SolverOptions | None = None,
    settings: MarginalSettings | None = None,
    estimation: EstimationSettings | None = None,
) -> PropertyRange:
    """Range of tr(H sigma) over global states compatible with the spec."""
    opts = opts or SolverOptions()
    h = hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
    spec.shape.check(h.dim)
    out = []
    for sense in ("min", "max"):
        b, sig = _global_builder(f"marginal-energy-{sense}", spec)
        (b.minimize if sense == "min" else b.maximize)({sig: h.matrix})
        sol = _solve_spec(b.build(), spec, opts, settings, estimation, "marginal-energy")
        kind = QuantityKind.PROPERTY_MIN if sense == "min" else QuantityKind.PROPERTY_MAX
        out.append(ClosenessResult(float(sol.objective_value), nearest_density(sol.value("sigma")), kind, sol))
    logger.info(f"DONE marginal-energy | min={out[0].value:.8g}, max={out[1].value:.8g}")
    return PropertyRange(out[0], out[1])
