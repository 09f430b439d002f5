"""Standard-form SDPs over Hermitian blocks, solved with cvxopt.

A problem has named variable blocks ``X_b`` (complex Hermitian, or real symmetric),
a linear objective ``sum_b Re tr(C_b X_b)``, linear equalities of the same form and
linear matrix inequalities

    S_k = F0_k + sum of terms  >= 0

where a term is either a congruence ``(L X R + (L X R)^H) / 2`` or a scaled trace
``Re tr(C X) * E``.  Blocks are expanded in an orthonormal Hermitian basis, complex
LMIs are mapped to real symmetric ones with ``H -> [[Re H, -Im H], [Im H, Re H]]``
and the real program goes to ``cvxopt.solvers.sdp`` (primal-dual interior point with
Nesterov-Todd scaling on the homogeneous self-dual embedding, so infeasible problems
come back with a certificate instead of a timeout).

Dual convention: for a minimisation, multipliers ``lam`` (equalities) and ``Z_k >= 0``
(LMIs) satisfy ``c = A^T lam + sum_k F_k^*(Z_k)`` and the dual value is
``b.lam - sum_k Re tr(Z_k F0_k)``.  Maximisations are solved as ``min -c`` and their
multipliers refer to that form.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from .config import SolverOptions
from .errors import NotHermitianError, ShapeMismatchError
from .operators import as_matrix, hermitian_violation

logger = logging.getLogger("qsdp")

_HERM_TOL = 1e-10


class Status(str, Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class Block:
    name: str
    dim: int
    real: bool = False


def _herm(m, what: str) -> np.ndarray:
    a = np.asarray(as_matrix(m), dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"{what}: expected a square matrix, got shape {a.shape}")
    worst, (i, j) = hermitian_violation(a)
    if worst > _HERM_TOL * max(1.0, float(np.abs(a).max(initial=0.0))):
        raise NotHermitianError(i, j, worst)
    return a


@dataclass(frozen=True, eq=False)
class LinearForm:
    """sum over blocks of Re tr(C_b X_b)."""

    coeffs: Mapping[str, np.ndarray] = field(default_factory=dict)

    def value(self, values: Mapping[str, np.ndarray]) -> float:
        return float(sum(np.einsum("ij,ji->", c, as_matrix(values[b])).real for b, c in self.coeffs.items()))


@dataclass(frozen=True, eq=False)
class Equality:
    form: LinearForm
    rhs: float
    label: str = ""


@dataclass(frozen=True, eq=False)
class Congruence:
    """(L X R + (L X R)^H) / 2 with L: m x d, R: d x m."""

    block: str
    left: np.ndarray
    right: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        t = self.left @ x @ self.right
        return (t + t.conj().T) / 2


@dataclass(frozen=True, eq=False)
class TraceTerm:
    """Re tr(C X) * E."""

    block: str
    coeff: np.ndarray
    matrix: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ji->", self.coeff, x).real * self.matrix


LmiTerm = Union[Congruence, TraceTerm]


@dataclass(frozen=True, eq=False)
class Lmi:
    constant: np.ndarray
    terms: tuple[LmiTerm, ...]
    label: str = ""

    @property
    def dim(self) -> int:
        return self.constant.shape[0]

    def value(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        s = np.array(self.constant, dtype=np.complex128)
        for t in self.terms:
            s = s + t.apply(as_matrix(values[t.block]))
        return s


@dataclass(frozen=True, eq=False)
class SdpProblem:
    blocks: tuple[Block, ...]
    objective: LinearForm
    sense: str = "min"
    equalities: tuple[Equality, ...] = ()
    lmis: tuple[Lmi, ...] = ()
    name: str = "sdp"

    def __post_init__(self):
        if not self.blocks:
            raise ShapeMismatchError(f"{self.name}: an SDP needs at least one variable block")
        if self.sense not in ("min", "max"):
            raise ValueError(f"{self.name}: sense must be 'min' or 'max', got {self.sense!r}")
        dims = {}
        for b in self.blocks:
            if b.name in dims:
                raise ValueError(f"{self.name}: duplicate block name {b.name!r}")
            if b.dim <= 0:
                raise ShapeMismatchError(f"{self.name}: block {b.name!r} has dim {b.dim}")
            dims[b.name] = b.dim
        forms = [("objective", self.objective)] + [
            (f"equality {k} {e.label}".strip(), e.form) for k, e in enumerate(self.equalities)
        ]
        for what, form in forms:
            for name, c in form.coeffs.items():
                self._check_block(dims, name, what)
                if _herm(c, what).shape != (dims[name], dims[name]):
                    raise ShapeMismatchError(f"{self.name}: {what} coefficient for {name!r} has shape {np.shape(c)}")
        for k, lmi in enumerate(self.lmis):
            what = f"lmi {k} {lmi.label}".strip()
            m = _herm(lmi.constant, what).shape[0]
            for t in lmi.terms:
                self._check_block(dims, t.block, what)
                d = dims[t.block]
                if isinstance(t, Congruence):
                    if np.shape(t.left) != (m, d) or np.shape(t.right) != (d, m):
                        raise ShapeMismatchError(
                            f"{self.name}: {what} congruence on {t.block!r} needs L {m}x{d}, R {d}x{m}"
                        )
                else:
                    if _herm(t.coeff, what).shape != (d, d) or _herm(t.matrix, what).shape != (m, m):
                        raise ShapeMismatchError(f"{self.name}: {what} trace term on {t.block!r} has wrong shape")

    def _check_block(self, dims: dict, name: str, what: str) -> None:
        if name not in dims:
            raise ShapeMismatchError(f"{self.name}: {what} refers to unknown block {name!r}")

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)


class SdpBuilder:
    """Mutable helper collecting blocks and constraints; ``build()`` freezes them."""

    def __init__(self, name: str = "sdp"):
        self.name = name
        self.blocks: list[Block] = []
        self.equalities: list[Equality] = []
        self.lmis: list[Lmi] = []
        self.objective = LinearForm({})
        self.sense = "min"

    def block(self, name: str, dim: int, real: bool = False) -> str:
        self.blocks.append(Block(name, int(dim), real))
        return name

    def dim(self, name: str) -> int:
        for b in self.blocks:
            if b.name == name:
                return b.dim
        raise KeyError(name)

    def equality(self, coeffs: Mapping[str, np.ndarray], rhs: float, label: str = "") -> int:
        self.equalities.append(Equality(LinearForm(dict(coeffs)), float(rhs), label))
        return len(self.equalities) - 1

    def lmi(self, constant, terms: Sequence[LmiTerm], label: str = "") -> int:
        self.lmis.append(Lmi(np.asarray(constant, dtype=np.complex128), tuple(terms), label))
        return len(self.lmis) - 1

    def psd(self, name: str, label: str = "") -> int:
        d = self.dim(name)
        return self.lmi(np.zeros((d, d)), [congruence(name, np.eye(d), np.eye(d))], label or f"{name} >= 0")

    def nonneg(self, name: str, label: str = "") -> int:
        return self.lmi(np.zeros((1, 1)), [TraceTerm(name, np.eye(1), np.eye(1))], label or f"{name} >= 0")

    def minimize(self, coeffs: Mapping[str, np.ndarray]) -> None:
        self.objective, self.sense = LinearForm(dict(coeffs)), "min"

    def maximize(self, coeffs: Mapping[str, np.ndarray]) -> None:
        self.objective, self.sense = LinearForm(dict(coeffs)), "max"

    def build(self) -> SdpProblem:
        return SdpProblem(
            blocks=tuple(self.blocks),
            objective=self.objective,
            sense=self.sense,
            equalities=tuple(self.equalities),
            lmis=tuple(self.lmis),
            name=self.name,
        )


def congruence(block: str, left, right) -> Congruence:
    return Congruence(block, np.asarray(left, dtype=np.complex128), np.asarray(right, dtype=np.complex128))


def scaled_trace(block: str, coeff, matrix) -> TraceTerm:
    return TraceTerm(block, np.asarray(coeff, dtype=np.complex128), np.asarray(matrix, dtype=np.complex128))


# --- real coordinates -----------------------------------------------------------------

@lru_cache(maxsize=128)
def hermitian_basis(dim: int, real: bool = False) -> np.ndarray:
    """Orthonormal basis (w.r.t. Re tr(A B)) of Hermitian, or real symmetric, matrices.

    Shape (n, dim, dim) with n = dim**2, or dim*(dim+1)/2 when ``real``.
    """
    s = 1 / np.sqrt(2)
    mats = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=np.complex128)
        e[i, i] = 1
        mats.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[i, j] = e[j, i] = s
            mats.append(e)
    if not real:
        for i in range(dim):
            for j in range(i + 1, dim):
                e = np.zeros((dim, dim), dtype=np.complex128)
                e[i, j], e[j, i] = -1j * s, 1j * s
                mats.append(e)
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


def real_embed_matrix(h) -> np.ndarray:
    """H -> [[Re H, -Im H], [Im H, Re H]]; works on stacks (..., m, m)."""
    h = np.asarray(h)
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def _unembed_multiplier(zr: np.ndarray, m: int) -> np.ndarray:
    # Re tr(Zc S) == tr(Zr embed(S)) for every Hermitian S
    p, q, r, s = zr[:m, :m], zr[:m, m:], zr[m:, :m], zr[m:, m:]
    return (p + s) + 1j * (r - q)


@dataclass
class _Assembled:
    offsets: dict[str, tuple[int, int]]
    n: int
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    # per LMI: constant (t x t real) and coefficient stack (n, t, t) real
    h: list[np.ndarray]
    F: list[np.ndarray]
    embedded: list[bool]


def _form_row(form: LinearForm, p: SdpProblem, offsets: dict) -> np.ndarray:
    row = np.zeros(max(stop for _, stop in offsets.values()))
    for name, coeff in form.coeffs.items():
        blk = p.block(name)
        start, stop = offsets[name]
        basis = hermitian_basis(blk.dim, blk.real)
        row[start:stop] += np.einsum("ij,kji->k", np.asarray(coeff), basis).real
    return row


def _lmi_stack(lmi: Lmi, p: SdpProblem, offsets: dict, n: int) -> np.ndarray:
    m = lmi.dim
    F = np.zeros((n, m, m), dtype=np.complex128)
    for t in lmi.terms:
        blk = p.block(t.block)
        start, stop = offsets[t.block]
        basis = hermitian_basis(blk.dim, blk.real)
        if isinstance(t, Congruence):
            T = np.einsum("ab,kbc,cd->kad", t.left, basis, t.right)
            F[start:stop] += (T + np.conj(T).transpose(0, 2, 1)) / 2
        else:
            a = np.einsum("ij,kji->k", t.coeff, basis).real
            F[start:stop] += a[:, None, None] * t.matrix[None, :, :]
    return F


def assemble(p: SdpProblem) -> _Assembled:
    """Real-coordinate data of ``p`` (objective in the problem's own sense)."""
    offsets, n = {}, 0
    for blk in p.blocks:
        k = hermitian_basis(blk.dim, blk.real).shape[0]
        offsets[blk.name] = (n, n + k)
        n += k
    c = _form_row(p.objective, p, offsets)
    A = np.array([_form_row(e.form, p, offsets) for e in p.equalities]).reshape(len(p.equalities), n)
    b = np.array([e.rhs for e in p.equalities], dtype=float)
    hs, Fs, emb = [], [], []
    for lmi in p.lmis:
        F = _lmi_stack(lmi, p, offsets, n)
        F0 = np.asarray(lmi.constant, dtype=np.complex128)
        is_real = np.abs(F0.imag).max(initial=0.0) == 0.0 and np.abs(F.imag).max(initial=0.0) == 0.0
        if is_real:
            hs.append(F0.real.copy())
            Fs.append(F.real.copy())
        else:
            hs.append(real_embed_matrix(F0))
            Fs.append(real_embed_matrix(F))
        emb.append(not is_real)
    return _Assembled(offsets, n, c, A, b, hs, Fs, emb)


def _coords_to_values(x: np.ndarray, p: SdpProblem, offsets: dict) -> dict[str, np.ndarray]:
    out = {}
    for blk in p.blocks:
        start, stop = offsets[blk.name]
        v = np.tensordot(x[start:stop], hermitian_basis(blk.dim, blk.real), axes=1)
        out[blk.name] = v.real.copy() if blk.real else v
    return out


# --- solution ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SdpSolution:
    status: Status
    primal: dict[str, np.ndarray] | None
    equality_duals: tuple[float, ...] | None
    lmi_duals: tuple[np.ndarray, ...] | None
    objective_value: float
    dual_value: float
    gap: float
    iterations: int = 0
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")
    slackness: tuple[float, ...] = ()
    accepted_stall: bool = False
    message: str = ""
    elapsed: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def value(self, name: str) -> np.ndarray:
        if self.primal is None:
            raise KeyError(f"no primal values (status {self.status.value})")
        return self.primal[name]

    def diagnostics(self) -> dict:
        def f(x):
            return None if x is None or not np.isfinite(x) else float(x)

        return {
            "status": self.status.value,
            "iterations": int(self.iterations),
            "objective": f(self.objective_value),
            "dual_objective": f(self.dual_value),
            "gap": f(self.gap),
            "primal_residual": f(self.primal_residual),
            "dual_residual": f(self.dual_residual),
            "max_slackness": f(max(self.slackness)) if self.slackness else None,
            "accepted_stall": self.accepted_stall,
            "elapsed_s": round(self.elapsed, 4),
        }


def _failure(status: Status, message: str, **kw) -> SdpSolution:
    nan = float("nan")
    base = dict(primal=None, equality_duals=None, lmi_duals=None, objective_value=nan, dual_value=nan, gap=nan)
    base.update(kw)
    return SdpSolution(status=status, message=message, **base)


@dataclass
class _Presolved:
    A: np.ndarray
    b: np.ndarray
    row_map: np.ndarray  # lam_full = row_map @ lam_reduced
    Q: np.ndarray | None  # x = Q w
    c: np.ndarray
    G: list[np.ndarray]


def _presolve(asm: _Assembled, c: np.ndarray, tol: float = 1e-10):
    """Drop redundant equality rows and variable directions no constraint sees.

    Returns either a ``_Presolved`` or an early ``SdpSolution``.
    """
    n, p = asm.n, asm.A.shape[0]
    A, b = asm.A, asm.b
    row_map = np.zeros((p, 0))
    if p:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        r = int((s > tol * max(1.0, s[0] if s.size else 0.0)).sum())
        row_map = U[:, :r]
        A_red = row_map.T @ A
        b_red = row_map.T @ b
        resid = b - row_map @ b_red
        if np.linalg.norm(resid) > 1e-9 * max(1.0, np.linalg.norm(b)):
            # b outside range(A): lam with A^T lam = 0 and b.lam = 1 is a dual improving ray
            lam = resid / float(resid @ resid)
            return _failure(
                Status.PRIMAL_INFEASIBLE,
                "equality constraints are inconsistent",
                equality_duals=tuple(float(v) for v in lam),
                lmi_duals=tuple(np.zeros((h.shape[0] // (2 if e else 1),) * 2) for h, e in zip(asm.h, asm.embedded)),
            )
        A, b = A_red, b_red
    G = [-F.reshape(n, -1).T for F in asm.F]
    K = np.vstack(G + [A]) if (G or A.size) else np.zeros((0, n))
    Q = None
    if K.size:
        _, s, Vt = np.linalg.svd(K, full_matrices=False)
        k = int((s > tol * max(1.0, s[0] if s.size else 0.0)).sum())
        if k < n:
            Q = Vt[:k].T
    else:
        k = 0
        Q = np.zeros((n, 0))
    if Q is not None:
        c_perp = c - Q @ (Q.T @ c)
        if np.linalg.norm(c_perp) > 1e-9 * max(1.0, np.linalg.norm(c)):
            return _failure(Status.DUAL_INFEASIBLE, "objective is unbounded along unconstrained directions")
        G = [g @ Q for g in G]
        A = A @ Q
        c = Q.T @ c
    return _Presolved(A=A, b=b, row_map=row_map, Q=Q, c=c, G=G)


def _sym_lower(z: np.ndarray) -> np.ndarray:
    return np.tril(z) + np.tril(z, -1).T


def solve(p: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    """Solve ``p`` with cvxopt; never raises for solver trouble, check ``status``."""
    from cvxopt import matrix, solvers

    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    asm = assemble(p)
    sign = 1.0 if p.sense == "min" else -1.0
    c = sign * asm.c
    logger.debug(f"START solve {p.name} | vars={asm.n}, eq={asm.A.shape[0]}, lmis={len(asm.h)}")

    pre = _presolve(asm, c)
    if isinstance(pre, SdpSolution):
        logger.info(f"DONE solve {p.name} | status={pre.status.value}, presolve: {pre.message}")
        return pre
    if pre.c.size == 0:
        return _trivial(p, asm, sign, t0)

    scale = float(np.abs(pre.c).max()) or 1.0
    kwargs = {
        "Gs": [matrix(np.ascontiguousarray(g, dtype=float)) for g in pre.G],
        "hs": [matrix(np.ascontiguousarray(h, dtype=float)) for h in asm.h],
    }
    if pre.A.shape[0]:
        kwargs["A"] = matrix(np.ascontiguousarray(pre.A, dtype=float))
        kwargs["b"] = matrix(np.ascontiguousarray(pre.b.reshape(-1, 1), dtype=float))
    options = {
        "show_progress": bool(opts.show_progress),
        "maxiters": int(opts.max_iter),
        "abstol": float(opts.gap_tol),
        "reltol": float(opts.gap_tol),
        "feastol": float(opts.feas_tol),
    }
    try:
        sol = solvers.sdp(matrix(np.ascontiguousarray((pre.c / scale).reshape(-1, 1))), options=options, **kwargs)
    except (ValueError, ArithmeticError) as e:
        logger.warning(f"WARN solve {p.name} | cvxopt failed: {e}")
        return _failure(Status.NUMERICAL_FAILURE, f"cvxopt: {e}", elapsed=time.perf_counter() - t0)

    raw = sol["status"]
    iters = int(sol.get("iterations") or 0)
    ys = np.array(sol["y"]).reshape(-1) if sol.get("y") is not None else np.zeros(0)
    zs = [_sym_lower(np.array(z)) for z in sol["zs"]] if sol.get("zs") is not None else None

    if raw == "primal infeasible":
        lam = -(pre.row_map @ ys) if ys.size else np.zeros(asm.A.shape[0])
        out = _failure(
            Status.PRIMAL_INFEASIBLE,
            "cvxopt: primal infeasible",
            equality_duals=tuple(float(v) for v in lam),
            lmi_duals=tuple(_multipliers(zs, asm)) if zs is not None else None,
            iterations=iters,
            elapsed=time.perf_counter() - t0,
        )
        logger.info(f"DONE solve {p.name} | status={out.status.value}, iter={iters}")
        return out
    if raw == "dual infeasible":
        logger.info(f"DONE solve {p.name} | status=DualInfeasible, iter={iters}")
        return _failure(Status.DUAL_INFEASIBLE, "cvxopt: dual infeasible", iterations=iters,
                        elapsed=time.perf_counter() - t0)
    if sol.get("x") is None or zs is None:
        return _failure(Status.NUMERICAL_FAILURE, f"cvxopt: {raw} without iterates", iterations=iters,
                        elapsed=time.perf_counter() - t0)

    w = np.array(sol["x"]).reshape(-1)
    x = pre.Q @ w if pre.Q is not None else w
    lam = -(pre.row_map @ ys) * scale if ys.size else np.zeros(asm.A.shape[0])
    z_real = [z * scale for z in zs]
    out = _evaluate(p, asm, sign, x, lam, z_real, iters, raw, opts, t0)
    level = logging.WARNING if out.accepted_stall or not out.optimal else logging.INFO
    prefix = "WARN" if level == logging.WARNING else "DONE"
    logger.log(
        level,
        f"{prefix} solve {p.name} | status={out.status.value}, iter={iters}, "
        f"obj={out.objective_value:.10g}, gap={out.gap:.2e}, 耗时={out.elapsed:.3f}s",
    )
    return out


def _multipliers(z_real: list[np.ndarray], asm: _Assembled) -> list[np.ndarray]:
    out = []
    for z, emb in zip(z_real, asm.embedded):
        out.append(_unembed_multiplier(z, z.shape[0] // 2) if emb else z.astype(np.complex128))
    return out


def _evaluate(p, asm, sign, x, lam, z_real, iters, raw, opts: SolverOptions, t0) -> SdpSolution:
    c = sign * asm.c
    primal_min = float(c @ x)
    S = [h + np.tensordot(x, F, axes=1) for h, F in zip(asm.h, asm.F)]
    dual_min = float(asm.b @ lam) - float(sum(np.sum(z * h) for z, h in zip(z_real, asm.h)))
    gap = primal_min - dual_min

    eq_res = float(np.abs(asm.A @ x - asm.b).max(initial=0.0))
    psd_res = max([0.0] + [-float(np.linalg.eigvalsh(s)[0]) for s in S])
    primal_res = max(eq_res, psd_res)
    stat = c - asm.A.T @ lam - sum(np.tensordot(F, z, axes=([1, 2], [0, 1])) for F, z in zip(asm.F, z_real))
    dual_psd = max([0.0] + [-float(np.linalg.eigvalsh(z)[0]) for z in z_real])
    dual_res = max(float(np.abs(stat).max(initial=0.0)), dual_psd)
    slack = tuple(float(np.sum(z * s)) for z, s in zip(z_real, S))

    scale = max(1.0, abs(primal_min))
    if raw == "optimal":
        status, stalled = Status.OPTIMAL, False
    else:
        f = opts.stall_factor
        close = gap <= f * opts.gap_tol * scale and primal_res <= f * opts.feas_tol * scale and \
            dual_res <= f * opts.feas_tol * scale
        if close:
            status, stalled = Status.OPTIMAL, True
        elif iters >= opts.max_iter:
            status, stalled = Status.MAX_ITERATIONS, False
        else:
            status, stalled = Status.NUMERICAL_FAILURE, False
    if status is Status.OPTIMAL and gap < -10 * opts.gap_tol * scale:
        logger.warning(f"WARN solve {p.name} | weak duality violated, gap={gap:.3e}")

    return SdpSolution(
        status=status,
        primal=_coords_to_values(x, p, asm.offsets),
        equality_duals=tuple(float(v) for v in lam),
        lmi_duals=tuple(_multipliers(z_real, asm)),
        objective_value=sign * primal_min,
        dual_value=sign * dual_min,
        gap=gap,
        iterations=iters,
        primal_residual=primal_res,
        dual_residual=dual_res,
        slackness=slack,
        accepted_stall=stalled,
        message=f"cvxopt: {raw}",
        elapsed=time.perf_counter() - t0,
    )


def _trivial(p: SdpProblem, asm: _Assembled, sign: float, t0: float) -> SdpSolution:
    # every variable direction was projected out: x = 0 is the only candidate
    x = np.zeros(asm.n)
    ok = all(float(np.linalg.eigvalsh(h)[0]) >= -1e-12 for h in asm.h) and not np.any(np.abs(asm.b) > 1e-12)
    if not ok:
        return _failure(Status.PRIMAL_INFEASIBLE, "no free variables and x = 0 is infeasible")
    return SdpSolution(
        status=Status.OPTIMAL,
        primal=_coords_to_values(x, p, asm.offsets),
        equality_duals=tuple(0.0 for _ in asm.b),
        lmi_duals=tuple(np.zeros((h.shape[0] // (2 if e else 1),) * 2, dtype=np.complex128)
                        for h, e in zip(asm.h, asm.embedded)),
        objective_value=0.0,
        dual_value=0.0,
        gap=0.0,
        primal_residual=0.0,
        dual_residual=0.0,
        slackness=tuple(0.0 for _ in asm.h),
        message="trivial",
        elapsed=time.perf_counter() - t0,
    )


# --- feasibility check ------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    worst_equality_residual: float
    worst_lmi_eigenvalue: float
    equality_residuals: tuple[float, ...]
    lmi_min_eigenvalues: tuple[float, ...]
    tol: float

    def as_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "worst_equality_residual": self.worst_equality_residual,
            "worst_lmi_eigenvalue": self.worst_lmi_eigenvalue,
            "tol": self.tol,
        }


def check_feasible(p: SdpProblem, candidate: Mapping[str, object], tol: float = 1e-7) -> FeasibilityReport:
    """Evaluate residuals of ``candidate`` against ``p``; no optimisation."""
    values = {}
    for blk in p.blocks:
        if blk.name not in candidate:
            raise ShapeMismatchError(f"{p.name}: candidate is missing block {blk.name!r}")
        v = np.asarray(as_matrix(candidate[blk.name]), dtype=np.complex128)
        if v.shape != (blk.dim, blk.dim):
            raise ShapeMismatchError(f"{p.name}: block {blk.name!r} expects {blk.dim}x{blk.dim}, got {v.shape}")
        values[blk.name] = v
    eq = tuple(abs(e.form.value(values) - e.rhs) for e in p.equalities)
    lm = tuple(float(np.linalg.eigvalsh(lmi.value(values))[0]) for lmi in p.lmis)
    worst_eq = max(eq, default=0.0)
    worst_lmi = min(lm, default=0.0)
    return FeasibilityReport(
        feasible=bool(worst_eq <= tol and worst_lmi >= -tol),
        worst_equality_residual=worst_eq,
        worst_lmi_eigenvalue=worst_lmi,
        equality_residuals=eq,
        lmi_min_eigenvalues=lm,
        tol=tol,
    )


# --- real embedding -----------------------------------------------------------------------

def _lmi_is_real(lmi: Lmi, blocks: dict[str, Block]) -> bool:
    mats = [lmi.constant]
    for t in lmi.terms:
        if isinstance(t, Congruence):
            if not blocks[t.block].real:
                return False
            mats += [t.left, t.right]
        else:
            mats += [t.coeff, t.matrix]
    return all(np.abs(np.imag(m)).max(initial=0.0) == 0.0 for m in mats)


def real_embed(p: SdpProblem) -> SdpProblem:
    """Equivalent problem with real symmetric blocks only.

    A complex block of dim d becomes a real block of dim 2d holding embed(X).
    Linear coefficients become embed(C)/2 since tr(embed(C) embed(X)) = 2 Re tr(C X);
    the optimal value is unchanged.
    """
    blocks = {b.name: b for b in p.blocks}
    new_blocks = tuple(Block(b.name, b.dim if b.real else 2 * b.dim, True) for b in p.blocks)

    def coeff(name: str, c: np.ndarray) -> np.ndarray:
        return np.asarray(c) if blocks[name].real else real_embed_matrix(c) / 2

    def form(f: LinearForm) -> LinearForm:
        return LinearForm({k: coeff(k, v) for k, v in f.coeffs.items()})

    lmis = []
    for lmi in p.lmis:
        if _lmi_is_real(lmi, blocks):
            kept = tuple(
                TraceTerm(t.block, coeff(t.block, t.coeff), t.matrix) if isinstance(t, TraceTerm) else t
                for t in lmi.terms
            )
            lmis.append(Lmi(np.asarray(lmi.constant).real.astype(np.complex128), kept, lmi.label))
            continue
        terms: list[LmiTerm] = []
        for t in lmi.terms:
            blk = blocks[t.block]
            if isinstance(t, TraceTerm):
                terms.append(TraceTerm(t.block, coeff(t.block, t.coeff), real_embed_matrix(t.matrix)))
            elif not blk.real:
                terms.append(Congruence(t.block, real_embed_matrix(t.left), real_embed_matrix(t.right)))
            else:
                # real X: embed(L X R) = embed(L) diag(X, X) embed(R)
                d = blk.dim
                top = np.vstack([np.eye(d), np.zeros((d, d))])
                bot = np.vstack([np.zeros((d, d)), np.eye(d)])
                L, R = real_embed_matrix(t.left), real_embed_matrix(t.right)
                terms.append(Congruence(t.block, L @ top, top.T @ R))
                terms.append(Congruence(t.block, L @ bot, bot.T @ R))
        lmis.append(Lmi(real_embed_matrix(lmi.constant), tuple(terms), lmi.label))

    return SdpProblem(
        blocks=new_blocks,
        objective=form(p.objective),
        sense=p.sense,
        equalities=tuple(Equality(form(e.form), e.rhs, e.label) for e in p.equalities),
        lmis=tuple(lmis),
        name=f"{p.name}[real]",
    )


def embed_values(p: SdpProblem, values: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Map a candidate for ``p`` to the matching candidate for ``real_embed(p)``."""
    out = {}
    for b in p.blocks:
        v = as_matrix(values[b.name])
        out[b.name] = v.real if b.real else real_embed_matrix(v)
    return out
