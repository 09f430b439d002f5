"""Hermitian operator algebra shared by every solver module.

Conventions
-----------
* Matrices are numpy ``complex128`` arrays; the ``[re, im]`` pair form only exists
  in the JSON literal format (``parse_matrix_literal`` / ``matrix_to_literal``).
* Subsystem order: the leftmost tensor factor is the slowest index, i.e.
  ``tensor(a, b) == numpy.kron(a, b)`` and a global index is
  ``i_0 * (d_1 * d_2 ...) + i_1 * (d_2 ...) + ...``.
* Operators are immutable: the stored array is marked read-only.
"""
from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStateError, NotHermitianError, ShapeMismatchError

# symmetrize below this asymmetry, reject above it
HERMITIAN_REJECT_TOL = 1e-8
DENSITY_TOL = 1e-9
PURE_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def as_matrix(x) -> np.ndarray:
    """Return the complex ndarray behind an operator-like value."""
    if isinstance(x, DensityOperator):
        return x.op.matrix
    if isinstance(x, HermitianOperator):
        return x.matrix
    return np.asarray(x, dtype=np.complex128)


def hermitian_violation(m: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Largest |m_ij - conj(m_ji)| and the (row <= col) entry where it occurs."""
    diff = np.abs(m - m.conj().T)
    if diff.size == 0:
        return 0.0, (0, 0)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[i, j]), (int(min(i, j)), int(max(i, j)))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(as_matrix(self.matrix), dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeMismatchError(f"expected a non-empty square matrix, got shape {m.shape}")
        worst, (i, j) = hermitian_violation(m)
        if worst > HERMITIAN_REJECT_TOL:
            raise NotHermitianError(i, j, worst)
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def expectation(self, state) -> float:
        """Re tr(M rho)."""
        rho = as_matrix(state)
        if rho.shape != self.matrix.shape:
            raise ShapeMismatchError(f"operator dim {self.dim} vs state shape {rho.shape}")
        return float(np.einsum("ij,ji->", self.matrix, rho).real)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + as_matrix(other))

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix - as_matrix(other))

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.matrix)

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    op: HermitianOperator

    def __post_init__(self):
        op = self.op if isinstance(self.op, HermitianOperator) else HermitianOperator(self.op)
        object.__setattr__(self, "op", op)
        tr = op.trace()
        if abs(tr - 1.0) > DENSITY_TOL:
            raise InvalidStateError(f"density operator must have unit trace, got {tr:.12g}")
        lam_min = float(op.eigvalsh()[0])
        if lam_min < -DENSITY_TOL:
            raise InvalidStateError(f"density operator must be PSD, minimum eigenvalue {lam_min:.3g}")

    @classmethod
    def from_ket(cls, vec) -> "DensityOperator":
        return cls(HermitianOperator(ket_to_density(vec)))

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    def eigvalsh(self) -> np.ndarray:
        return self.op.eigvalsh()

    def is_pure(self, tol: float = PURE_TOL) -> bool:
        lam = self.eigvalsh()
        return self.dim == 1 or float(lam[-2]) <= tol

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


@dataclass(frozen=True)
class SubsystemShape:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims):
            raise ShapeMismatchError(f"subsystem dims must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def kept_dim(self, keep: Iterable[int]) -> int:
        return math.prod(self.dims[i] for i in normalize_keep(keep, len(self.dims)))

    def check(self, dim: int) -> None:
        if dim != self.total:
            raise ShapeMismatchError(f"operator dim {dim} does not match subsystem dims {self.dims}")


@dataclass(frozen=True)
class BlochVector:
    r: tuple[float, float, float]

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        if len(r) != 3:
            raise ShapeMismatchError(f"Bloch vector needs 3 components, got {len(r)}")
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))


PAULI_I = HermitianOperator(np.eye(2))
PAULI_X = HermitianOperator(np.array([[0, 1], [1, 0]]))
PAULI_Y = HermitianOperator(np.array([[0, -1j], [1j, 0]]))
PAULI_Z = HermitianOperator(np.array([[1, 0], [0, -1]]))
PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def pauli_string(label: str) -> HermitianOperator:
    """Tensor product of Paulis, e.g. ``pauli_string("XZ") == tensor(X, Z)``."""
    label = label.strip().upper()
    if not label or any(ch not in PAULIS for ch in label):
        raise ValueError(f"not a Pauli string: {label!r}")
    return tensor_all(*(PAULIS[ch] for ch in label))


def tensor(a, b) -> HermitianOperator:
    return HermitianOperator(np.kron(as_matrix(a), as_matrix(b)))


def tensor_all(*ops) -> HermitianOperator:
    if not ops:
        raise ValueError("tensor_all needs at least one operator")
    return HermitianOperator(reduce(np.kron, (as_matrix(o) for o in ops)))


def normalize_keep(keep: Iterable[int], n: int) -> tuple[int, ...]:
    kept = tuple(sorted({int(i) for i in keep}))
    if any(i < 0 or i >= n for i in kept):
        raise ShapeMismatchError(f"subsystem indices {kept} out of range for {n} subsystems")
    return kept


def ptrace_matrix(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of a raw matrix, keeping ``keep`` in ascending subsystem order."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    kept = normalize_keep(keep, n)
    total = math.prod(dims)
    m = np.asarray(m)
    if m.shape != (total, total):
        raise ShapeMismatchError(f"matrix shape {m.shape} does not match subsystem dims {dims}")
    if 2 * n > len(string.ascii_letters):
        raise ShapeMismatchError(f"too many subsystems ({n})")
    letters = string.ascii_letters
    rows = letters[:n]
    cols = "".join(letters[n + i] if i in kept else letters[i] for i in range(n))
    out = "".join(letters[i] for i in kept) + "".join(letters[n + i] for i in kept)
    kd = math.prod(dims[i] for i in kept)
    return np.einsum(f"{rows}{cols}->{out}", m.reshape(dims + dims)).reshape(kd, kd)


def partial_trace(op, shape: SubsystemShape, keep: Iterable[int]) -> HermitianOperator:
    m = as_matrix(op)
    shape.check(m.shape[0])
    return HermitianOperator(ptrace_matrix(m, shape.dims, keep))


def embed_kept(k: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Adjoint of the partial trace: place ``k`` on the kept subsystems, identity elsewhere.

    Satisfies ``tr(embed_kept(k) @ rho) == tr(k @ ptrace_matrix(rho, dims, keep))``.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    kept = normalize_keep(keep, n)
    rest = [i for i in range(n) if i not in kept]
    kd = math.prod(dims[i] for i in kept)
    k = np.asarray(k, dtype=np.complex128)
    if k.shape != (kd, kd):
        raise ShapeMismatchError(f"operator shape {k.shape} does not match kept dim {kd}")
    full = np.kron(k, np.eye(math.prod(dims[i] for i in rest)))
    order = list(kept) + rest
    sub = [dims[i] for i in order]
    perm = [order.index(i) for i in range(n)]
    t = full.reshape(sub + sub).transpose(perm + [p + n for p in perm])
    total = math.prod(dims)
    return t.reshape(total, total)


def partial_trace_kraus(dims: Sequence[int], keep: Iterable[int]) -> list[np.ndarray]:
    """Kraus operators K with ptrace(rho) = sum K rho K^H (K maps global -> kept space)."""
    dims = tuple(int(d) for d in dims)
    kept = normalize_keep(keep, len(dims))
    traced = [i for i in range(len(dims)) if i not in kept]
    out = []
    for idx in itertools.product(*(range(dims[i]) for i in traced)):
        pick = dict(zip(traced, idx))
        factors = [
            np.eye(d) if i in kept else np.eye(d)[pick[i]][None, :]
            for i, d in enumerate(dims)
        ]
        out.append(reduce(np.kron, factors).astype(np.complex128))
    return out


def bloch_to_state(r: BlochVector | Sequence[float]) -> HermitianOperator:
    """(I + r.sigma)/2; no PSD check, the result may be unphysical."""
    vec = r.r if isinstance(r, BlochVector) else BlochVector(tuple(r)).r
    m = PAULI_I.matrix + vec[0] * PAULI_X.matrix + vec[1] * PAULI_Y.matrix + vec[2] * PAULI_Z.matrix
    return HermitianOperator(m / 2)


def state_to_bloch(rho) -> BlochVector:
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise ShapeMismatchError(f"Bloch vectors need a qubit state, got shape {m.shape}")
    return BlochVector(tuple(float(np.einsum("ij,ji->", p.matrix, m).real) for p in (PAULI_X, PAULI_Y, PAULI_Z)))


def eig_bounds(op) -> tuple[float, float]:
    lam = np.linalg.eigvalsh(as_matrix(op))
    return float(lam[0]), float(lam[-1])


def block_embed_2x2(tl, tr_block, br) -> HermitianOperator:
    """[[tl, tr_block], [tr_block^H, br]]."""
    a, d = as_matrix(tl), as_matrix(br)
    b = np.asarray(tr_block, dtype=np.complex128)
    if np.ndim(tr_block) == 0:
        b = np.full(a.shape, complex(tr_block))
    if a.shape != d.shape or b.shape != a.shape:
        raise ShapeMismatchError(f"block shapes differ: {a.shape}, {b.shape}, {d.shape}")
    return HermitianOperator(np.block([[a, b], [b.conj().T, d]]))


def ket_to_density(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise InvalidStateError("zero vector is not a state")
    v = v / nrm
    return np.outer(v, v.conj())


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(HermitianOperator(np.eye(dim) / dim))


def psd_sqrt(m) -> np.ndarray:
    w, v = np.linalg.eigh(as_matrix(m))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def trace_norm(m) -> float:
    return float(np.abs(np.linalg.eigvalsh(as_matrix(m))).sum())


def root_fidelity(rho, sigma) -> float:
    """tr sqrt(sqrt(sigma) rho sqrt(sigma)), computed as ||sqrt(rho) sqrt(sigma)||_1."""
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"state shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.svd(psd_sqrt(a) @ psd_sqrt(b), compute_uv=False).sum())


def nearest_density(m, tol: float = 1e-7) -> DensityOperator:
    """Clean a solver iterate into a DensityOperator.

    Hermitizes, clips eigenvalues in [-tol, 0) and renormalizes the trace; anything
    further from the state space is an error.
    """
    a = as_matrix(m)
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    if w[0] < -tol:
        raise InvalidStateError(f"matrix is not PSD within {tol:g} (min eigenvalue {w[0]:.3g})")
    w = np.clip(w, 0.0, None)
    s = w.sum()
    if s <= 0:
        raise InvalidStateError("matrix has zero trace")
    return DensityOperator(HermitianOperator((v * (w / s)) @ v.conj().T))


def schmidt_coefficients(psi, dims: Sequence[int]) -> np.ndarray:
    """Squared Schmidt coefficients (descending) of a bipartite ket."""
    da, db = (int(d) for d in dims)
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if v.size != da * db:
        raise ShapeMismatchError(f"ket of length {v.size} does not match dims {tuple(dims)}")
    s = np.linalg.svd((v / np.linalg.norm(v)).reshape(da, db), compute_uv=False)
    return s**2


# --- random sampling (tests, demo problems) ---

def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator((g + g.conj().T) / 2)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Ginibre ensemble; full rank unless ``rank`` is given."""
    k = dim if rank is None else int(rank)
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    return DensityOperator(HermitianOperator(m / np.trace(m).real))


def random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


# --- JSON literal format ---

def _parse_scalar(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ValueError(f"{where}: booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"{where}: expected a number or [re, im], got {x!r}")


def parse_vector_literal(items) -> np.ndarray:
    if not isinstance(items, (list, tuple)) or not items:
        raise ValueError("expected a non-empty list of entries")
    return np.array([_parse_scalar(x, f"entry {k}") for k, x in enumerate(items)], dtype=np.complex128)


def parse_matrix_literal(rows) -> np.ndarray:
    """Row-major nested lists; entries are plain numbers or ``[re, im]`` pairs."""
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ValueError("expected a non-empty list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)) or len(row) != len(rows):
            raise ValueError(f"row {i} must have {len(rows)} entries (square matrix)")
        out.append([_parse_scalar(x, f"entry ({i}, {j})") for j, x in enumerate(row)])
    return np.array(out, dtype=np.complex128)


def hermitian_from_literal(rows) -> HermitianOperator:
    return HermitianOperator(parse_matrix_literal(rows))


def matrix_to_literal(m, digits: int = 15) -> list[list[list[float]]]:
    a = as_matrix(m)
    return [[[round(float(z.real), digits), round(float(z.imag), digits)] for z in row] for row in a]
