"""SDPA sparse format export/import.

SDPA's standard form is

    min  c.x   s.t.  X = sum_i F_i x_i - F_0 >= 0

over block-diagonal X, where a negative block size denotes a diagonal (LP) block.
A qsdp problem maps onto it through its real coordinates (see ``sdp.assemble``):
the SDPA F_0 of an LMI block is minus the LMI constant, and every equality
``a.x = b`` becomes the pair ``a.x - b >= 0``, ``-a.x + b >= 0`` in one LP block.
Maximisation problems are written as ``min -c.x``; a comment line records it.

Entry lines are ``matrix block i j value`` with 1-based block/row/column indices,
upper triangle only (matrix 0 is F_0).
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ProblemFileError
from .sdp import Lmi, LinearForm, SdpProblem, TraceTerm, Block, assemble

logger = logging.getLogger("qsdp")

_ZERO = 1e-15


@dataclass(frozen=True, eq=False)
class SdpaData:
    c: np.ndarray
    block_sizes: tuple[int, ...]  # negative = diagonal block
    # F[i][k] is matrix i (0 = F_0) restricted to block k, dense
    F: list[list[np.ndarray]]
    comments: tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return int(self.c.size)

    @property
    def negated(self) -> bool:
        return any("maximize" in line for line in self.comments)

    def to_problem(self, name: str = "sdpa") -> SdpProblem:
        """Scalar variables x1..xm as 1x1 real blocks; each SDPA block becomes one LMI."""
        blocks = tuple(Block(f"x{i + 1}", 1, True) for i in range(self.m))
        one = np.eye(1)
        objective = LinearForm({f"x{i + 1}": self.c[i] * one for i in range(self.m) if self.c[i] != 0})
        lmis = []
        for k, size in enumerate(self.block_sizes):
            terms = tuple(
                TraceTerm(f"x{i}", one.astype(np.complex128), self.F[i][k].astype(np.complex128))
                for i in range(1, self.m + 1)
                if np.any(self.F[i][k])
            )
            lmis.append(Lmi(-self.F[0][k].astype(np.complex128), terms, f"block {k + 1}"))
        return SdpProblem(blocks=blocks, objective=objective, sense="min", lmis=tuple(lmis), name=name)


def to_sdpa(p: SdpProblem) -> SdpaData:
    asm = assemble(p)
    c = asm.c if p.sense == "min" else -asm.c
    comments = [f"qsdp export of {p.name}: {asm.n} real coordinates"]
    if p.sense == "max":
        comments.append("objective negated: original problem is maximize")
    for name, (start, stop) in asm.offsets.items():
        comments.append(f"block {name}: coordinates {start + 1}..{stop}")

    sizes: list[int] = []
    F: list[list[np.ndarray]] = [[] for _ in range(asm.n + 1)]
    for h, stack in zip(asm.h, asm.F):
        sizes.append(h.shape[0])
        F[0].append(-h)
        for i in range(asm.n):
            F[i + 1].append(stack[i])
    if asm.A.shape[0]:
        p_rows = asm.A.shape[0]
        sizes.append(-2 * p_rows)
        F[0].append(np.diag(np.concatenate([asm.b, -asm.b])))
        for i in range(asm.n):
            F[i + 1].append(np.diag(np.concatenate([asm.A[:, i], -asm.A[:, i]])))
    return SdpaData(c=np.asarray(c, dtype=float), block_sizes=tuple(sizes), F=F, comments=tuple(comments))


def format_sdpa(p: SdpProblem) -> str:
    data = to_sdpa(p)
    lines = [f'"{line}' for line in data.comments]
    lines.append(f"{data.m}")
    lines.append(f"{len(data.block_sizes)}")
    lines.append(" ".join(str(s) for s in data.block_sizes))
    lines.append(" ".join(f"{v:.16g}" for v in data.c))
    for i, mats in enumerate(data.F):
        for k, mat in enumerate(mats):
            rows, cols = np.nonzero(np.triu(np.abs(mat) > _ZERO))
            for r, s in zip(rows, cols):
                lines.append(f"{i} {k + 1} {r + 1} {s + 1} {mat[r, s]:.16g}")
    return "\n".join(lines) + "\n"


def write_sdpa(p: SdpProblem, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_sdpa(p), encoding="utf-8")
    logger.info(f"DONE sdpa export | problem={p.name}, file={path}")
    return path


_SEPARATORS = re.compile(r"[{}(),]")


def read_sdpa(source: Path | str) -> SdpaData:
    """Parse SDPA sparse text (a path, or the text itself when it contains newlines)."""
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text(encoding="utf-8")
    comments, body = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line[0] in "\"*" and not body:
            comments.append(line[1:].strip())
            continue
        body.append(line)
    if len(body) < 4:
        raise ProblemFileError("SDPA header needs m, nBlocks, block sizes and c", field="header")
    try:
        m = int(_SEPARATORS.sub(" ", body[0]).split()[0])
        nblocks = int(_SEPARATORS.sub(" ", body[1]).split()[0])
        sizes = tuple(int(float(tok)) for tok in _SEPARATORS.sub(" ", body[2]).split())
        c = np.array([float(tok) for tok in _SEPARATORS.sub(" ", body[3]).split()], dtype=float)
    except (ValueError, IndexError) as e:
        raise ProblemFileError(f"malformed SDPA header: {e}", field="header") from e
    if len(sizes) != nblocks:
        raise ProblemFileError(f"expected {nblocks} block sizes, got {len(sizes)}", field="block sizes")
    if c.size != m:
        raise ProblemFileError(f"expected {m} objective entries, got {c.size}", field="c")

    F = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    for lineno, line in enumerate(body[4:], start=5):
        toks = _SEPARATORS.sub(" ", line).split()
        try:
            i, k, r, s = (int(t) for t in toks[:4])
            v = float(toks[4])
        except (ValueError, IndexError) as e:
            raise ProblemFileError(f"malformed entry line {line!r}", field=f"line {lineno}") from e
        if not (0 <= i <= m and 1 <= k <= nblocks):
            raise ProblemFileError(f"matrix {i} block {k} out of range", field=f"line {lineno}")
        size = abs(sizes[k - 1])
        if not (1 <= r <= size and 1 <= s <= size):
            raise ProblemFileError(f"entry ({r}, {s}) outside block of size {size}", field=f"line {lineno}")
        if sizes[k - 1] < 0 and r != s:
            raise ProblemFileError("off-diagonal entry in a diagonal block", field=f"line {lineno}")
        F[i][k - 1][r - 1, s - 1] = v
        # only one triangle is listed
        F[i][k - 1][s - 1, r - 1] = v
    return SdpaData(c=c, block_sizes=sizes, F=F, comments=tuple(comments))
