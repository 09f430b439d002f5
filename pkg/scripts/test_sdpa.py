import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from qsdp.errors import ProblemFileError
from qsdp.operators import random_hermitian
from qsdp.sdp import SdpBuilder, scaled_trace, solve
from qsdp.sdpa import format_sdpa, read_sdpa, to_sdpa, write_sdpa

np_rng = np.random.default_rng(3)
ONE = np.eye(1)


def largest_eigenvalue_problem(h: np.ndarray):
    """min t s.t. t I - H >= 0."""
    d = h.shape[0]
    b = SdpBuilder("lambda-max")
    t = b.block("t", 1, real=True)
    b.lmi(-h, [scaled_trace(t, ONE, np.eye(d))], "t I >= H")
    b.minimize({t: ONE})
    return b.build()


def min_energy_problem(h: np.ndarray, sense: str = "min"):
    d = h.shape[0]
    b = SdpBuilder("energy")
    rho = b.block("rho", d)
    b.equality({rho: np.eye(d)}, 1.0, "trace")
    b.psd(rho)
    (b.minimize if sense == "min" else b.maximize)({rho: h})
    return b.build()


def test_format_layout():
    text = format_sdpa(min_energy_problem(np.diag([1.0, -1.0])))
    body = [line for line in text.splitlines() if not line.startswith('"')]
    # a 2x2 Hermitian block has 4 real coordinates; its LMI is embedded as 4x4
    assert body[0] == "4"
    assert body[1] == "2"
    assert body[2] == "4 -2"
    assert len(body[3].split()) == 4
    for line in body[4:]:
        i, k, r, s = (int(v) for v in line.split()[:4])
        assert r <= s
        assert 0 <= i <= 4 and k in (1, 2)


def test_read_back_matches_export():
    p = min_energy_problem(random_hermitian(3, np_rng).matrix)
    data = to_sdpa(p)
    back = read_sdpa(format_sdpa(p))
    assert back.block_sizes == data.block_sizes
    assert np.allclose(back.c, data.c)
    for mats, ref in zip(back.F, data.F):
        for a, b in zip(mats, ref):
            assert np.allclose(a, b)
    assert not back.negated
    assert read_sdpa(format_sdpa(min_energy_problem(np.eye(2), "max"))).negated


def test_reimported_problem_solves_to_the_same_value(tmp_path):
    for k in range(5):
        h = random_hermitian(3, np_rng).matrix
        if k % 2 == 0:
            h = h.real
        p = largest_eigenvalue_problem(h)
        path = write_sdpa(p, tmp_path / f"lmax-{k}.dat-s")
        sol = solve(read_sdpa(path).to_problem())
        assert sol.optimal
        assert sol.objective_value == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-6)
        assert sol.objective_value == pytest.approx(solve(p).objective_value, abs=1e-6)


def test_read_errors_name_the_place():
    with pytest.raises(ProblemFileError) as e:
        read_sdpa("1\n1\n")
    assert e.value.field == "header"

    with pytest.raises(ProblemFileError) as e:
        read_sdpa("1\n1\n2\n1.0\n0 1 1 1 1.0\n1 1 1 x 1.0\n")
    assert e.value.field == "line 6"

    with pytest.raises(ProblemFileError) as e:
        read_sdpa("1\n1\n2\n1.0\n1 1 3 3 1.0\n")
    assert "line 5" in str(e.value)

    with pytest.raises(ProblemFileError, match="diagonal"):
        read_sdpa("1\n1\n-2\n1.0\n1 1 1 2 1.0\n")

    with pytest.raises(ProblemFileError, match="block sizes"):
        read_sdpa("1\n2\n2\n1.0\n")


def test_braces_and_comments_are_tolerated():
    text = '"a comment\n* another\n1 = m\n1\n{2}\n{1.0}\n0 1 1 1 -1.0\n1 1 1 1 1.0\n1 1 2 2 1.0\n'
    data = read_sdpa(text)
    assert data.comments == ("a comment", "another")
    assert data.block_sizes == (2,)
    assert np.allclose(data.F[1][0], np.eye(2))
