import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from qsdp.errors import InvalidStateError, NotHermitianError, ShapeMismatchError
from qsdp.operators import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityOperator,
    HermitianOperator,
    SubsystemShape,
    bloch_to_state,
    block_embed_2x2,
    eig_bounds,
    embed_kept,
    hermitian_from_literal,
    ket_to_density,
    matrix_to_literal,
    nearest_density,
    parse_matrix_literal,
    partial_trace,
    partial_trace_kraus,
    pauli_string,
    ptrace_matrix,
    random_density,
    random_hermitian,
    random_pure,
    root_fidelity,
    schmidt_coefficients,
    state_to_bloch,
    tensor,
    trace_norm,
)

np_rng = np.random.default_rng(20240611)
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_pauli_string_is_kron():
    assert np.allclose(pauli_string("XZ").matrix, np.kron(PAULI_X.matrix, PAULI_Z.matrix))
    assert np.allclose(tensor(PAULI_Y, PAULI_X).matrix, np.kron(PAULI_Y.matrix, PAULI_X.matrix))
    with pytest.raises(ValueError):
        pauli_string("XQ")


def test_hermitian_rejects_asymmetry_and_names_entry():
    m = np.array([[1, 0, 0], [0, 1, 2], [0, 0, 1]], dtype=complex)
    with pytest.raises(NotHermitianError) as e:
        HermitianOperator(m)
    assert e.value.entry == (1, 2)
    assert "(1, 2)" in str(e.value)
    # tiny asymmetry is absorbed
    h = HermitianOperator(np.array([[1, 1e-12], [0, 1]]))
    assert np.allclose(h.matrix, h.matrix.conj().T)
    assert not h.matrix.flags.writeable


def test_density_operator_checks():
    with pytest.raises(InvalidStateError):
        DensityOperator(np.eye(2))
    with pytest.raises(InvalidStateError):
        DensityOperator(bloch_to_state((0.9, 0.5, 0)))
    assert DensityOperator.from_ket([1, 1]).is_pure()
    assert not DensityOperator(np.eye(2) / 2).is_pure()


def test_unphysical_bloch_vector_has_negative_eigenvalue():
    lam = bloch_to_state((0.9, 0.5, 0)).eigvalsh()
    assert lam[0] == pytest.approx((1 - np.sqrt(1.06)) / 2, abs=1e-12)
    assert lam[0] < 0


def test_bloch_roundtrip_on_qubits():
    for _ in range(1000):
        rho = random_density(2, np_rng)
        r = state_to_bloch(rho)
        assert np.allclose(bloch_to_state(r).matrix, rho.matrix)
        assert r.norm <= 1 + 1e-12


def test_partial_trace_leftmost_slowest():
    a, b = random_density(2, np_rng), random_density(3, np_rng)
    ab = np.kron(a.matrix, b.matrix)
    assert np.allclose(ptrace_matrix(ab, (2, 3), [0]), a.matrix)
    assert np.allclose(ptrace_matrix(ab, (2, 3), [1]), b.matrix)
    op = partial_trace(HermitianOperator(ab), SubsystemShape((2, 3)), [1])
    assert np.allclose(op.matrix, b.matrix)
    with pytest.raises(ShapeMismatchError):
        ptrace_matrix(ab, (2, 2), [0])


def test_embed_kept_is_adjoint_of_partial_trace():
    dims = (2, 3, 2)
    for keep in ([0, 1], [0, 2], [1, 2], [1]):
        kd = int(np.prod([dims[i] for i in keep]))
        for _ in range(5):
            rho = random_density(12, np_rng).matrix
            k = random_hermitian(kd, np_rng).matrix
            lhs = np.trace(embed_kept(k, dims, keep) @ rho)
            rhs = np.trace(k @ ptrace_matrix(rho, dims, keep))
            assert abs(lhs - rhs) < 1e-10


def test_kraus_partial_trace_matches_einsum():
    dims = (2, 2, 3)
    rho = random_density(12, np_rng).matrix
    for keep in ([0, 1], [0, 2], [1, 2]):
        out = sum(k @ rho @ k.conj().T for k in partial_trace_kraus(dims, keep))
        assert np.allclose(out, ptrace_matrix(rho, dims, keep))


def test_schmidt_coefficients():
    assert np.allclose(schmidt_coefficients(BELL, (2, 2)), [0.5, 0.5])
    prod = np.kron([1, 0], [0.6, 0.8])
    assert np.allclose(schmidt_coefficients(prod, (2, 2)), [1, 0])
    psi = random_pure(6, np_rng)
    assert schmidt_coefficients(psi, (2, 3)).sum() == pytest.approx(1.0)


def test_root_fidelity_and_trace_norm():
    for _ in range(20):
        rho, sigma = random_density(3, np_rng), random_density(3, np_rng)
        f = root_fidelity(rho, sigma)
        assert 0 <= f <= 1 + 1e-10
        assert root_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-7)
        psi = random_pure(3, np_rng)
        expect = float(np.real(psi.conj() @ rho.matrix @ psi))
        assert root_fidelity(rho, ket_to_density(psi)) ** 2 == pytest.approx(expect, abs=1e-7)
        h = random_hermitian(4, np_rng).matrix
        assert trace_norm(h) == pytest.approx(np.abs(np.linalg.eigvalsh(h)).sum())


def test_nearest_density_cleans_small_noise_only():
    noisy = np.diag([1.0 + 1e-9, -1e-9])
    out = nearest_density(noisy)
    assert out.eigvalsh()[0] >= 0
    assert np.trace(out.matrix).real == pytest.approx(1.0)
    with pytest.raises(InvalidStateError):
        nearest_density(np.diag([1.2, -0.2]))


def test_matrix_literal_formats():
    m = parse_matrix_literal([[1, [0, -1]], [[0, 1], 2]])
    assert m[0, 1] == -1j and m[1, 0] == 1j
    h = hermitian_from_literal(matrix_to_literal(PAULI_Y.matrix))
    assert np.allclose(h.matrix, PAULI_Y.matrix)
    with pytest.raises(ValueError, match=r"entry \(0, 1\)"):
        parse_matrix_literal([[1, "x"], [0, 1]])
    with pytest.raises(ValueError, match="row 1"):
        parse_matrix_literal([[1, 0], [0]])
    with pytest.raises(NotHermitianError):
        hermitian_from_literal([[0, 1], [0, 0]])


def test_tensor_and_partial_trace_examples():
    assert np.allclose(tensor(PAULI_Z, PAULI_I).matrix, np.diag([1, 1, -1, -1]))
    xx = tensor(PAULI_X, PAULI_X).matrix
    assert np.allclose(xx @ BELL, BELL)
    assert np.allclose(ptrace_matrix(ket_to_density(BELL), (2, 2), [0]), np.eye(2) / 2)


def test_eig_bounds():
    assert eig_bounds(np.diag([1.0, 2.0, 3.0])) == pytest.approx((1.0, 3.0))
    z, t = -0.4, np.array([0.3, -0.5])
    w = z * np.eye(2) + t[0] * PAULI_X.matrix + t[1] * PAULI_Y.matrix
    assert eig_bounds(w) == pytest.approx((z - np.linalg.norm(t), z + np.linalg.norm(t)), abs=1e-12)
    for _ in range(20):
        h = random_hermitian(6, np_rng).matrix
        # roots of the characteristic polynomial
        roots = np.sort(np.roots(np.poly(h)).real)
        lo, hi = eig_bounds(h)
        assert lo == pytest.approx(roots[0], abs=1e-6)
        assert hi == pytest.approx(roots[-1], abs=1e-6)


def test_block_embed_2x2():
    m = block_embed_2x2(np.eye(2) / 2, 0, np.eye(2) / 2)
    assert np.allclose(m.matrix, np.eye(4) / 2)
    rho = ket_to_density(random_pure(3, np_rng))
    lam = np.linalg.eigvalsh(block_embed_2x2(rho, rho, rho).matrix)
    assert lam[0] >= -1e-12
    assert lam[-1] == pytest.approx(2.0)
    with pytest.raises(ShapeMismatchError):
        block_embed_2x2(np.eye(2), np.zeros((3, 3)), np.eye(2))
