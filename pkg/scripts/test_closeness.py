import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from qsdp.closeness import (
    QuantityKind,
    fidelity_pure_range,
    max_sqrt_fidelity,
    min_trace_distance,
    property_range,
    sqrt_fidelity,
    trace_distance,
)
from qsdp.errors import InfeasibleDataError, ShapeMismatchError, TargetNotPureError
from qsdp.estimation import MeasurementRecord, records_from_state, verify_certificate
from qsdp.operators import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityOperator,
    ket_to_density,
    pauli_string,
    random_density,
    random_pure,
    root_fidelity,
)

np_rng = np.random.default_rng(11)
PAULI_XYZ = (PAULI_X, PAULI_Y, PAULI_Z)
PLUS = np.array([1, 1]) / np.sqrt(2)
ZERO = np.array([1, 0])


def test_trace_distance_closed_form():
    assert trace_distance(ket_to_density(ZERO), ket_to_density([0, 1])) == pytest.approx(1.0)
    assert trace_distance(ket_to_density(ZERO), ket_to_density(PLUS)) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ShapeMismatchError):
        trace_distance(np.eye(2) / 2, np.eye(3) / 3)


def test_min_trace_distance_with_full_tomography():
    for k in range(100):
        rho0 = random_density(2, np_rng)
        target = DensityOperator.from_ket(random_pure(2, np_rng)) if k % 2 else random_density(2, np_rng)
        data = records_from_state(rho0, PAULI_XYZ)
        res = min_trace_distance(data, target)
        assert res.value == pytest.approx(trace_distance(rho0, target), abs=1e-6)
        assert np.allclose(res.state.matrix, rho0.matrix, atol=1e-5)


def test_min_trace_distance_examples():
    # qubit trace distance is half the Bloch distance: closest compatible point is (0.6, 0, 0.8)
    res = min_trace_distance([MeasurementRecord(PAULI_Z, 0.8)], ket_to_density(PLUS))
    assert res.value == pytest.approx(0.5 * np.sqrt(0.8), abs=1e-6)
    assert PAULI_X.expectation(res.state) == pytest.approx(0.6, abs=1e-5)

    # target itself is compatible
    sigma = random_density(3, np_rng)
    res = min_trace_distance([], sigma)
    assert res.value == pytest.approx(0.0, abs=1e-6)


def test_fidelity_pure_range():
    lo, hi = fidelity_pure_range([MeasurementRecord(PAULI_X, 0.0)], ket_to_density(ZERO))
    assert lo.value == pytest.approx(0.0, abs=1e-6)
    assert hi.value == pytest.approx(1.0, abs=1e-6)

    lo, hi = fidelity_pure_range([MeasurementRecord(PAULI_Z, 0.5)], ket_to_density(ZERO))
    assert lo.value == pytest.approx(0.75, abs=1e-6)
    assert hi.value == pytest.approx(0.75, abs=1e-6)

    with pytest.raises(TargetNotPureError):
        fidelity_pure_range([MeasurementRecord(PAULI_Z, 0.5)], np.eye(2) / 2)


def test_sqrt_fidelity_sdp_matches_closed_form():
    for k in range(200):
        d = 2 if k % 2 else 3
        rho, sigma = random_density(d, np_rng), random_density(d, np_rng)
        closed = sqrt_fidelity(rho, sigma)
        assert closed == pytest.approx(root_fidelity(rho, sigma))
        assert sqrt_fidelity(rho, sigma, method="sdp") == pytest.approx(closed, abs=1e-6)
        assert sqrt_fidelity(sigma, rho) == pytest.approx(closed, abs=1e-6)
    with pytest.raises(ValueError):
        sqrt_fidelity(rho, sigma, method="newton")


def test_max_sqrt_fidelity():
    for _ in range(10):
        rho0, sigma = random_density(2, np_rng), random_density(2, np_rng)
        res = max_sqrt_fidelity(records_from_state(rho0, PAULI_XYZ), sigma)
        assert res.value == pytest.approx(root_fidelity(rho0, sigma), abs=1e-5)

    # no data: the target itself
    sigma = random_density(3, np_rng)
    assert max_sqrt_fidelity([], sigma).value == pytest.approx(1.0, abs=1e-6)

    # pure targets use the linear problem
    data = [MeasurementRecord(PAULI_Z, 0.5)]
    res = max_sqrt_fidelity(data, ket_to_density(ZERO))
    assert res.value == pytest.approx(np.sqrt(0.75), abs=1e-6)
    assert res.kind is QuantityKind.SQRT_FIDELITY_PURE
    assert max_sqrt_fidelity([], np.eye(2) / 2).kind is QuantityKind.SQRT_FIDELITY_MIXED


def test_property_range():
    lo, hi = property_range([MeasurementRecord(PAULI_Z, 0.6)], PAULI_X)
    assert lo == pytest.approx(-0.8, abs=1e-6)
    assert hi == pytest.approx(0.8, abs=1e-6)

    rng = property_range([MeasurementRecord(PAULI_Z, 0.2)], PAULI_Z)
    assert rng.min == pytest.approx(0.2, abs=1e-7)
    assert rng.max == pytest.approx(0.2, abs=1e-7)

    # XX and ZZ are diagonal in the Bell basis; <XX> = 0.5 still leaves ZZ anywhere in [-1, 1]
    lo, hi = property_range([MeasurementRecord(pauli_string("XX"), 0.5)], pauli_string("ZZ"))
    assert lo == pytest.approx(-1.0, abs=1e-6)
    assert hi == pytest.approx(1.0, abs=1e-6)

    # no data: spectrum of the observable
    h = np.diag([-0.5, 0.25, 2.0])
    lo, hi = property_range([], h)
    assert (lo, hi) == pytest.approx((-0.5, 2.0), abs=1e-6)


def test_infeasible_data_raise_with_certificate():
    data = [MeasurementRecord(PAULI_X, 0.9), MeasurementRecord(PAULI_Y, 0.5)]
    for call in (
        lambda: min_trace_distance(data, np.eye(2) / 2),
        lambda: fidelity_pure_range(data, ket_to_density(ZERO)),
        lambda: max_sqrt_fidelity(data, np.eye(2) / 2),
        lambda: property_range(data, PAULI_Z),
    ):
        with pytest.raises(InfeasibleDataError) as e:
            call()
        assert e.value.certificate is not None
        assert verify_certificate(e.value.certificate, data).valid


def test_infeasible_interval_data_with_exact_records():
    data = [MeasurementRecord(PAULI_X, 0.9, 0.01), MeasurementRecord(PAULI_Y, 0.5)]
    with pytest.raises(InfeasibleDataError) as e:
        property_range(data, PAULI_Z)
    assert verify_certificate(e.value.certificate, data).valid


def test_sqrt_fidelity_examples():
    assert sqrt_fidelity(np.eye(2) / 2, ket_to_density(ZERO)) == pytest.approx(1 / np.sqrt(2))
    assert sqrt_fidelity(ket_to_density(ZERO), ket_to_density([0, 1])) == pytest.approx(0.0, abs=1e-9)
    assert sqrt_fidelity(np.eye(2) / 2, np.eye(2) / 2, method="sdp") == pytest.approx(1.0, abs=1e-6)


def test_trace_distance_sandwiched_by_fidelity():
    for k in range(200):
        d = 2 if k % 2 else 4
        rho, sigma = random_density(d, np_rng), random_density(d, np_rng)
        f = root_fidelity(rho, sigma)
        t = trace_distance(rho, sigma)
        assert 1 - f <= t + 1e-9
        assert t <= np.sqrt(max(0.0, 1 - f**2)) + 1e-9


def test_fidelity_is_concave_in_first_argument():
    for _ in range(100):
        rho1, rho2, sigma = (random_density(3, np_rng) for _ in range(3))
        lam = np_rng.uniform()
        mixed = lam * rho1.matrix + (1 - lam) * rho2.matrix
        f1, f2, fm = (root_fidelity(r, sigma) for r in (rho1.matrix, rho2.matrix, mixed))
        assert fm >= lam * f1 + (1 - lam) * f2 - 1e-9
        assert fm**2 >= lam * f1**2 + (1 - lam) * f2**2 - 1e-9
