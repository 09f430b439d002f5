import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

import qsdp.estimation as estimation
from qsdp.errors import CertificateUnavailable, ShapeMismatchError
from qsdp.estimation import (
    InfeasibilityCertificate,
    MeasurementRecord,
    Verdict,
    anticommuting_certificate,
    expectations,
    extract_certificate,
    feasibility,
    feasibility_intervals,
    feasibility_problem,
    records_from_state,
    relax_l1,
    relax_linf,
    verify_certificate,
)
from qsdp.operators import PAULI_X, PAULI_Y, PAULI_Z, pauli_string, random_density, random_hermitian
from qsdp.sdp import check_feasible

np_rng = np.random.default_rng(31)
PAULI_XYZ = (PAULI_X, PAULI_Y, PAULI_Z)


def pauli_records(values, widths=None):
    widths = widths or [None] * len(values)
    return [MeasurementRecord(op, v, w) for op, v, w in zip(PAULI_XYZ, values, widths)]


def bloch_disk_points(n=601, angles=4000):
    """Square grid clipped to the unit disk plus dense samples of its boundary."""
    g = np.linspace(-1, 1, n)
    xx, yy = np.meshgrid(g, g)
    inside = xx**2 + yy**2 <= 1
    theta = np.linspace(0, 2 * np.pi, angles, endpoint=False)
    x = np.concatenate([xx[inside], np.cos(theta)])
    y = np.concatenate([yy[inside], np.sin(theta)])
    return x, y


DISK_X, DISK_Y = bloch_disk_points()


def test_opening_data_is_infeasible_with_verified_certificate():
    data = pauli_records([0.9, 0.5])
    out = feasibility(data)
    assert out.verdict is Verdict.INFEASIBLE
    assert out.state is None
    check = verify_certificate(out.certificate, data)
    assert check.valid
    assert check.beta > 0
    assert check.lambda_max <= 1e-9
    assert sum(abs(t) for t in out.certificate.t) <= 1 + 1e-9


def test_anticommuting_certificate_value():
    data = pauli_records([0.9, 0.5])
    cert = anticommuting_certificate(data)
    m = np.array([0.9, 0.5])
    expect = (m @ m - np.linalg.norm(m)) / np.abs(m).sum()
    check = verify_certificate(cert, data)
    assert check.valid
    assert check.beta == pytest.approx(expect, abs=1e-6)
    assert cert.t == pytest.approx((0.9 / 1.4, 0.5 / 1.4))
    assert check.beta == pytest.approx(0.021741, abs=1e-6)
    with pytest.raises(CertificateUnavailable):
        anticommuting_certificate([MeasurementRecord(pauli_string("XX"), 1.0), MeasurementRecord(pauli_string("ZZ"), 1.0)])
    with pytest.raises(CertificateUnavailable):
        anticommuting_certificate(pauli_records([0.3, 0.2]))


def test_mixed_origin_has_maximally_mixed_witness():
    out = feasibility(pauli_records([0.0, 0.0, 0.0]))
    assert out.verdict is Verdict.FEASIBLE
    assert np.allclose(out.state.matrix, np.eye(2) / 2, atol=1e-6)


@pytest.mark.parametrize("n_obs", [2, 3])
def test_pauli_datasets_match_bloch_ball(n_obs):
    done = 0
    while done < 500:
        m = np_rng.uniform(-1.2, 1.2, size=n_obs)
        r = float(np.linalg.norm(m))
        if abs(r - 1) < 1e-6:
            continue
        data = pauli_records(list(m))
        out = feasibility(data)
        if r < 1:
            assert out.verdict is Verdict.FEASIBLE, m
            assert np.abs(expectations(out.state, data) - m).max() <= 1e-5
        else:
            assert out.verdict is Verdict.INFEASIBLE, m
            assert verify_certificate(out.certificate, data).valid
        done += 1


def test_data_from_states_is_never_declared_infeasible():
    for k in range(1000):
        d = 2 if k % 2 else 3
        rho = random_density(d, np_rng)
        obs = [random_hermitian(d, np_rng) for _ in range(3)]
        data = records_from_state(rho, obs)
        out = feasibility(data)
        assert out.verdict is Verdict.FEASIBLE
        rep = check_feasible(feasibility_problem(data), {"rho": out.state}, tol=1e-5)
        assert rep.feasible


def test_intervals():
    out = feasibility_intervals(pauli_records([0.9, 0.5], [0.2, 0.2]))
    assert out.verdict is Verdict.FEASIBLE
    r = np.array([PAULI_X.expectation(out.state), PAULI_Y.expectation(out.state)])
    assert np.all(np.abs(r - [0.9, 0.5]) <= 0.2 + 1e-6)
    assert np.linalg.norm(r) <= 1 + 1e-6

    zero = feasibility_intervals(pauli_records([0.9, 0.5], [0.0, 0.0]))
    assert zero.verdict is Verdict.INFEASIBLE
    assert verify_certificate(zero.certificate, pauli_records([0.9, 0.5], [0.0, 0.0])).valid

    narrow = pauli_records([0.9, 0.5], [0.01, 0.01])
    out = feasibility_intervals(narrow)
    assert out.verdict is Verdict.INFEASIBLE
    # the certificate pays for the widths
    assert verify_certificate(out.certificate, narrow).valid

    with pytest.raises(ValueError, match="half_width"):
        feasibility_intervals(pauli_records([0.1, 0.2]))


def test_relax_linf_against_grid():
    for _ in range(50):
        m = np_rng.uniform(-1.5, 1.5, size=2)
        out = relax_linf(pauli_records(list(m)))
        oracle = np.maximum(np.abs(DISK_X - m[0]), np.abs(DISK_Y - m[1])).min()
        assert out.delta_star <= oracle + 1e-6
        assert oracle - out.delta_star <= 2e-3
        assert out.state is not None


def test_relax_l1_against_grid():
    for _ in range(50):
        m = np_rng.uniform(-1.5, 1.5, size=2)
        out = relax_l1(pauli_records(list(m)))
        oracle = 0.5 * (np.abs(DISK_X - m[0]) + np.abs(DISK_Y - m[1])).min()
        assert out.delta_star <= oracle + 1e-6
        assert oracle - out.delta_star <= 2e-3


def test_relax_examples():
    out = relax_l1([MeasurementRecord(PAULI_X, 1.5)])
    assert out.delta_star == pytest.approx(0.25, abs=1e-6)
    assert out.verdict is Verdict.INFEASIBLE

    out = relax_linf(pauli_records([0.9, 0.5]))
    # closest disk point in the max norm lies on the diagonal shift (0.9 - d, 0.5 - d)
    d = np.linspace(0, 1, 200001)
    inside = (0.9 - d) ** 2 + (0.5 - d) ** 2 <= 1
    assert out.delta_star == pytest.approx(d[inside].min(), abs=1e-5)
    assert verify_certificate(out.certificate, pauli_records([0.9, 0.5])).valid

    out = relax_linf(pauli_records([0.2, -0.1, 0.3]))
    assert out.verdict is Verdict.FEASIBLE
    assert out.delta_star <= 1e-6


def test_extract_certificate():
    data = pauli_records([0.8, 0.8, 0.1])
    cert = extract_certificate(data)
    assert verify_certificate(cert, data).valid
    with pytest.raises(CertificateUnavailable):
        extract_certificate(pauli_records([0.1, 0.1]))


def test_verify_rejects_bad_certificates():
    data = pauli_records([0.9, 0.5])
    # too heavy
    assert not verify_certificate(InfeasibilityCertificate(-1.0, (1.0, 1.0)), data).valid
    # W not negative semidefinite
    assert not verify_certificate(InfeasibilityCertificate(0.0, (0.6, 0.3)), data).valid
    # beta not positive
    assert not verify_certificate(InfeasibilityCertificate(-1.0, (0.5, 0.5)), data).valid
    with pytest.raises(ShapeMismatchError):
        verify_certificate(InfeasibilityCertificate(-1.0, (0.5,)), data)


def test_dimension_mismatch_names_records():
    data = [MeasurementRecord(PAULI_X, 0.1, label="a"), MeasurementRecord(pauli_string("XX"), 0.1, label="b")]
    with pytest.raises(ShapeMismatchError, match="record 1"):
        feasibility(data)


def test_record_validation():
    with pytest.raises(ValueError):
        MeasurementRecord(PAULI_X, float("nan"))
    with pytest.raises(ValueError):
        MeasurementRecord(PAULI_X, 0.1, -0.5)
    rec = MeasurementRecord(PAULI_X, 0.1, 0.2)
    assert rec.width == 0.2
    assert rec.exact().half_width is None


def test_certificate_bounds_every_state():
    data = pauli_records([0.9, 0.5])
    cert = feasibility(data).certificate
    for _ in range(1000):
        rho = random_density(2, np_rng)
        assert cert.z + np.dot(cert.t, expectations(rho, data)) <= 1e-9


def test_relax_linf_never_drops_when_records_are_added():
    for _ in range(30):
        m = np_rng.uniform(-1.5, 1.5, size=3)
        fewer = relax_linf(pauli_records(list(m[:2]))).delta_star
        more = relax_linf(pauli_records(list(m))).delta_star
        assert more >= fewer - 1e-6


def test_feasible_data_set_is_convex():
    for k in range(50):
        d = 2 if k % 2 else 3
        obs = [random_hermitian(d, np_rng) for _ in range(3)]
        m1 = np.array([rec.value for rec in records_from_state(random_density(d, np_rng), obs)])
        m2 = np.array([rec.value for rec in records_from_state(random_density(d, np_rng), obs)])
        lam = np_rng.uniform()
        mixed = [MeasurementRecord(op, float(v)) for op, v in zip(obs, lam * m1 + (1 - lam) * m2)]
        assert feasibility(mixed).verdict is Verdict.FEASIBLE


def test_closed_form_certificate_backs_up_the_solver(monkeypatch):
    data = pauli_records([0.9, 0.5])
    monkeypatch.setattr(estimation, "harvest_certificate", lambda sol, data: InfeasibilityCertificate(0.0, (0.0, 0.0)))
    out = feasibility(data)
    assert out.verdict is Verdict.INFEASIBLE
    assert out.certificate.t == pytest.approx(anticommuting_certificate(data).t)
    assert verify_certificate(out.certificate, data).valid
