import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from qsdp.errors import ProblemFileError
from qsdp.problem_file import TASKS, load_problem, parse_problem

PROBLEMS = ROOT / "problems"


def envelope(task: str, payload: dict) -> dict:
    return {"schema_version": 1, "task": task, "payload": payload}


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_problems_validate(path):
    problem = load_problem(path)
    assert problem.task in TASKS
    assert problem.path == path


def test_records_accept_pauli_strings_and_literals():
    p = parse_problem(envelope("feasibility", {
        "records": [
            {"observable": "Y", "value": 0.1, "label": "y"},
            {"observable": [[0, [0, -1]], [[0, 1], 0]], "value": 0.1},
        ]
    }))
    recs = p.payload.to_records()
    assert np.allclose(recs[0].observable.matrix, recs[1].observable.matrix)
    assert recs[0].label == "y"
    assert p.name == "feasibility"


def test_non_hermitian_entry_is_named():
    raw = envelope("feasibility", {"records": [{"observable": [[0, 1], [0, 0]], "value": 0.0}]})
    with pytest.raises(ProblemFileError) as e:
        parse_problem(raw)
    assert e.value.field == "payload.records[0].observable"
    assert "(0, 1)" in str(e.value)


def test_dimension_mismatch_names_records():
    raw = envelope("feasibility", {"records": [
        {"observable": "X", "value": 0.0},
        {"observable": "XX", "value": 0.0},
    ]})
    with pytest.raises(ProblemFileError, match=r"records\[1\] has dim 4"):
        parse_problem(raw)


def test_payload_errors():
    with pytest.raises(ProblemFileError, match="target or target_ket"):
        parse_problem(envelope("trace-distance", {"records": [{"observable": "Z", "value": 0.1}]}))
    with pytest.raises(ProblemFileError, match="not both"):
        parse_problem(envelope("trace-distance", {"target": [[1, 0], [0, 0]], "target_ket": [1, 0]}))
    with pytest.raises(ProblemFileError, match="half_width"):
        parse_problem(envelope("intervals", {"records": [{"observable": "Z", "value": 0.1}]}))
    with pytest.raises(ProblemFileError, match="at least one record"):
        parse_problem(envelope("feasibility", {"records": []}))
    with pytest.raises(ProblemFileError, match="certificate.t has 1 entries"):
        parse_problem(envelope("verify-certificate", {
            "records": [{"observable": "X", "value": 0.9}, {"observable": "Y", "value": 0.5}],
            "certificate": {"z": -1.0, "t": [1.0]},
        }))
    with pytest.raises(ProblemFileError, match="psi_xy has 2 entries"):
        parse_problem(envelope("marginal-dual", {"psi_xy": [1, 0], "psi_yz": [1, 0, 0, 0]}))


def test_marginal_payload():
    bell = [0.7071067811865476, 0, 0, 0.7071067811865476]
    p = parse_problem(envelope("marginal-eps", {"target_kets": {"YZ": bell}, "eps": 0.2, "distance": "operator"}))
    spec = p.payload.to_spec()
    assert list(spec.targets) == ["YZ"]
    assert p.payload.eps == 0.2

    with pytest.raises(ProblemFileError, match="unknown pair label"):
        parse_problem(envelope("marginal", {"targets": {"XW": np.eye(4).tolist()}}))
    with pytest.raises(ProblemFileError, match="at least one target"):
        parse_problem(envelope("marginal", {}))
    with pytest.raises(ProblemFileError) as e:
        parse_problem(envelope("marginal-eps", {"target_kets": {"XY": bell}, "eps": -0.1}))
    assert e.value.field == "payload.eps"


def test_envelope_errors():
    with pytest.raises(ProblemFileError) as e:
        parse_problem({"schema_version": 1, "task": "tomography", "payload": {}})
    assert e.value.field == "task"
    with pytest.raises(ProblemFileError) as e:
        parse_problem({"schema_version": 2, "task": "feasibility", "payload": {}})
    assert e.value.field == "schema_version"
    with pytest.raises(ProblemFileError) as e:
        parse_problem({"schema_version": 1, "task": "feasibility", "payload": {}, "extra": 1})
    assert e.value.field == "extra"
    with pytest.raises(ProblemFileError, match="JSON object"):
        parse_problem([1, 2])


def test_load_problem_reads_bom_and_reports_json_errors(tmp_path):
    p = tmp_path / "bom.json"
    raw = envelope("feasibility", {"records": [{"observable": "Z", "value": 0.3}]})
    p.write_text(json.dumps(raw), encoding="utf-8-sig")
    problem = load_problem(p)
    assert problem.name == "bom"

    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1,\n "task": }', encoding="utf-8")
    with pytest.raises(ProblemFileError, match="line 2"):
        load_problem(bad)
    with pytest.raises(ProblemFileError, match="cannot read"):
        load_problem(tmp_path / "missing.json")
