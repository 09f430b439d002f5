"""JSON problem files.

    {
      "schema_version": 1,
      "task": "feasibility",
      "name": "optional label",
      "payload": { ... task specific ... }
    }

Matrices are row-major nested lists whose entries are numbers or ``[re, im]`` pairs;
observables may also be Pauli strings such as ``"X"`` or ``"ZZ"``; states may be given
as kets (``*_ket`` keys, complex vectors).  Validation never calls the solver.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ProblemFileError
from .estimation import InfeasibilityCertificate, MeasurementRecord
from .marginal import PAIR_LABELS, MarginalSpec
from .operators import (
    DensityOperator,
    HermitianOperator,
    SubsystemShape,
    hermitian_from_literal,
    ket_to_density,
    parse_vector_literal,
    pauli_string,
)

SCHEMA_VERSION = 1

TASKS = (
    "feasibility",
    "intervals",
    "relax-linf",
    "relax-l1",
    "certificate",
    "verify-certificate",
    "trace-distance",
    "fidelity-pure",
    "fidelity-mixed",
    "property-range",
    "marginal",
    "marginal-eps",
    "marginal-purefid",
    "marginal-dual",
)
Task = Literal[
    "feasibility",
    "intervals",
    "relax-linf",
    "relax-l1",
    "certificate",
    "verify-certificate",
    "trace-distance",
    "fidelity-pure",
    "fidelity-mixed",
    "property-range",
    "marginal",
    "marginal-eps",
    "marginal-purefid",
    "marginal-dual",
]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True, frozen=True)


def _observable(v: Any) -> HermitianOperator:
    if isinstance(v, HermitianOperator):
        return v
    if isinstance(v, str):
        return pauli_string(v)
    return hermitian_from_literal(v)


def _state(matrix: Any, ket: Any, what: str) -> DensityOperator | None:
    if matrix is not None and ket is not None:
        raise ValueError(f"give either {what} or {what}_ket, not both")
    if ket is not None:
        return DensityOperator(HermitianOperator(ket_to_density(parse_vector_literal(ket))))
    if matrix is not None:
        return DensityOperator(hermitian_from_literal(matrix))
    return None


class RecordModel(_Model):
    observable: HermitianOperator
    value: float
    half_width: float | None = Field(default=None, ge=0)
    label: str = ""

    @field_validator("observable", mode="before")
    @classmethod
    def _parse_observable(cls, v):
        return _observable(v)

    def to_record(self) -> MeasurementRecord:
        return MeasurementRecord(self.observable, self.value, self.half_width, self.label)


class RecordsPayload(_Model):
    records: list[RecordModel] = Field(default_factory=list)
    dim: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _same_dims(self):
        dims = [r.observable.dim for r in self.records]
        ref = self.dim if self.dim is not None else (dims[0] if dims else None)
        for k, d in enumerate(dims):
            if d != ref:
                first = "dim" if self.dim is not None else "records[0]"
                raise ValueError(
                    f"inconsistent observable dimensions: {first} has dim {ref}, records[{k}] has dim {d}"
                )
        return self

    def to_records(self) -> list[MeasurementRecord]:
        return [r.to_record() for r in self.records]

    @property
    def data_dim(self) -> int | None:
        if self.dim is not None:
            return self.dim
        return self.records[0].observable.dim if self.records else None


class EstimationPayload(RecordsPayload):
    @model_validator(mode="after")
    def _nonempty(self):
        if not self.records:
            raise ValueError("at least one record is required")
        return self


class IntervalsPayload(EstimationPayload):
    @model_validator(mode="after")
    def _widths(self):
        for k, r in enumerate(self.records):
            if r.half_width is None:
                raise ValueError(f"records[{k}] needs a half_width")
        return self


class CertificateModel(_Model):
    z: float
    t: list[float]

    def to_certificate(self) -> InfeasibilityCertificate:
        return InfeasibilityCertificate(self.z, tuple(self.t))


class VerifyPayload(EstimationPayload):
    certificate: CertificateModel

    @model_validator(mode="after")
    def _lengths(self):
        if len(self.certificate.t) != len(self.records):
            raise ValueError(f"certificate.t has {len(self.certificate.t)} entries for {len(self.records)} records")
        return self


class TargetPayload(RecordsPayload):
    target: Any = None
    target_ket: Any = None

    @model_validator(mode="after")
    def _target(self):
        state = _state(self.target, self.target_ket, "target")
        if state is None:
            raise ValueError("target or target_ket is required")
        if self.records and state.dim != self.data_dim:
            raise ValueError(f"target has dim {state.dim}, records have dim {self.data_dim}")
        return self

    def target_state(self) -> DensityOperator:
        return _state(self.target, self.target_ket, "target")


class PropertyPayload(RecordsPayload):
    observable: HermitianOperator

    @field_validator("observable", mode="before")
    @classmethod
    def _parse_observable(cls, v):
        return _observable(v)

    @model_validator(mode="after")
    def _dims(self):
        if self.records and self.observable.dim != self.data_dim:
            raise ValueError(f"observable has dim {self.observable.dim}, records have dim {self.data_dim}")
        return self


class MarginalPayload(_Model):
    dims: tuple[int, int, int] = (2, 2, 2)
    targets: dict[str, Any] = Field(default_factory=dict)
    target_kets: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _spec(self):
        labels = set(self.targets) | set(self.target_kets)
        for label in labels:
            if label not in PAIR_LABELS:
                raise ValueError(f"unknown pair label {label!r}; expected one of {sorted(PAIR_LABELS)}")
        if not labels:
            raise ValueError("at least one target is required")
        self.to_spec()
        return self

    def to_spec(self) -> MarginalSpec:
        states = {}
        for label in PAIR_LABELS:
            s = _state(self.targets.get(label), self.target_kets.get(label), f"targets.{label}")
            if s is not None:
                states[label] = s
        return MarginalSpec(SubsystemShape(self.dims), states)


class MarginalEpsPayload(MarginalPayload):
    eps: float = Field(ge=0)
    distance: Literal["trace", "operator", "fidelity"] = "trace"
    bisect: bool = False


class PureMarginalPayload(_Model):
    dims: tuple[int, int, int] = (2, 2, 2)
    psi_xy: list[Any]
    psi_yz: list[Any]

    @model_validator(mode="after")
    def _dims(self):
        dx, dy, dz = self.dims
        for name, want in (("psi_xy", dx * dy), ("psi_yz", dy * dz)):
            got = len(getattr(self, name))
            if got != want:
                raise ValueError(f"{name} has {got} entries, dims {self.dims} need {want}")
            parse_vector_literal(getattr(self, name))
        return self

    def kets(self) -> tuple[np.ndarray, np.ndarray]:
        return parse_vector_literal(self.psi_xy), parse_vector_literal(self.psi_yz)


PAYLOADS: dict[str, type[_Model]] = {
    "feasibility": EstimationPayload,
    "intervals": IntervalsPayload,
    "relax-linf": EstimationPayload,
    "relax-l1": EstimationPayload,
    "certificate": EstimationPayload,
    "verify-certificate": VerifyPayload,
    "trace-distance": TargetPayload,
    "fidelity-pure": TargetPayload,
    "fidelity-mixed": TargetPayload,
    "property-range": PropertyPayload,
    "marginal": MarginalPayload,
    "marginal-eps": MarginalEpsPayload,
    "marginal-purefid": PureMarginalPayload,
    "marginal-dual": PureMarginalPayload,
}


class ProblemFile(_Model):
    schema_version: Literal[1]
    task: Task
    name: str = ""
    payload: dict[str, Any] = Field(default_factory=dict)


@dataclass(frozen=True)
class Problem:
    """A validated problem: envelope plus typed payload."""

    task: str
    name: str
    payload: _Model
    path: Path | None = None


def _field(loc) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def _error(e: ValidationError, prefix: str = "") -> ProblemFileError:
    err = e.errors()[0]
    loc = _field(err.get("loc", ()))
    field = f"{prefix}.{loc}" if prefix and loc else (prefix or loc or None)
    msg = str(err.get("msg", "invalid value")).removeprefix("Value error, ")
    return ProblemFileError(msg, field=field)


def parse_problem(raw: Any, path: Path | None = None) -> Problem:
    if not isinstance(raw, dict):
        raise ProblemFileError("top level must be a JSON object")
    try:
        env = ProblemFile.model_validate(raw)
    except ValidationError as e:
        raise _error(e) from e
    try:
        payload = PAYLOADS[env.task].model_validate(env.payload)
    except ValidationError as e:
        raise _error(e, "payload") from e
    return Problem(task=env.task, name=env.name or (path.stem if path else env.task), payload=payload, path=path)


def load_problem(path: Path | str) -> Problem:
    """Read and validate a UTF-8 JSON problem file; errors name the offending field."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8-sig"))
    except OSError as e:
        raise ProblemFileError(f"cannot read {p}: {e}") from e
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_problem(raw, p)
