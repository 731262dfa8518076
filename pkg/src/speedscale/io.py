"""JSON instance and schedule documents, and CSV benchmark reports.

Rationals are written as canonical "p/q" strings (plain integers when q = 1).
On input, JSON numbers are read as Decimal so decimal literals convert exactly.
"""

import csv
import io as _stdio
import json
from collections.abc import Sequence
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field
from pydantic import ValidationError as SchemaError

from .errors import InvalidInstance, InvalidJob, ParseError, ValidationError
from .model import ExecutionPiece, Instance, Job, Mode, Schedule, job_energies, total_energy

if TYPE_CHECKING:
    from .bench import RatioRecord

REPORT_HEADER = (
    "instance_id",
    "family",
    "n",
    "m",
    "alpha",
    "algorithm",
    "energy",
    "preemptive_lb",
    "ratio",
    "bound",
    "within_bound",
)


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int | Decimal):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"'{value}' is not a rational") from None
    raise ValueError(f"expected a rational, got {type(value).__name__}")


Rational = Annotated[Fraction, BeforeValidator(_to_fraction)]


def _plain(value: Any) -> Any:
    """Decimals back to floats, recursively, for values that are not rationals."""
    if isinstance(value, Decimal):
        return float(value)
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_plain(item) for item in value]
    return value


class _JobDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    id: Annotated[str, BeforeValidator(lambda v: str(v) if isinstance(v, int) else v)]
    work: Rational
    release: Rational
    deadline: Rational


class _InstanceDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: Annotated[float, BeforeValidator(_plain)]
    machines: int
    jobs: list[_JobDocument]
    metadata: Annotated[dict[str, Any], BeforeValidator(_plain)] = Field(default_factory=dict)


class _PieceDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    job: Annotated[str, BeforeValidator(lambda v: str(v) if isinstance(v, int) else v)]
    machine: int
    start: Rational
    end: Rational
    speed: Rational


class _ScheduleDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: Mode
    pieces: list[_PieceDocument]
    energy: float | None = None


def _load(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", line=e.lineno) from e


def _schema_error(e: SchemaError) -> ParseError:
    first = e.errors()[0]
    field = ".".join(str(part) for part in first["loc"])
    return ParseError(first["msg"], field=field or None)


def format_rational(value: Fraction) -> str:
    """Canonical lowest-terms text of a rational."""
    return str(value)


def parse_instance(text: str) -> Instance:
    """Build an Instance from its JSON document.

    Args:
        text: JSON with "alpha", "machines", "jobs" and optionally "metadata".

    Returns:
        The instance, times and works as exact fractions.

    Raises:
        ParseError: on malformed JSON or a document of the wrong shape.
        ValidationError: when a job or the instance violates its invariants.
    """
    try:
        document = _InstanceDocument.model_validate(_load(text))
    except SchemaError as e:
        raise _schema_error(e) from e

    try:
        jobs = tuple(Job(j.id, j.work, j.release, j.deadline) for j in document.jobs)
        return Instance(jobs, document.machines, document.alpha, document.metadata)
    except (InvalidJob, InvalidInstance) as e:
        raise ValidationError(str(e)) from e


def parse_schedule(text: str) -> tuple[Mode, Schedule]:
    """Read a schedule document; returns its declared mode and the pieces.

    Raises:
        ParseError: on malformed JSON or a document of the wrong shape.
        ValidationError: when a piece has start >= end or a nonpositive speed.
    """
    try:
        document = _ScheduleDocument.model_validate(_load(text))
    except SchemaError as e:
        raise _schema_error(e) from e

    try:
        pieces = tuple(
            ExecutionPiece(p.job, p.machine, p.start, p.end, p.speed) for p in document.pieces
        )
    except ValueError as e:
        raise ValidationError(str(e)) from e
    return document.mode, Schedule(pieces)


def write_instance(instance: Instance) -> str:
    document: dict[str, Any] = {
        "alpha": instance.alpha,
        "machines": instance.machines,
        "jobs": [
            {
                "id": job.id,
                "work": format_rational(job.work),
                "release": format_rational(job.release),
                "deadline": format_rational(job.deadline),
            }
            for job in instance.jobs
        ],
    }
    if instance.metadata:
        document["metadata"] = instance.metadata
    return json.dumps(document, indent=2) + "\n"


def write_schedule(instance: Instance, schedule: Schedule, mode: Mode = Mode.NON_PREEMPTIVE) -> str:
    """Schedule document with pieces ordered by machine then start, per-job and total energy.

    Raises:
        UnknownJobId: if a piece references a job absent from the instance.
    """
    ordered = schedule.sorted()
    document = {
        "mode": mode.value,
        "pieces": [
            {
                "job": piece.job,
                "machine": piece.machine,
                "start": format_rational(piece.start),
                "end": format_rational(piece.end),
                "speed": format_rational(piece.speed),
            }
            for piece in ordered
        ],
        "job_energies": job_energies(instance, ordered),
        "energy": total_energy(instance, ordered),
    }
    return json.dumps(document, indent=2) + "\n"


def write_report(rows: Sequence["RatioRecord"]) -> str:
    """CSV with REPORT_HEADER, LF line endings, booleans as true/false."""
    buffer = _stdio.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.instance_id,
                row.family,
                row.n,
                row.m,
                repr(float(row.alpha)),
                row.algorithm,
                repr(float(row.energy)),
                repr(float(row.preemptive_lb)),
                repr(float(row.ratio)),
                repr(float(row.bound)),
                "true" if row.within_bound else "false",
            ]
        )
    return buffer.getvalue()


def read_instance(path: Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def read_schedule(path: Path) -> tuple[Mode, Schedule]:
    return parse_schedule(Path(path).read_text(encoding="utf-8"))
