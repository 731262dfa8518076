"""Core domain types, energy accounting, feasibility checking and family classification.

Times, works and speeds are exact rationals (``fractions.Fraction``). Energy is a
float because alpha may be non-integral.
"""

import math
from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, replace
from decimal import Decimal
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any

from .errors import InvalidGamma, InvalidInstance, InvalidJob, UnknownJobId

RationalLike = Fraction | int | str | Decimal | float


def as_fraction(value: RationalLike) -> Fraction:
    """Convert a number or a "p/q" / decimal string to an exact Fraction.

    Floats are converted exactly (no rounding to a nearby simple fraction).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class Job:
    """One work item: ``work`` units to be done inside ``[release, deadline]``."""

    id: str
    work: Fraction
    release: Fraction
    deadline: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", str(self.id))
        for name in ("work", "release", "deadline"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.work <= 0:
            raise InvalidJob(f"job {self.id}: work must be positive, got {self.work}")
        if self.release >= self.deadline:
            raise InvalidJob(
                f"job {self.id}: release {self.release} must precede deadline {self.deadline}"
            )

    @property
    def span(self) -> Fraction:
        """Length of the active interval."""
        return self.deadline - self.release

    @property
    def density(self) -> Fraction:
        """Speed needed to finish when running over the whole active interval."""
        return self.work / self.span

    def with_window(self, release: RationalLike, deadline: RationalLike) -> "Job":
        """Copy of this job with a different active interval."""
        return replace(self, release=as_fraction(release), deadline=as_fraction(deadline))


@dataclass(frozen=True)
class Instance:
    """A job set on ``machines`` identical speed-scalable processors, power = speed ** alpha."""

    jobs: tuple[Job, ...]
    machines: int = 1
    alpha: float = 3.0
    metadata: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if int(self.machines) != self.machines or self.machines < 1:
            raise InvalidInstance(f"machines must be a positive integer, got {self.machines}")
        object.__setattr__(self, "machines", int(self.machines))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not self.alpha > 1:
            raise InvalidInstance(f"alpha must exceed 1, got {self.alpha}")
        ids = [job.id for job in self.jobs]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidInstance(f"duplicate job ids: {', '.join(dupes)}")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @cached_property
    def by_id(self) -> dict[str, Job]:
        return {job.id: job for job in self.jobs}

    def job(self, job_id: str) -> Job:
        """Look up a job by id."""
        try:
            return self.by_id[job_id]
        except KeyError:
            raise UnknownJobId(f"unknown job id: {job_id}") from None

    @property
    def horizon(self) -> Fraction:
        """Latest deadline (0 for an empty instance)."""
        return max((job.deadline for job in self.jobs), default=Fraction(0))

    def with_jobs(self, jobs: Iterable[Job]) -> "Instance":
        """Same machines and alpha, different job set."""
        return Instance(tuple(jobs), self.machines, self.alpha, dict(self.metadata))


class Mode(StrEnum):
    """Feasibility mode of a schedule."""

    PREEMPTIVE = "preemptive"
    NON_PREEMPTIVE = "nonpreemptive"


@dataclass(frozen=True)
class ExecutionPiece:
    """A maximal stretch of one job on one machine at constant speed."""

    job: str
    machine: int
    start: Fraction
    end: Fraction
    speed: Fraction

    def __post_init__(self) -> None:
        for name in ("start", "end", "speed"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.start >= self.end:
            raise ValueError(f"piece of {self.job}: start {self.start} must precede end {self.end}")
        if self.speed <= 0:
            raise ValueError(f"piece of {self.job}: speed must be positive, got {self.speed}")

    @property
    def duration(self) -> Fraction:
        return self.end - self.start

    @property
    def work(self) -> Fraction:
        return self.speed * self.duration


@dataclass(frozen=True)
class Schedule:
    """A set of execution pieces; represents preemptive and non-preemptive solutions alike."""

    pieces: tuple[ExecutionPiece, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))

    def __iter__(self) -> Iterator[ExecutionPiece]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __add__(self, other: "Schedule") -> "Schedule":
        return Schedule(self.pieces + other.pieces)

    def for_job(self, job_id: str) -> list[ExecutionPiece]:
        """Pieces of one job in time order."""
        return sorted((p for p in self.pieces if p.job == job_id), key=lambda p: p.start)

    def job_ids(self) -> set[str]:
        return {p.job for p in self.pieces}

    def sorted(self) -> "Schedule":
        """Pieces ordered by machine, then start time."""
        return Schedule(tuple(sorted(self.pieces, key=lambda p: (p.machine, p.start, p.job))))

    def merged(self) -> "Schedule":
        """Coalesce abutting pieces of the same job on the same machine at the same speed."""
        out: list[ExecutionPiece] = []
        for piece in sorted(self.pieces, key=lambda p: (p.machine, p.start)):
            last = out[-1] if out else None
            if (
                last is not None
                and last.machine == piece.machine
                and last.job == piece.job
                and last.end == piece.start
                and last.speed == piece.speed
            ):
                out[-1] = replace(last, end=piece.end)
            else:
                out.append(piece)
        return Schedule(tuple(out))

    def completion_times(self) -> dict[str, Fraction]:
        """C_j: the latest piece end per job."""
        completion: dict[str, Fraction] = {}
        for piece in self.pieces:
            if piece.job not in completion or piece.end > completion[piece.job]:
                completion[piece.job] = piece.end
        return completion


class ViolationKind(StrEnum):
    """Kinds of feasibility violations."""

    RELEASE_VIOLATION = "ReleaseViolation"
    DEADLINE_VIOLATION = "DeadlineViolation"
    MACHINE_OVERLAP = "MachineOverlap"
    SELF_PARALLELISM = "SelfParallelism"
    WORK_MISMATCH = "WorkMismatch"
    PREEMPTED_JOB = "PreemptedJob"
    UNKNOWN_JOB = "UnknownJob"
    INVALID_MACHINE = "InvalidMachine"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    job: str
    detail: str


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of check_feasible; feasible exactly when no violation was found."""

    violations: tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.feasible


@dataclass(frozen=True)
class FamilyFlags:
    """Which instance families an instance belongs to."""

    common_release: bool
    common_deadline: bool
    clique: bool
    agreeable: bool
    laminar: bool
    pure_laminar: bool

    def names(self) -> list[str]:
        """Names of the families that hold, in declaration order."""
        return [name for name, value in vars(self).items() if value]


def total_energy(instance: Instance, schedule: Schedule) -> float:
    """Sum over pieces of speed ** alpha * duration.

    Raises:
        UnknownJobId: if a piece references a job absent from the instance.
    """
    for piece in schedule:
        instance.job(piece.job)
    return math.fsum(
        float(piece.speed) ** instance.alpha * float(piece.duration) for piece in schedule
    )


def job_energies(instance: Instance, schedule: Schedule) -> dict[str, float]:
    """Energy per job; equals w_j * s_j ** (alpha - 1) for a job run at one speed."""
    energies: dict[str, list[float]] = defaultdict(list)
    for piece in schedule:
        instance.job(piece.job)
        energies[piece.job].append(float(piece.speed) ** instance.alpha * float(piece.duration))
    return {job.id: math.fsum(energies.get(job.id, [])) for job in instance.jobs}


def _overlaps(pieces: list[ExecutionPiece]) -> Iterator[tuple[ExecutionPiece, ExecutionPiece]]:
    """Yield consecutive overlapping pairs; shared endpoints do not overlap."""
    ordered = sorted(pieces, key=lambda p: (p.start, p.end))
    for earlier, later in zip(ordered, ordered[1:]):
        if later.start < earlier.end:
            yield earlier, later


def check_feasible(instance: Instance, schedule: Schedule, mode: Mode) -> FeasibilityReport:
    """Check windows, machine exclusivity, self-parallelism, exact work and non-preemption.

    Args:
        instance: The instance the schedule claims to solve.
        schedule: Pieces to check.
        mode: NON_PREEMPTIVE additionally requires one piece per job.

    Returns:
        A report listing every violation; violations are never raised.
    """
    violations: list[Violation] = []
    by_machine: dict[int, list[ExecutionPiece]] = defaultdict(list)
    by_job: dict[str, list[ExecutionPiece]] = defaultdict(list)

    for piece in schedule:
        job = instance.by_id.get(piece.job)
        if job is None:
            violations.append(
                Violation(ViolationKind.UNKNOWN_JOB, piece.job, "piece references unknown job")
            )
            continue
        if not 0 <= piece.machine < instance.machines:
            violations.append(
                Violation(
                    ViolationKind.INVALID_MACHINE,
                    piece.job,
                    f"machine {piece.machine} outside [0, {instance.machines})",
                )
            )
        if piece.start < job.release:
            violations.append(
                Violation(
                    ViolationKind.RELEASE_VIOLATION,
                    piece.job,
                    f"starts at {piece.start} before release {job.release}",
                )
            )
        if piece.end > job.deadline:
            violations.append(
                Violation(
                    ViolationKind.DEADLINE_VIOLATION,
                    piece.job,
                    f"ends at {piece.end} after deadline {job.deadline}",
                )
            )
        by_machine[piece.machine].append(piece)
        by_job[piece.job].append(piece)

    for machine, pieces in sorted(by_machine.items()):
        for earlier, later in _overlaps(pieces):
            violations.append(
                Violation(
                    ViolationKind.MACHINE_OVERLAP,
                    later.job,
                    f"machine {machine}: [{later.start}, {later.end}) overlaps "
                    f"{earlier.job} [{earlier.start}, {earlier.end})",
                )
            )

    for job in instance.jobs:
        pieces = by_job.get(job.id, [])
        for earlier, later in _overlaps(pieces):
            violations.append(
                Violation(
                    ViolationKind.SELF_PARALLELISM,
                    job.id,
                    f"[{later.start}, {later.end}) on machine {later.machine} overlaps "
                    f"[{earlier.start}, {earlier.end}) on machine {earlier.machine}",
                )
            )
        done = sum((p.work for p in pieces), Fraction(0))
        if done != job.work:
            violations.append(
                Violation(ViolationKind.WORK_MISMATCH, job.id, f"work {done} != {job.work}")
            )
        if mode is Mode.NON_PREEMPTIVE and len(pieces) > 1:
            violations.append(
                Violation(ViolationKind.PREEMPTED_JOB, job.id, f"{len(pieces)} pieces")
            )

    return FeasibilityReport(tuple(violations))


def _ordered_pair(a: Job, b: Job, *, ties_descending: bool) -> tuple[Job, Job]:
    """Order two jobs by release; equal releases by deadline (descending or ascending)."""
    if a.release != b.release:
        return (a, b) if a.release < b.release else (b, a)
    if ties_descending:
        return (a, b) if a.deadline >= b.deadline else (b, a)
    return (a, b) if a.deadline <= b.deadline else (b, a)


def classify(instance: Instance) -> FamilyFlags:
    """Evaluate the pairwise family definitions over every pair of jobs.

    Equal releases are ordered by descending deadline for the laminar tests
    (containment) and ascending deadline for the agreeable test.
    """
    jobs = instance.jobs
    common_release = len({job.release for job in jobs}) <= 1
    common_deadline = len({job.deadline for job in jobs}) <= 1
    agreeable = clique = laminar = pure_laminar = True

    for a, b in combinations(jobs, 2):
        first, second = _ordered_pair(a, b, ties_descending=False)
        if first.deadline > second.deadline:
            agreeable = False
        if first.deadline < second.release:
            clique = False

        first, second = _ordered_pair(a, b, ties_descending=True)
        nested = first.deadline >= second.deadline
        if not nested:
            pure_laminar = False
            if first.deadline > second.release:
                laminar = False

    return FamilyFlags(
        common_release=common_release,
        common_deadline=common_deadline,
        clique=clique,
        agreeable=agreeable,
        laminar=laminar,
        pure_laminar=pure_laminar,
    )


def scale_schedule(
    instance: Instance,
    schedule: Schedule,
    gamma: RationalLike,
    anchor: RationalLike,
) -> Schedule:
    """Speed every piece up by ``gamma``, compressing time towards ``anchor``.

    A time t maps to anchor + (t - anchor) / gamma, so durations shrink by gamma,
    speeds grow by gamma, work is preserved and energy scales by gamma ** (alpha - 1).

    Raises:
        InvalidGamma: if gamma < 1.
        UnknownJobId: if a piece references a job absent from the instance.
    """
    gamma = as_fraction(gamma)
    anchor = as_fraction(anchor)
    if gamma < 1:
        raise InvalidGamma(f"gamma must be at least 1, got {gamma}")
    for piece in schedule:
        instance.job(piece.job)
    return Schedule(
        tuple(
            replace(
                piece,
                start=anchor + (piece.start - anchor) / gamma,
                end=anchor + (piece.end - anchor) / gamma,
                speed=piece.speed * gamma,
            )
            for piece in schedule
        )
    )


def theorem_bound(algorithm: str, machines: int, alpha: float) -> float:
    """Proven approximation ratio of an algorithm against the preemptive optimum."""
    base = 2 - 1 / machines
    factors = {"crd": 1, "cd": 1, "clique": 2, "agr": 4, "preemptive": None}
    if algorithm not in factors:
        raise ValueError(f"no approximation bound for algorithm '{algorithm}'")
    factor = factors[algorithm]
    if factor is None:
        return 1.0
    return float((factor * base) ** (alpha - 1))


def legacy_bound(alpha: float) -> float:
    """2 ** (3 alpha - 3), which the agreeable bound beats strictly whenever m >= 2."""
    return float(2 ** (3 * alpha - 3))
