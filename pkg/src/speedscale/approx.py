"""Non-preemptive approximation algorithms built on the preemptive optimum.

crd handles a common release date and cd a common deadline (by time reversal
of crd). clique_algo splits a clique instance at its earliest deadline.
agreeable_algo cuts an agreeable instance into cliques and halves their windows.
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadAnchor, WrongFamily
from .logging import PerformanceTimer, get_logger
from .model import ExecutionPiece, Instance, Job, Schedule, classify
from .preemptive import execution_times, optimal_preemptive, split_times_at

logger = get_logger("approx")


@dataclass(frozen=True)
class PartitionEntry:
    anchor: Fraction
    jobs: tuple[str, ...]


@dataclass(frozen=True)
class Partition:
    """Consecutive groups of an agreeable instance, each anchored at its earliest deadline."""

    entries: tuple[PartitionEntry, ...]

    @property
    def k(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PartitionEntry]:
        return iter(self.entries)


@dataclass(frozen=True)
class CliqueSplit:
    """Jobs running mostly before the anchor (left) and mostly after it (right)."""

    left: frozenset[str]
    right: frozenset[str]
    anchor: Fraction


def _edf_key(job: Job) -> tuple[Fraction, str]:
    return job.deadline, job.id


def edf_dispatch(
    jobs: Sequence[Job],
    processing_times: dict[str, Fraction],
    machines: int,
    start: Fraction,
) -> Schedule:
    """List-schedule jobs in EDF order, each on the machine that frees up first.

    Ties on deadline go to the smaller job id, ties between machines to the
    smaller index. Job j runs at speed w_j / p_j.
    """
    free = [start] * machines
    pieces = []
    for job in sorted(jobs, key=_edf_key):
        machine = min(range(machines), key=lambda i: (free[i], i))
        p = processing_times[job.id]
        end = free[machine] + p
        pieces.append(ExecutionPiece(job.id, machine, free[machine], end, job.work / p))
        free[machine] += p
    return Schedule(tuple(pieces))


def crd_completion_bound(instance: Instance, schedule: Schedule) -> bool:
    """Whether every completion satisfies C_k <= start + sum_{j<k} p_j / m + p_k in EDF order."""
    start = min((job.release for job in instance.jobs), default=Fraction(0))
    durations = execution_times(schedule)
    completion = schedule.completion_times()
    before = Fraction(0)
    for job in sorted(instance.jobs, key=_edf_key):
        p = durations[job.id]
        if completion[job.id] > start + before / instance.machines + p:
            return False
        before += p
    return True


def crd(instance: Instance, tolerance: float | None = None) -> Schedule:
    """Common release date: shrink every preemptive execution time by 2 - 1/m and run EDF.

    Raises:
        WrongFamily: if releases differ.
    """
    if not classify(instance).common_release:
        raise WrongFamily("crd needs a common release date")
    if not instance.jobs:
        return Schedule()

    with PerformanceTimer("crd", n=instance.n, m=instance.machines):
        preemptive, _ = optimal_preemptive(instance, tolerance)
        factor = 2 - Fraction(1, instance.machines)
        processing = {job_id: e / factor for job_id, e in execution_times(preemptive).items()}
        start = instance.jobs[0].release
        schedule = edf_dispatch(instance.jobs, processing, instance.machines, start)

    logger.debug(f"crd scheduled {instance.n} jobs on {instance.machines} machines")
    return schedule


def mirror_instance(instance: Instance, horizon: Fraction | None = None) -> Instance:
    """Reflect every window about the horizon: [r, d] becomes [horizon - d, horizon - r]."""
    horizon = instance.horizon if horizon is None else horizon
    return instance.with_jobs(
        job.with_window(horizon - job.deadline, horizon - job.release) for job in instance.jobs
    )


def mirror_schedule(schedule: Schedule, horizon: Fraction) -> Schedule:
    """Reflect every piece about the horizon."""
    return Schedule(
        tuple(
            ExecutionPiece(p.job, p.machine, horizon - p.end, horizon - p.start, p.speed)
            for p in schedule
        )
    ).sorted()


def cd(instance: Instance, tolerance: float | None = None) -> Schedule:
    """Common deadline: crd run backwards from the deadline (latest release first).

    Raises:
        WrongFamily: if deadlines differ.
    """
    if not classify(instance).common_deadline:
        raise WrongFamily("cd needs a common deadline")
    if not instance.jobs:
        return Schedule()
    horizon = instance.horizon
    return mirror_schedule(crd(mirror_instance(instance, horizon), tolerance), horizon)


def clique_split(instance: Instance, preemptive: Schedule) -> CliqueSplit:
    """Split jobs at the earliest deadline by where most of their preemptive time falls."""
    anchor = min(job.deadline for job in instance.jobs)
    times = split_times_at(instance, preemptive, anchor)
    left = frozenset(j for j, (before, after) in times.items() if before >= after)
    right = frozenset(times) - left
    return CliqueSplit(left, right, anchor)


def clique_algo(instance: Instance, tolerance: float | None = None) -> Schedule:
    """Clique instances: cd on the jobs clamped before the earliest deadline,
    crd on the rest pushed after it.

    Raises:
        WrongFamily: if some pair of windows does not intersect.
    """
    if not classify(instance).clique:
        raise WrongFamily("clique_algo needs pairwise intersecting windows")
    if not instance.jobs:
        return Schedule()

    with PerformanceTimer("clique", n=instance.n, m=instance.machines) as timer:
        preemptive, _ = optimal_preemptive(instance, tolerance)
        split = clique_split(instance, preemptive)
        timer.add_metric("left", len(split.left))
        timer.add_metric("right", len(split.right))

        schedule = Schedule()
        if split.left:
            left = instance.with_jobs(
                job.with_window(job.release, split.anchor)
                for job in instance.jobs
                if job.id in split.left
            )
            schedule += cd(left, tolerance)
        if split.right:
            right = instance.with_jobs(
                job.with_window(split.anchor, job.deadline)
                for job in instance.jobs
                if job.id in split.right
            )
            schedule += crd(right, tolerance)

    logger.debug(
        f"clique split at {split.anchor}: {len(split.left)} left, {len(split.right)} right"
    )
    return schedule.sorted()


def partition_agreeable(instance: Instance) -> Partition:
    """Group jobs released by the earliest remaining deadline, repeatedly.

    Every job of a group ends no later than the next group's anchor, so its
    open window never contains that anchor.

    Raises:
        WrongFamily: if the instance is not agreeable.
    """
    if not classify(instance).agreeable:
        raise WrongFamily("partition_agreeable needs an agreeable instance")
    remaining = sorted(instance.jobs, key=lambda j: (j.release, j.deadline, j.id))
    entries = []
    while remaining:
        anchor = min(job.deadline for job in remaining)
        part = [job for job in remaining if job.release <= anchor]
        entries.append(PartitionEntry(anchor, tuple(job.id for job in part)))
        remaining = [job for job in remaining if job.release > anchor]
    return Partition(tuple(entries))


def shrink_to_clique(
    jobs: Sequence[Job],
    anchor: Fraction,
    *,
    machines: int,
    alpha: float,
) -> Instance:
    """Halve every window towards the anchor; the result is a clique around it.

    Raises:
        BadAnchor: if some window lies entirely on one side of the anchor.
    """
    shrunk = []
    for job in jobs:
        if job.release > anchor or job.deadline < anchor:
            raise BadAnchor(
                f"job {job.id}: window [{job.release}, {job.deadline}] misses anchor {anchor}"
            )
        shrunk.append(
            job.with_window(
                job.release + (anchor - job.release) / 2,
                job.deadline - (job.deadline - anchor) / 2,
            )
        )
    return Instance(tuple(shrunk), machines, alpha)


def agreeable_algo(instance: Instance, tolerance: float | None = None) -> Schedule:
    """Agreeable instances: partition, halve each part around its anchor and run clique_algo.

    Raises:
        WrongFamily: if the instance is not agreeable.
    """
    partition = partition_agreeable(instance)
    schedule = Schedule()
    with PerformanceTimer("agr", n=instance.n, m=instance.machines, parts=partition.k):
        for entry in partition:
            part = shrink_to_clique(
                [instance.job(job_id) for job_id in entry.jobs],
                entry.anchor,
                machines=instance.machines,
                alpha=instance.alpha,
            )
            schedule += clique_algo(part, tolerance)
    logger.debug(f"agreeable instance cut into {partition.k} cliques")
    return schedule.sorted()
