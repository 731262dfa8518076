"""Optimal preemptive schedules with migration.

The optimum is computed exactly by peeling critical job sets. At each phase the
densest set S, maximising W(S) / C(S) with C(S) = sum_i min(m_i, |S and A_i|) * L_i,
is found by Dinkelbach iteration over exact minimum cuts. Its jobs are fixed at
that speed and every interval they saturate loses the machines they occupy.
A final maximum flow turns the speeds into an allocation profile, and
McNaughton wrap-around lays each event interval out on the machines.

The KKT multipliers of the phase that saturates an interval certify a
Lagrangian lower bound on the optimal energy.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .config import SolverConfig
from .errors import InfeasibleInstance, SolverError, WrongMachineCount
from .logging import PerformanceTimer, get_logger
from .model import ExecutionPiece, Instance, Job, Schedule, total_energy

logger = get_logger("preemptive")

_SOURCE = ("source",)
_SINK = ("sink",)


@dataclass(frozen=True)
class AllocationProfile:
    """Time allocated to each job in each event interval, plus the optimal speeds."""

    event_times: tuple[Fraction, ...]
    alloc: dict[str, tuple[Fraction, ...]]
    speeds: dict[str, Fraction]
    multipliers: tuple[float, ...] = ()

    @property
    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.event_times, self.event_times[1:]))

    @property
    def lengths(self) -> list[Fraction]:
        return [b - a for a, b in self.intervals]

    def execution_time(self, job_id: str) -> Fraction:
        """e_j: total time the job runs."""
        return sum(self.alloc[job_id], Fraction(0))

    def execution_times(self) -> dict[str, Fraction]:
        return {job_id: self.execution_time(job_id) for job_id in self.alloc}

    def interval_load(self, index: int) -> Fraction:
        return sum((row[index] for row in self.alloc.values()), Fraction(0))


def event_grid(jobs: Sequence[Job]) -> tuple[list[Fraction], list[list[Job]]]:
    """Sorted distinct releases and deadlines, and the jobs active in each interval."""
    times = sorted({t for job in jobs for t in (job.release, job.deadline)})
    active = [
        [job for job in jobs if job.release <= a and b <= job.deadline]
        for a, b in zip(times, times[1:])
    ]
    return times, active


def _flow_network(
    jobs: Sequence[Job],
    demand: dict[str, Fraction],
    lengths: Sequence[Fraction],
    active: Sequence[Sequence[Job]],
    capacity: Sequence[int],
) -> nx.DiGraph:
    """source -> job (demand) -> interval (length) -> sink (machines * length)."""
    graph = nx.DiGraph()
    graph.add_node(_SOURCE)
    graph.add_node(_SINK)
    for job in jobs:
        graph.add_edge(_SOURCE, ("job", job.id), capacity=demand[job.id])
    for index, (length, members) in enumerate(zip(lengths, active)):
        if capacity[index] <= 0:
            continue
        graph.add_edge(("interval", index), _SINK, capacity=capacity[index] * length)
        for job in members:
            if job.id in demand:
                graph.add_edge(("job", job.id), ("interval", index), capacity=length)
    return graph


def _capacity_of(
    job_ids: set[str],
    lengths: Sequence[Fraction],
    active: Sequence[Sequence[Job]],
    capacity: Sequence[int],
) -> Fraction:
    """C(S): the most time the set S can run given the remaining machines."""
    total = Fraction(0)
    for length, members, machines in zip(lengths, active, capacity):
        count = sum(1 for job in members if job.id in job_ids)
        total += min(machines, count) * length
    return total


def _densest_set(
    jobs: Sequence[Job],
    lengths: Sequence[Fraction],
    active: Sequence[Sequence[Job]],
    capacity: Sequence[int],
) -> tuple[Fraction, set[str]]:
    """Maximise W(S) / C(S) over non-empty job subsets by Dinkelbach iteration."""
    work = {job.id: job.work for job in jobs}
    best = set(work)
    room = _capacity_of(best, lengths, active, capacity)
    if room == 0:
        raise InfeasibleInstance("no machine time left for jobs " + ", ".join(sorted(best)))
    speed = sum(work.values(), Fraction(0)) / room

    while True:
        demand = {job_id: w / speed for job_id, w in work.items()}
        graph = _flow_network(jobs, demand, lengths, active, capacity)
        cut_value, (source_side, _) = nx.minimum_cut(
            graph, _SOURCE, _SINK, flow_func=edmonds_karp
        )
        if cut_value >= sum(demand.values(), Fraction(0)):
            return speed, best
        denser = {node[1] for node in source_side if node[0] == "job"}
        room = _capacity_of(denser, lengths, active, capacity)
        if room == 0:
            raise InfeasibleInstance(
                "no machine time left for jobs " + ", ".join(sorted(denser))
            )
        best = denser
        speed = sum((work[j] for j in denser), Fraction(0)) / room
        logger.debug(f"Dinkelbach step: {len(denser)} jobs, speed {speed}")


def _peel_speeds(
    instance: Instance,
    lengths: Sequence[Fraction],
    active: Sequence[Sequence[Job]],
) -> tuple[dict[str, Fraction], list[float]]:
    """Speed of every job, and the interval multipliers of the phase that saturated it."""
    capacity = [instance.machines] * len(lengths)
    multipliers = [0.0] * len(lengths)
    remaining = list(instance.jobs)
    speeds: dict[str, Fraction] = {}
    phase = 0

    while remaining:
        phase += 1
        speed, critical = _densest_set(remaining, lengths, active, capacity)
        logger.debug(f"Phase {phase}: {len(critical)} jobs at speed {speed}")
        for job_id in critical:
            speeds[job_id] = speed
        mu = (instance.alpha - 1) * float(speed) ** instance.alpha
        for index, members in enumerate(active):
            count = sum(1 for job in members if job.id in critical)
            if count == 0 or capacity[index] == 0:
                continue
            if count >= capacity[index]:
                multipliers[index] = mu
            capacity[index] -= min(capacity[index], count)
        remaining = [job for job in remaining if job.id not in critical]

    return speeds, multipliers


def allocation_profile(
    instance: Instance, *, degenerate_threshold: float | None = None
) -> AllocationProfile:
    """Optimal allocation of every job over the event grid.

    Raises:
        InfeasibleInstance: if a job would get less than degenerate_threshold
            times the horizon, or no machine time remains for some job.
        SolverError: if the final flow does not route every job's time.
    """
    if degenerate_threshold is None:
        degenerate_threshold = SolverConfig().degenerate_threshold
    times, active = event_grid(instance.jobs)
    lengths = [b - a for a, b in zip(times, times[1:])]
    if not instance.jobs:
        return AllocationProfile(tuple(times), {}, {}, ())

    speeds, multipliers = _peel_speeds(instance, lengths, active)
    demand = {job.id: job.work / speeds[job.id] for job in instance.jobs}

    floor = Fraction(degenerate_threshold) * instance.horizon
    for job in instance.jobs:
        if demand[job.id] < floor:
            logger.warning(f"Rejecting job {job.id}: execution time {float(demand[job.id]):.3g}")
            raise InfeasibleInstance(
                f"job {job.id}: execution time {float(demand[job.id]):.3g} "
                "is numerically degenerate"
            )

    graph = _flow_network(
        instance.jobs, demand, lengths, active, [instance.machines] * len(lengths)
    )
    flow_value, flow = nx.maximum_flow(graph, _SOURCE, _SINK, flow_func=edmonds_karp)
    if flow_value != sum(demand.values(), Fraction(0)):
        raise SolverError(f"allocation flow {flow_value} does not cover the execution times")

    alloc = {
        job.id: tuple(
            Fraction(flow[("job", job.id)].get(("interval", index), 0))
            for index in range(len(lengths))
        )
        for job in instance.jobs
    }
    return AllocationProfile(tuple(times), alloc, speeds, tuple(multipliers))


def dual_lower_bound(
    instance: Instance,
    profile: AllocationProfile,
    multipliers: Sequence[float],
) -> float:
    """Lagrangian dual value for nonnegative interval multipliers.

    Relaxes the machine capacity of every interval. For each job the inner
    problem fills its cheapest intervals first and stops at the stationary point
    of w ** alpha / E ** (alpha - 1) + mu * E on the segment where it falls.
    Any nonnegative multipliers give a valid lower bound on the optimum.
    """
    alpha = instance.alpha
    lengths = [float(length) for length in profile.lengths]
    intervals = profile.intervals
    value = -math.fsum(mu * instance.machines * length for mu, length in zip(multipliers, lengths))

    for job in instance.jobs:
        w = float(job.work)
        segments = sorted(
            (multipliers[i], lengths[i])
            for i, (a, b) in enumerate(intervals)
            if job.release <= a and b <= job.deadline
        )
        best = math.inf
        filled = 0.0
        placed = 0.0
        for mu, length in segments:
            lo, hi = filled, filled + length
            if mu > 0:
                stationary = ((alpha - 1) * w**alpha / mu) ** (1 / alpha)
                point = min(max(stationary, lo), hi)
            else:
                point = hi
            if point > 0:
                cost = w**alpha / point ** (alpha - 1) + placed + mu * (point - lo)
                best = min(best, cost)
            filled = hi
            placed += mu * length
        value += best

    return value


def mcnaughton_layout(profile: AllocationProfile, instance: Instance) -> Schedule:
    """Wrap each interval's allocations around the machines, jobs in deadline order."""
    order = sorted(instance.jobs, key=lambda j: (j.deadline, j.release, j.id))
    pieces: list[ExecutionPiece] = []
    for index, (a, b) in enumerate(profile.intervals):
        machine, cursor = 0, a
        for job in order:
            amount = profile.alloc[job.id][index]
            if amount == 0:
                continue
            speed = profile.speeds[job.id]
            if cursor + amount <= b:
                pieces.append(ExecutionPiece(job.id, machine, cursor, cursor + amount, speed))
                cursor += amount
            else:
                spill = amount - (b - cursor)
                pieces.append(ExecutionPiece(job.id, machine, cursor, b, speed))
                machine += 1
                pieces.append(ExecutionPiece(job.id, machine, a, a + spill, speed))
                cursor = a + spill
            if cursor == b:
                machine, cursor = machine + 1, a
    return Schedule(tuple(pieces)).merged()


def optimal_preemptive(
    instance: Instance,
    tolerance: float | None = None,
    *,
    degenerate_threshold: float | None = None,
) -> tuple[Schedule, float]:
    """Optimal preemptive schedule with migration and a certified lower bound on its energy.

    Every job runs at one constant speed. The returned bound satisfies
    bound <= optimum <= energy(schedule) <= (1 + tolerance) * bound.

    Args:
        instance: Jobs, machine count and exponent.
        tolerance: Largest relative certificate gap accepted; defaults to
            solver.tolerance.
        degenerate_threshold: Smallest execution time, as a fraction of the
            horizon, a job may get.

    Returns:
        The McNaughton-laid schedule and the dual lower bound.

    Raises:
        InfeasibleInstance: for numerically degenerate instances.
        SolverError: if the certificate gap exceeds tolerance.
    """
    if tolerance is None:
        tolerance = SolverConfig().tolerance
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")

    with PerformanceTimer("preemptive", n=instance.n, m=instance.machines) as timer:
        profile = allocation_profile(instance, degenerate_threshold=degenerate_threshold)
        schedule = mcnaughton_layout(profile, instance)
        energy = total_energy(instance, schedule)
        bound = min(dual_lower_bound(instance, profile, profile.multipliers), energy)
        timer.add_metric("phases", len(set(profile.speeds.values())))
        timer.add_metric("pieces", len(schedule))

    if energy > (1 + tolerance) * bound:
        raise SolverError(
            f"certificate gap too large: energy {energy!r} vs lower bound {bound!r}"
        )
    logger.debug(f"Preemptive optimum for {instance.n} jobs: energy {energy:.6g}")
    return schedule, bound


def execution_times(schedule: Schedule) -> dict[str, Fraction]:
    """Total piece duration per job."""
    totals: dict[str, Fraction] = {}
    for piece in schedule:
        totals[piece.job] = totals.get(piece.job, Fraction(0)) + piece.duration
    return totals


def _yds_speeds(jobs: Iterable[Job]) -> dict[str, Fraction]:
    """Critical-interval peeling with timeline contraction."""
    # (id, work, release, deadline) in contracted coordinates
    pending = [(job.id, job.work, job.release, job.deadline) for job in jobs]
    speeds: dict[str, Fraction] = {}

    while pending:
        starts = sorted({r for _, _, r, _ in pending})
        ends = sorted({d for _, _, _, d in pending})
        best: tuple[Fraction, Fraction, Fraction] | None = None
        for a in starts:
            for b in ends:
                if b <= a:
                    continue
                work = sum((w for _, w, r, d in pending if a <= r and d <= b), Fraction(0))
                if work == 0:
                    continue
                density = work / (b - a)
                if best is None or density > best[0]:
                    best = (density, a, b)
        assert best is not None
        density, a, b = best
        span = b - a

        def contract(
            t: Fraction, a: Fraction = a, b: Fraction = b, span: Fraction = span
        ) -> Fraction:
            if t <= a:
                return t
            if t <= b:
                return a
            return t - span

        rest = []
        for job_id, work, r, d in pending:
            if a <= r and d <= b:
                speeds[job_id] = density
            else:
                rest.append((job_id, work, contract(r), contract(d)))
        logger.debug(f"Critical interval [{a}, {b}] at speed {density}")
        pending = rest

    return speeds


def edf_layout(instance: Instance, speeds: dict[str, Fraction]) -> Schedule:
    """Single-machine preemptive EDF at fixed speeds.

    Ties on deadline go to the earlier release, then the smaller id, so a job
    never preempts another with the same deadline.

    Raises:
        SolverError: if some job misses its deadline at the given speeds.
    """
    left = {job.id: job.work / speeds[job.id] for job in instance.jobs}
    releases = sorted({job.release for job in instance.jobs})
    pieces: list[ExecutionPiece] = []
    now = releases[0] if releases else Fraction(0)

    while any(left.values()):
        ready = [j for j in instance.jobs if j.release <= now and left[j.id] > 0]
        upcoming = [t for t in releases if t > now]
        if not ready:
            now = upcoming[0]
            continue
        job = min(ready, key=lambda j: (j.deadline, j.release, j.id))
        until = now + left[job.id]
        if upcoming and upcoming[0] < until:
            until = upcoming[0]
        pieces.append(ExecutionPiece(job.id, 0, now, until, speeds[job.id]))
        left[job.id] -= until - now
        now = until

    schedule = Schedule(tuple(pieces)).merged()
    for job_id, end in schedule.completion_times().items():
        if end > instance.job(job_id).deadline:
            raise SolverError(f"job {job_id} misses its deadline at the given speeds")
    return schedule


def yds_single(instance: Instance) -> Schedule:
    """Exact single-machine optimum.

    Agreeable instances come out with exactly one piece per job.

    Raises:
        WrongMachineCount: if the instance has more than one machine.
    """
    if instance.machines != 1:
        raise WrongMachineCount(f"yds_single needs m = 1, got m = {instance.machines}")
    with PerformanceTimer("yds_single", n=instance.n):
        speeds = _yds_speeds(instance.jobs)
        return edf_layout(instance, speeds)


def split_times_at(
    instance: Instance, schedule: Schedule, at: Fraction
) -> dict[str, tuple[Fraction, Fraction]]:
    """Execution time of each job strictly before `at`, and at or after it."""
    split = {job.id: (Fraction(0), Fraction(0)) for job in instance.jobs}
    for piece in schedule:
        before = max(Fraction(0), min(piece.end, at) - piece.start)
        after = piece.duration - before
        left, right = split[piece.job]
        split[piece.job] = (left + before, right + after)
    return split
