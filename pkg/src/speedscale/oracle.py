"""Brute-force ground truth for small instances.

brute_force_nonpreemptive tries every job order on every subset of jobs, times
each order optimally, and combines subsets over machines with a subset DP.
convex_preemptive solves the preemptive allocation program with cvxpy,
independently of the max-flow solver. The gap_* helpers build the single-machine
family whose non-preemptive energy grows like n ** (alpha - 1) times the
preemptive energy.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import cvxpy as cp
import numpy as np

from .config import OracleConfig
from .errors import InfeasibleOrder, SolverError, TooLarge
from .logging import PerformanceTimer, get_logger
from .model import ExecutionPiece, Instance, Job, Mode, Schedule, check_feasible, total_energy
from .preemptive import event_grid

logger = get_logger("oracle")

_DENOMINATOR_LIMIT = 10**9


@dataclass(frozen=True)
class OrderTiming:
    """Optimal start and end times for jobs run back to back in a fixed order on one machine."""

    jobs: tuple[Job, ...]
    starts: tuple[Fraction, ...]
    ends: tuple[Fraction, ...]
    energy: float

    @property
    def boundaries(self) -> tuple[Fraction, ...]:
        return tuple(sorted(set(self.starts) | set(self.ends)))

    def pieces(self, machine: int) -> list[ExecutionPiece]:
        return [
            ExecutionPiece(job.id, machine, start, end, job.work / (end - start))
            for job, start, end in zip(self.jobs, self.starts, self.ends)
        ]


@dataclass(frozen=True)
class OracleResult:
    energy: float
    schedule: Schedule
    enumerated: int
    tolerance: float


def order_is_feasible(jobs: Sequence[Job]) -> bool:
    """A fixed order can be timed iff every deadline exceeds all releases up to it."""
    latest = None
    for job in jobs:
        latest = job.release if latest is None else max(latest, job.release)
        if latest >= job.deadline:
            return False
    return True


def _chains(jobs: Sequence[Job]) -> list[list[int]]:
    """Split an order where the next job is released after the previous deadline."""
    chains: list[list[int]] = [[0]]
    for i in range(1, len(jobs)):
        if jobs[i].release > jobs[i - 1].deadline:
            chains.append([i])
        else:
            chains[-1].append(i)
    return chains


def _chain_energy(works: Sequence[float], bounds: Sequence[float], alpha: float) -> float:
    if any(b <= a for a, b in zip(bounds, bounds[1:])):
        raise SolverError(f"chain boundaries are not increasing: {list(bounds)}")
    return math.fsum(
        w**alpha / (b - a) ** (alpha - 1) for w, a, b in zip(works, bounds, bounds[1:])
    )


def _interior_start(chain: Sequence[Job]) -> list[float]:
    """A strictly increasing boundary vector that respects every window of the chain.

    Halfway between the earliest and the latest packing in which every job
    gets at least eps, eps being a fraction of the smallest gap d_k - r_i
    over i <= k. The order must be feasible.
    """
    releases = [float(job.release) for job in chain]
    deadlines = [float(job.deadline) for job in chain]
    count = len(chain) - 1
    eps = min(
        deadlines[k] - releases[i] for k in range(len(chain)) for i in range(k + 1)
    ) / (count + 2)

    earliest = [releases[0]]
    for j in range(count):
        earliest.append(max(releases[j + 1], earliest[j] + eps))
    earliest.append(deadlines[-1])

    latest = [deadlines[-1]]
    for j in range(count, 0, -1):
        latest.append(min(deadlines[j - 1], latest[-1] - eps))
    latest.append(releases[0])
    latest.reverse()

    return [(a + b) / 2 for a, b in zip(earliest, latest)]


def _is_interior(chain: Sequence[Job], bounds: Sequence[float]) -> bool:
    if any(b <= a for a, b in zip(bounds, bounds[1:])):
        return False
    return all(
        float(chain[j + 1].release) <= bounds[j + 1] <= float(chain[j].deadline)
        for j in range(len(chain) - 1)
    )


def _descend_chain(
    chain: Sequence[Job], alpha: float, tolerance: float, max_sweeps: int
) -> list[float]:
    """Gauss-Seidel descent on the interior boundaries of one back-to-back chain.

    The first boundary sits at the first release and the last at the last
    deadline. Each interior update splits the gap between its neighbours in
    proportion to the two works, clamped to its window.
    """
    works = [float(job.work) for job in chain]
    lo = [float(job.release) for job in chain[1:]]
    hi = [float(job.deadline) for job in chain[:-1]]
    start, end = float(chain[0].release), float(chain[-1].deadline)
    if len(chain) == 1:
        return [start, end]

    # equal speeds when that respects the windows, otherwise a strictly interior point
    total = sum(works)
    bounds = [start]
    done = 0.0
    for j in range(len(chain) - 1):
        done += works[j]
        bounds.append(start + (end - start) * done / total)
    bounds.append(end)
    if not _is_interior(chain, bounds):
        bounds = _interior_start(chain)
    count = len(chain) - 1

    energy = _chain_energy(works, bounds, alpha)
    for _ in range(max_sweeps):
        for j in range(count):
            a, c = bounds[j], bounds[j + 2]
            target = a + (c - a) * works[j] / (works[j] + works[j + 1])
            bounds[j + 1] = min(max(target, lo[j], a), hi[j], c)
        updated = _chain_energy(works, bounds, alpha)
        if abs(energy - updated) <= tolerance / 10 * updated:
            energy = updated
            break
        energy = updated
    return bounds


def _exact(value: float, low: Fraction, high: Fraction) -> Fraction:
    return min(max(Fraction(value).limit_denominator(_DENOMINATOR_LIMIT), low), high)


def fixed_order_timing(
    machine_jobs: Sequence[Job],
    alpha: float,
    tolerance: float | None = None,
    *,
    max_sweeps: int | None = None,
) -> OrderTiming:
    """Minimum-energy timing of jobs run in the given order on one machine.

    Consecutive jobs share a boundary unless the next job is released after
    the previous deadline; then the first ends at its deadline, the second
    starts at its release and the machine idles in between.

    Raises:
        InfeasibleOrder: if no window-respecting timing exists for this order.
        SolverError: if rounding collapses a piece during the descent.
    """
    defaults = OracleConfig()
    tolerance = defaults.tolerance if tolerance is None else tolerance
    max_sweeps = defaults.max_sweeps if max_sweeps is None else max_sweeps
    jobs = tuple(machine_jobs)
    if not jobs:
        return OrderTiming((), (), (), 0.0)
    if not order_is_feasible(jobs):
        order = ", ".join(job.id for job in jobs)
        raise InfeasibleOrder(f"order {order} cannot meet its windows")

    starts: list[Fraction] = [Fraction(0)] * len(jobs)
    ends: list[Fraction] = [Fraction(0)] * len(jobs)
    for chain in _chains(jobs):
        members = [jobs[i] for i in chain]
        bounds = _descend_chain(members, alpha, tolerance, max_sweeps)
        exact = [members[0].release]
        for j in range(1, len(members)):
            low = max(members[j].release, exact[-1])
            exact.append(_exact(bounds[j], low, members[j - 1].deadline))
        exact.append(members[-1].deadline)
        if any(a >= b for a, b in zip(exact, exact[1:])):
            # rounding collapsed a piece; keep the float boundaries verbatim
            exact = [members[0].release] + [
                min(max(Fraction(b), members[j].release), members[j - 1].deadline)
                for j, b in enumerate(bounds[1:-1], start=1)
            ] + [members[-1].deadline]
            if any(a >= b for a, b in zip(exact, exact[1:])):
                order = ", ".join(j.id for j in members)
                raise InfeasibleOrder(f"order {order} collapsed a piece")
        for offset, i in enumerate(chain):
            starts[i], ends[i] = exact[offset], exact[offset + 1]

    energy = math.fsum(
        float(job.work) ** alpha / float(end - start) ** (alpha - 1)
        for job, start, end in zip(jobs, starts, ends)
    )
    return OrderTiming(jobs, tuple(starts), tuple(ends), energy)


def best_single_machine(
    jobs: Sequence[Job],
    alpha: float,
    tolerance: float | None = None,
    *,
    max_sweeps: int | None = None,
) -> tuple[OrderTiming | None, int]:
    """Best order for one machine, and how many orders were timed.

    Orders that only swap identical jobs are skipped.
    """
    best: OrderTiming | None = None
    seen: set[tuple[tuple[Fraction, Fraction, Fraction], ...]] = set()
    timed = 0
    for order in permutations(jobs):
        key = tuple((job.work, job.release, job.deadline) for job in order)
        if key in seen or not order_is_feasible(order):
            continue
        seen.add(key)
        timing = fixed_order_timing(order, alpha, tolerance, max_sweeps=max_sweeps)
        timed += 1
        if best is None or timing.energy < best.energy:
            best = timing
    return best, timed


def brute_force_nonpreemptive(
    instance: Instance,
    tolerance: float | None = None,
    *,
    config: OracleConfig | None = None,
) -> OracleResult:
    """Optimal non-preemptive schedule by exhaustive search.

    Args:
        instance: At most config.max_jobs jobs on at most config.max_machines machines.
        tolerance: Relative stopping step of the boundary descent; defaults to
            config.tolerance.
        config: Size limits and descent settings.

    Returns:
        Energy, schedule, number of timed orders and the tolerance used.

    Raises:
        TooLarge: beyond config.max_jobs jobs or config.max_machines machines.
        SolverError: if the descent collapses a piece.
    """
    config = config or OracleConfig()
    tolerance = config.tolerance if tolerance is None else tolerance
    n, m = instance.n, instance.machines
    if n > config.max_jobs or m > config.max_machines:
        raise TooLarge(
            f"brute force is limited to n <= {config.max_jobs}, "
            f"m <= {config.max_machines}; got n={n}, m={m}"
        )

    jobs = instance.jobs
    with PerformanceTimer("oracle", n=n, m=m) as timer:
        single: dict[int, OrderTiming | None] = {0: None}
        cost = [math.inf] * (1 << n)
        cost[0] = 0.0
        enumerated = 0
        for mask in range(1, 1 << n):
            subset = [jobs[i] for i in range(n) if mask >> i & 1]
            timing, timed = best_single_machine(
                subset, instance.alpha, tolerance, max_sweeps=config.max_sweeps
            )
            enumerated += timed
            single[mask] = timing
            if timing is not None:
                cost[mask] = timing.energy

        # best[k][mask]: cheapest split of mask over k + 1 machines; choice[k][mask] is the
        # group given to one machine (it holds the lowest job of mask), 0 when fewer machines do
        full = (1 << n) - 1
        best = [cost[:]]
        choice: list[list[int]] = [[0] * (1 << n)]
        for _ in range(1, m):
            prev = best[-1]
            row, picks = prev[:], [0] * (1 << n)
            for mask in range(1, 1 << n):
                low = mask & -mask
                sub = mask
                while sub:
                    if sub & low and cost[sub] + prev[mask ^ sub] < row[mask]:
                        row[mask] = cost[sub] + prev[mask ^ sub]
                        picks[mask] = sub
                    sub = (sub - 1) & mask
            best.append(row)
            choice.append(picks)
        timer.add_metric("enumerated", enumerated)

    if math.isinf(best[-1][full]):
        raise SolverError("no feasible non-preemptive schedule found")

    pieces: list[ExecutionPiece] = []
    mask, level, machine = full, m - 1, 0
    while mask:
        group = choice[level][mask] if level else mask
        level -= 1
        if not group:
            continue
        timing = single[group]
        if timing is None:
            raise SolverError("oracle lost the timing of a chosen job group")
        pieces.extend(timing.pieces(machine))
        machine += 1
        mask ^= group

    schedule = Schedule(tuple(pieces)).sorted()
    report = check_feasible(instance, schedule, Mode.NON_PREEMPTIVE)
    if not report.feasible:
        raise SolverError(f"oracle produced an infeasible schedule: {report.violations[0].detail}")
    energy = total_energy(instance, schedule)
    logger.debug(f"Oracle optimum {energy:.6g} after {enumerated} timed orders")
    return OracleResult(energy, schedule, enumerated, tolerance)


def convex_preemptive(instance: Instance) -> float:
    """Preemptive optimum from a generic conic solve of the allocation program.

    Raises:
        SolverError: if cvxpy does not report an optimal solution.
    """
    if not instance.jobs:
        return 0.0
    times, active = event_grid(instance.jobs)
    lengths = np.array([float(b - a) for a, b in zip(times, times[1:])])
    index = {job.id: row for row, job in enumerate(instance.jobs)}
    mask = np.zeros((instance.n, len(lengths)))
    for column, members in enumerate(active):
        for job in members:
            mask[index[job.id], column] = 1.0
    weights = np.array([float(job.work) ** instance.alpha for job in instance.jobs])

    x = cp.Variable((instance.n, len(lengths)), nonneg=True)
    execution = cp.sum(x, axis=1)
    objective = cp.Minimize(weights @ cp.power(execution, 1 - instance.alpha))
    constraints = [
        x <= mask * lengths[np.newaxis, :],
        cp.sum(x, axis=0) <= instance.machines * lengths,
    ]
    problem = cp.Problem(objective, constraints)
    with PerformanceTimer("convex_preemptive", n=instance.n, m=instance.machines):
        problem.solve()
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise SolverError(f"convex solve ended with status {problem.status}")
    return float(problem.value)


def gap_instance(n: int, alpha: float = 3.0) -> Instance:
    """n - 1 unit jobs in [2j - 1, 2j] plus J_n with work n over [0, 2n - 1], one machine."""
    if n < 3:
        raise ValueError(f"gap instance needs n >= 3, got {n}")
    jobs = [Job(f"J{j}", 1, 2 * j - 1, 2 * j) for j in range(1, n)]
    jobs.append(Job(f"J{n}", n, 0, 2 * n - 1))
    return Instance(tuple(jobs), 1, alpha, {"family": "gap", "gap_n": n})


def gap_energies(n: int, alpha: float) -> tuple[float, float]:
    """Preemptive optimum 2n - 1 and the non-preemptive construction.

    The construction costs 3 ((n + 2) / 3) ** alpha + n - 3.
    """
    return float(2 * n - 1), 3 * ((n + 2) / 3) ** alpha + (n - 3)


def gap_energies_exact(n: int, alpha: int) -> tuple[Fraction, Fraction]:
    """gap_energies for integral alpha, as exact rationals."""
    return Fraction(2 * n - 1), 3 * Fraction(n + 2, 3) ** alpha + (n - 3)


def gap_schedule(n: int) -> Schedule:
    """J1, J_n and J2 back to back over [1, 4] at speed (n + 2) / 3; every other job at speed 1."""
    if n < 3:
        raise ValueError(f"gap instance needs n >= 3, got {n}")
    speed = Fraction(n + 2, 3)
    first = 1 + 1 / speed
    second = first + n / speed
    pieces = [
        ExecutionPiece("J1", 0, Fraction(1), first, speed),
        ExecutionPiece(f"J{n}", 0, first, second, speed),
        ExecutionPiece("J2", 0, second, Fraction(4), speed),
    ]
    pieces.extend(ExecutionPiece(f"J{j}", 0, 2 * j - 1, 2 * j, 1) for j in range(3, n))
    return Schedule(tuple(pieces)).sorted()
