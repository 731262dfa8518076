"""Benchmark harness: generate instances, run every applicable algorithm, record ratios.

Each trial draws its own seed from a SeedSequence keyed on the run seed and
the trial coordinates, so rows do not depend on worker count or order.
"""

import math
import os
from collections import defaultdict
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import BenchConfig, GeneratorConfig
from .errors import SpeedScaleError
from .generators import Family, GenSpec, generate
from .logging import PerformanceTimer, get_logger
from .model import classify
from .preemptive import optimal_preemptive
from .solvers import applicable_solvers, run_solver

logger = get_logger("bench")


@dataclass(frozen=True)
class RatioRecord:
    """One CSV row: an algorithm's energy on one instance against the preemptive bound."""

    instance_id: str
    family: str
    n: int
    m: int
    alpha: float
    algorithm: str
    energy: float
    preemptive_lb: float
    ratio: float
    bound: float
    within_bound: bool
    feasible: bool  # not written to the report


@dataclass
class BenchPlan:
    """The grid a bench run covers."""

    families: list[Family]
    trials: int
    alphas: list[float]
    machines: list[int]
    n: int = 10
    seed: int = 0
    workers: int = BenchConfig.workers
    tolerance: float | None = None
    bound_slack: float = BenchConfig.bound_slack
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)

    def __post_init__(self) -> None:
        self.families = [Family(f) for f in self.families]
        if Family.GAP in self.families:
            raise ValueError("Gap is not a bench family: no approximation algorithm accepts it")
        if self.trials < 1 or self.n < 1:
            raise ValueError(f"trials and n must be positive, got {self.trials}, {self.n}")
        if not self.families or not self.alphas or not self.machines:
            raise ValueError("bench needs at least one family, alpha and machine count")

    def trials_in_order(self) -> list["Trial"]:
        return [
            Trial(family, fi, m, alpha, ai, t, self)
            for fi, family in enumerate(self.families)
            for m in self.machines
            for ai, alpha in enumerate(self.alphas)
            for t in range(self.trials)
        ]


@dataclass(frozen=True)
class Trial:
    family: Family
    family_index: int
    m: int
    alpha: float
    alpha_index: int
    trial: int
    plan: BenchPlan

    @property
    def instance_id(self) -> str:
        return f"{self.family.value}-m{self.m}-a{self.alpha:g}-t{self.trial}"


def trial_seed(seed: int, family_index: int, m: int, alpha_index: int, trial: int) -> int:
    """Child seed of one trial."""
    sequence = np.random.SeedSequence([seed, family_index, m, alpha_index, trial])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _failed(trial: Trial, algorithm: str, n: int) -> RatioRecord:
    return RatioRecord(
        instance_id=trial.instance_id,
        family=trial.family.value,
        n=n,
        m=trial.m,
        alpha=trial.alpha,
        algorithm=algorithm,
        energy=math.nan,
        preemptive_lb=math.nan,
        ratio=math.nan,
        bound=math.nan,
        within_bound=False,
        feasible=False,
    )


def run_trial(trial: Trial) -> list[RatioRecord]:
    """Generate one instance and run every applicable algorithm on it.

    Failures are logged and recorded as infeasible rows.
    """
    plan = trial.plan
    spec = GenSpec.from_config(
        trial.family,
        plan.n,
        plan.generator,
        m=trial.m,
        alpha=trial.alpha,
        seed=trial_seed(plan.seed, trial.family_index, trial.m, trial.alpha_index, trial.trial),
    )

    with PerformanceTimer("bench_trial", instance=trial.instance_id) as timer:
        try:
            instance = generate(spec)
            _, lower = optimal_preemptive(instance, plan.tolerance)
        except SpeedScaleError as e:
            logger.error(f"Trial {trial.instance_id} failed before solving: {e}")
            timer.add_metric("failed", True)
            return [_failed(trial, "none", plan.n)]

        records = []
        for solver in applicable_solvers(classify(instance)):
            try:
                outcome = run_solver(
                    solver,
                    instance,
                    plan.tolerance,
                    bound_slack=plan.bound_slack,
                    lower_bound=lower,
                )
            except SpeedScaleError as e:
                logger.error(f"Trial {trial.instance_id}: {solver.name} failed: {e}")
                records.append(_failed(trial, solver.name, instance.n))
                continue
            records.append(
                RatioRecord(
                    instance_id=trial.instance_id,
                    family=trial.family.value,
                    n=instance.n,
                    m=instance.machines,
                    alpha=instance.alpha,
                    algorithm=outcome.algorithm,
                    energy=outcome.energy,
                    preemptive_lb=outcome.preemptive_lb,
                    ratio=outcome.ratio,
                    bound=outcome.bound if outcome.bound is not None else math.nan,
                    within_bound=outcome.within_bound and outcome.feasible,
                    feasible=outcome.feasible,
                )
            )
        timer.add_metric("rows", len(records))
    return records


def run_bench(plan: BenchPlan) -> list[RatioRecord]:
    """Run every trial of the plan.

    Args:
        plan: Families, grid, trial count, seed and worker count.

    Returns:
        Rows in (family, m, alpha, trial, algorithm) order, whatever the
        number of workers.
    """
    trials = plan.trials_in_order()
    workers = plan.workers or os.cpu_count() or 1
    logger.info(f"Bench: {len(trials)} trials on {workers} worker(s)")

    with PerformanceTimer("bench", trials=len(trials), workers=workers):
        if workers == 1:
            results: Iterable[list[RatioRecord]] = map(run_trial, trials)
            rows = [row for batch in results for row in batch]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                rows = [row for batch in executor.map(run_trial, trials) for row in batch]

    violations = sum(1 for row in rows if not row.within_bound)
    if violations:
        logger.warning(f"Bench: {violations} rows outside their bound or infeasible")
    return rows


@dataclass
class SummaryRow:
    family: str
    algorithm: str
    count: int = 0
    within: int = 0
    infeasible: int = 0
    max_ratio: float = 0.0
    bound: float = 0.0


def summarize(records: Iterable[RatioRecord]) -> list[SummaryRow]:
    """Per (family, algorithm): row count, rows within bound, infeasible rows, worst ratio."""
    table: dict[tuple[str, str], SummaryRow] = {}
    bounds: dict[tuple[str, str], list[float]] = defaultdict(list)
    for record in records:
        key = (record.family, record.algorithm)
        row = table.setdefault(key, SummaryRow(*key))
        row.count += 1
        row.within += record.within_bound
        row.infeasible += not record.feasible
        if not math.isnan(record.ratio):
            row.max_ratio = max(row.max_ratio, record.ratio)
        if not math.isnan(record.bound):
            bounds[key].append(record.bound)
    for key, row in table.items():
        row.bound = max(bounds[key], default=math.nan)
    return list(table.values())
