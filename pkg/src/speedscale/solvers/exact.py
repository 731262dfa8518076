"""Exact solvers: the preemptive optimum and the brute-force non-preemptive oracle."""

from dataclasses import dataclass, field

from ..config import OracleConfig
from ..model import FamilyFlags, Instance, Mode, Schedule
from ..oracle import brute_force_nonpreemptive
from ..preemptive import optimal_preemptive


class PreemptiveSolver:
    name = "preemptive"
    description = "Optimal preemptive schedule with migration (max-flow peeling)"
    mode = Mode.PREEMPTIVE

    def applies_to(self, flags: FamilyFlags) -> bool:
        return True

    def bound(self, machines: int, alpha: float) -> float | None:
        return 1.0

    def solve(self, instance: Instance, tolerance: float | None = None) -> Schedule:
        schedule, _ = optimal_preemptive(instance, tolerance)
        return schedule


@dataclass
class OracleSolver:
    """Exhaustive search; refuses instances above the configured size."""

    config: OracleConfig = field(default_factory=OracleConfig)
    name: str = "oracle"
    description: str = "Brute-force optimal non-preemptive schedule (small instances)"
    mode: Mode = Mode.NON_PREEMPTIVE

    def applies_to(self, flags: FamilyFlags) -> bool:
        return True

    def bound(self, machines: int, alpha: float) -> float | None:
        return None

    def solve(self, instance: Instance, tolerance: float | None = None) -> Schedule:
        return brute_force_nonpreemptive(instance, config=self.config).schedule


SOLVERS = [PreemptiveSolver(), OracleSolver()]
