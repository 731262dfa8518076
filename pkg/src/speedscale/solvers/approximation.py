"""The four non-preemptive approximation algorithms as solvers."""

from collections.abc import Callable
from dataclasses import dataclass

from ..approx import agreeable_algo, cd, clique_algo, crd
from ..model import FamilyFlags, Instance, Mode, Schedule, theorem_bound


@dataclass(frozen=True)
class ApproximationSolver:
    """A family-restricted algorithm with a proven ratio."""

    name: str
    description: str
    family: str  # FamilyFlags attribute that must hold
    algorithm: Callable[[Instance, float | None], Schedule]
    mode: Mode = Mode.NON_PREEMPTIVE

    def applies_to(self, flags: FamilyFlags) -> bool:
        return bool(getattr(flags, self.family))

    def bound(self, machines: int, alpha: float) -> float | None:
        return theorem_bound(self.name, machines, alpha)

    def solve(self, instance: Instance, tolerance: float | None = None) -> Schedule:
        return self.algorithm(instance, tolerance)


SOLVERS = [
    ApproximationSolver(
        "crd", "EDF on shrunk preemptive times, common release date", "common_release", crd
    ),
    ApproximationSolver("cd", "Backward crd from a common deadline", "common_deadline", cd),
    ApproximationSolver(
        "clique", "Split at the earliest deadline into cd and crd parts", "clique", clique_algo
    ),
    ApproximationSolver(
        "agr", "Partition into halved cliques, agreeable instances", "agreeable", agreeable_algo
    ),
]
