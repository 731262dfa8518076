"""Base interfaces and data types for solvers.

Every algorithm the CLI and the bench harness can run implements the Solver
protocol.
"""

from dataclasses import dataclass
from typing import Protocol

from ..model import FamilyFlags, FeasibilityReport, Instance, Mode, Schedule


@dataclass
class SolveOutcome:
    """One solver run, measured against the certified preemptive lower bound."""

    algorithm: str
    mode: Mode
    schedule: Schedule
    energy: float
    preemptive_lb: float
    ratio: float
    bound: float | None  # proven ratio; None when the algorithm has none
    within_bound: bool
    report: FeasibilityReport

    @property
    def feasible(self) -> bool:
        return self.report.feasible


class Solver(Protocol):
    """Interface all solvers must implement."""

    name: str
    description: str
    mode: Mode

    def applies_to(self, flags: FamilyFlags) -> bool:
        """Whether the solver accepts instances with these family flags.

        Returns:
            True if solve() will not reject the instance for its family.
        """
        ...

    def bound(self, machines: int, alpha: float) -> float | None:
        """Proven ratio against the preemptive optimum, if any."""
        ...

    def solve(self, instance: Instance, tolerance: float | None = None) -> Schedule:
        """Compute a schedule.

        Args:
            instance: The instance to schedule.
            tolerance: Relative tolerance handed to the preemptive solver.

        Returns:
            A schedule feasible in this solver's mode.
        """
        ...
