"""Solver discovery and registration for Speedscale.

Solvers are discovered by scanning the modules of this package. Each module
must export:
- SOLVERS: list[Solver] - the solvers it provides, in presentation order
"""

import importlib
import math
from pathlib import Path

from ..config import BenchConfig
from ..errors import WrongFamily
from ..logging import get_logger
from ..model import FamilyFlags, Instance, Mode, check_feasible, total_energy
from ..preemptive import optimal_preemptive
from .base import SolveOutcome, Solver

logger = get_logger("solvers")

# Cache of discovered solvers
_solvers: dict[str, Solver] | None = None

# auto selection prefers the tightest proven bound
AUTO_PREFERENCE = ("crd", "cd", "clique", "agr")


def discover_solvers() -> dict[str, Solver]:
    """Discover all solvers in the solvers package.

    Returns:
        A dictionary mapping solver names to solver objects.
    """
    global _solvers

    if _solvers is not None:
        return _solvers

    _solvers = {}
    package_dir = Path(__file__).parent

    for item in sorted(package_dir.glob("*.py")):
        if item.stem.startswith("_") or item.stem == "base":
            continue
        try:
            module = importlib.import_module(f".{item.stem}", package=__name__)
        except ImportError as e:
            logger.warning(f"Skipping solver module {item.stem}: {e}")
            continue
        for solver in getattr(module, "SOLVERS", []):
            _solvers[solver.name] = solver

    return _solvers


def get_solver(name: str) -> Solver | None:
    """Get a solver by name.

    Args:
        name: The solver name (e.g., "crd", "agr", "preemptive")

    Returns:
        The solver, or None if not found.
    """
    return discover_solvers().get(name.lower())


def list_solvers() -> list[str]:
    """List all available solver names."""
    return list(discover_solvers().keys())


def get_solver_info(name: str) -> dict[str, str] | None:
    """Get metadata about a solver.

    Args:
        name: The solver name

    Returns:
        A dictionary with solver info, or None if not found.
    """
    solver = get_solver(name)
    if solver is None:
        return None
    return {"name": solver.name, "description": solver.description, "mode": solver.mode.value}


def applicable_solvers(flags: FamilyFlags) -> list[Solver]:
    """Every approximation algorithm whose family holds, tightest bound first."""
    solvers = discover_solvers()
    return [
        solvers[name]
        for name in AUTO_PREFERENCE
        if name in solvers and solvers[name].applies_to(flags)
    ]


def select_solver(flags: FamilyFlags) -> Solver:
    """The applicable approximation algorithm with the tightest proven bound.

    Raises:
        WrongFamily: if no approximation algorithm accepts the instance.
    """
    candidates = applicable_solvers(flags)
    if not candidates:
        raise WrongFamily(
            "no algorithm applies: the instance is not clique, agreeable "
            "or common-release/deadline"
        )
    return candidates[0]


def run_solver(
    solver: Solver,
    instance: Instance,
    tolerance: float | None = None,
    *,
    bound_slack: float = BenchConfig.bound_slack,
    lower_bound: float | None = None,
) -> SolveOutcome:
    """Solve, check feasibility against the instance and compare with the preemptive bound.

    lower_bound, when given, is a precomputed certified preemptive bound for instance.
    """
    schedule = solver.solve(instance, tolerance)
    report = check_feasible(instance, schedule, solver.mode)
    energy = total_energy(instance, schedule)
    if lower_bound is not None:
        lower = lower_bound
    elif instance.jobs:
        _, lower = optimal_preemptive(instance, tolerance)
    else:
        lower = 0.0

    if lower > 0:
        ratio = energy / lower
    else:
        ratio = 1.0 if energy == 0 else math.inf
    bound = solver.bound(instance.machines, instance.alpha)
    within = bound is None or ratio <= bound * (1 + bound_slack)
    if not report.feasible:
        logger.warning(f"{solver.name} produced {len(report.violations)} violations")
    elif not within:
        logger.warning(f"{solver.name} ratio {ratio:.6g} exceeds bound {bound:.6g}")

    return SolveOutcome(
        algorithm=solver.name,
        mode=Mode(solver.mode),
        schedule=schedule,
        energy=energy,
        preemptive_lb=lower,
        ratio=ratio,
        bound=bound,
        within_bound=within,
        report=report,
    )


def reload_solvers() -> None:
    """Force reload of the solver cache."""
    global _solvers
    _solvers = None
    discover_solvers()


__all__ = [
    "SolveOutcome",
    "Solver",
    "applicable_solvers",
    "discover_solvers",
    "get_solver",
    "get_solver_info",
    "list_solvers",
    "reload_solvers",
    "run_solver",
    "select_solver",
]
