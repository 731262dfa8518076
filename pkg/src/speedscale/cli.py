"""Command-line interface for Speedscale.

Generate instances, classify them, run the algorithms, check schedules and
benchmark approximation ratios.

Exit codes: 0 on success, 1 when a schedule is infeasible, a ratio exceeds its
bound or a solver fails, 2 on usage, parse and family errors.
"""

import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import fields
from pathlib import Path
from typing import Any

import click

from . import __version__
from . import config as settings
from .config import SECTIONS, create_default_config, load_config
from .errors import (
    BadAnchor,
    ParseError,
    SpeedScaleError,
    TooLarge,
    ValidationError,
    WrongFamily,
)
from .generators import Family
from .logging import configure_logging, get_logger

logger = get_logger("cli")

USAGE_ERRORS = (WrongFamily, ParseError, ValidationError, TooLarge, BadAnchor)


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Report library errors on stderr and exit with 2 (input) or 1 (solver)."""
    try:
        yield
    except USAGE_ERRORS as e:
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        sys.exit(2)
    except SpeedScaleError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        sys.exit(1)
    except OSError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(2)


def _split_list(value: str, convert: Callable[[str], Any], name: str) -> list[Any]:
    try:
        return [convert(part.strip()) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(
            f"expected a comma-separated list, got '{value}'", param_hint=name
        ) from None


def _family(ctx: click.Context, param: click.Parameter, value: str) -> Family:
    try:
        return Family.parse(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from None


def _resolve_tolerance(tolerance: float | None) -> float:
    """CLI flag, then SPEEDSCALE_TOLERANCE, then the settings file."""
    return tolerance if tolerance is not None else load_config().solver.tolerance


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")


@click.group(invoke_without_command=True)
@click.option("--version", is_flag=True, help="Show version information")
@click.option("--verbose", "-v", is_flag=True, help="Show debug output on stderr")
@click.pass_context
def main(ctx: click.Context, version: bool, verbose: bool) -> None:
    """Speedscale - energy-minimizing non-preemptive speed scaling on m processors.

    Examples:

        speedscale gen --family Agreeable --n 10 --m 2 -o inst.json

        speedscale classify inst.json

        speedscale solve --alg auto inst.json -o sched.json

        speedscale check inst.json sched.json

        speedscale bench --families Clique,Agreeable --trials 20 --out ratios.csv

        speedscale gap --n 5 --alpha 2 --verify-oracle
    """
    configure_logging(verbose)

    if version:
        click.echo(f"Speedscale version {__version__}")
        return

    # No subcommand specified, show help
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command("gen")
@click.option("--family", "family", required=True, callback=_family, help="Instance family")
@click.option("--n", "n", type=int, default=10, show_default=True, help="Number of jobs")
@click.option("--m", "m", type=int, default=1, show_default=True, help="Number of machines")
@click.option("--alpha", type=float, help="Power exponent (default: solver.alpha setting)")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@click.option("--gap-n", type=int, help="Size of the gap instance (Gap family only)")
@click.option("--horizon", type=int, help="Latest possible deadline")
@click.option("--work-min", type=int, help="Smallest work")
@click.option("--work-max", type=int, help="Largest work")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Write the instance here")
def gen(
    family: Family,
    n: int,
    m: int,
    alpha: float | None,
    seed: int,
    gap_n: int | None,
    horizon: int | None,
    work_min: int | None,
    work_max: int | None,
    output: Path | None,
) -> None:
    """Generate a random instance of a family."""
    cmd_gen(family, n, m, alpha, seed, gap_n, horizon, work_min, work_max, output)


@main.command("classify")
@click.argument("instance_file", type=click.Path(path_type=Path))
def classify_cmd(instance_file: Path) -> None:
    """Show which families an instance belongs to."""
    cmd_classify(instance_file)


@main.command("solve")
@click.option(
    "--alg",
    type=click.Choice(["auto", "crd", "cd", "clique", "agr", "preemptive", "oracle"]),
    default="auto",
    show_default=True,
    help="Algorithm to run",
)
@click.option("--tolerance", type=float, help="Relative tolerance of the preemptive solver")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Write the schedule here")
@click.argument("instance_file", type=click.Path(path_type=Path))
def solve(alg: str, tolerance: float | None, output: Path | None, instance_file: Path) -> None:
    """Schedule an instance and report its ratio to the preemptive bound."""
    cmd_solve(alg, tolerance, instance_file, output)


@main.command("check")
@click.option("--mode", type=click.Choice(["pre", "npr"]), help="Override the schedule's mode")
@click.argument("instance_file", type=click.Path(path_type=Path))
@click.argument("schedule_file", type=click.Path(path_type=Path))
def check(mode: str | None, instance_file: Path, schedule_file: Path) -> None:
    """Check a schedule against an instance."""
    cmd_check(mode, instance_file, schedule_file)


@main.command("bench")
@click.option("--families", required=True, help="Comma-separated families")
@click.option("--trials", type=int, default=10, show_default=True, help="Instances per grid point")
@click.option("--alphas", default="3", show_default=True, help="Comma-separated power exponents")
@click.option("--machines", default="1", show_default=True, help="Comma-separated machine counts")
@click.option("--seed", type=int, default=0, show_default=True, help="Run seed")
@click.option("--n", "n", type=int, default=10, show_default=True, help="Jobs per instance")
@click.option("--workers", type=int, help="Worker processes (0 = one per CPU)")
@click.option("--tolerance", type=float, help="Relative tolerance of the preemptive solver")
@click.option("--out", type=click.Path(path_type=Path), help="Write the CSV report here")
def bench(
    families: str,
    trials: int,
    alphas: str,
    machines: str,
    seed: int,
    n: int,
    workers: int | None,
    tolerance: float | None,
    out: Path | None,
) -> None:
    """Measure approximation ratios over random instances."""
    cmd_bench(families, trials, alphas, machines, seed, n, workers, tolerance, out)


@main.command("gap")
@click.option("--n", "n", type=int, required=True, help="Gap instance size (n >= 3)")
@click.option("--alpha", type=float, default=3.0, show_default=True, help="Power exponent")
@click.option("--verify-oracle", is_flag=True, help="Also solve the instance exactly")
def gap(n: int, alpha: float, verify_oracle: bool) -> None:
    """Energy gap between preemptive and non-preemptive optima."""
    cmd_gap(n, alpha, verify_oracle)


@main.group("config")
def config_group() -> None:
    """Inspect and edit settings."""
    pass


@config_group.command("init")
def config_init() -> None:
    """Write a commented default settings file."""
    if create_default_config():
        click.echo(f"✓ Created {settings.SETTINGS_FILE}")
    else:
        click.echo(f"{settings.SETTINGS_FILE} already exists")


@config_group.command("show")
def config_show() -> None:
    """Show effective settings (file plus environment overrides)."""
    config = load_config()
    for section_name in SECTIONS:
        section = getattr(config, section_name)
        click.echo(f"[{section_name}]")
        for f in fields(section):
            click.echo(f"{f.name} = {getattr(section, f.name)!r}")
        click.echo()


@config_group.command("set")
@click.argument("key")
@click.argument("value")
def config_set(key: str, value: str) -> None:
    """Set SECTION.KEY to VALUE in the settings file."""
    try:
        stored = settings.set_value(key, value)
    except KeyError:
        click.echo(f"Unknown setting: {key}", err=True)
        sys.exit(2)
    except ValueError:
        click.echo(f"Invalid value for {key}: {value}", err=True)
        sys.exit(2)
    click.echo(f"✓ {key} = {stored!r}")


def cmd_gen(
    family: Family,
    n: int,
    m: int,
    alpha: float | None,
    seed: int,
    gap_n: int | None,
    horizon: int | None,
    work_min: int | None,
    work_max: int | None,
    output: Path | None,
) -> None:
    """Generate an instance and write its document."""
    from dataclasses import replace

    from .generators import GenSpec, generate
    from .io import write_instance

    config = load_config()
    generator = replace(
        config.generator,
        **{
            key: value
            for key, value in (("horizon", horizon), ("work_min", work_min), ("work_max", work_max))
            if value is not None
        },
    )
    try:
        spec = GenSpec.from_config(
            family,
            n,
            generator,
            m=m,
            alpha=config.solver.alpha if alpha is None else alpha,
            seed=seed,
            gap_n=gap_n,
        )
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(2)

    with _exit_on_error():
        instance = generate(spec)
        _emit(write_instance(instance), output)
    logger.info(f"Generated {family} instance with {instance.n} jobs (seed {seed})")


def cmd_classify(instance_file: Path) -> None:
    """Print every family flag of an instance."""
    from .io import read_instance
    from .model import classify

    with _exit_on_error():
        flags = classify(read_instance(instance_file))
    for name, value in vars(flags).items():
        click.echo(f"{name}: {'true' if value else 'false'}")


def cmd_solve(alg: str, tolerance: float | None, instance_file: Path, output: Path | None) -> None:
    """Run one solver and print energy, lower bound, ratio and bound."""
    from .io import read_instance, write_schedule
    from .model import classify
    from .solvers import get_solver, run_solver, select_solver
    from .solvers.exact import OracleSolver

    config = load_config()
    tolerance = _resolve_tolerance(tolerance)

    with _exit_on_error():
        instance = read_instance(instance_file)
        flags = classify(instance)
        if alg == "auto":
            solver = select_solver(flags)
        elif alg == "oracle":
            solver = OracleSolver(config.oracle)
        else:
            solver = get_solver(alg)
            if solver is None:
                click.echo(f"Unknown algorithm: {alg}", err=True)
                sys.exit(2)
            if not solver.applies_to(flags):
                families = ", ".join(flags.names()) or "no family"
                raise WrongFamily(f"{alg} does not accept this instance ({families})")
        outcome = run_solver(solver, instance, tolerance, bound_slack=config.bench.bound_slack)
        if output is not None:
            document = write_schedule(instance, outcome.schedule, outcome.mode)
            output.write_text(document, encoding="utf-8")

    click.echo(f"algorithm: {outcome.algorithm}")
    click.echo(f"energy: {outcome.energy:.10g}")
    click.echo(f"preemptive_lb: {outcome.preemptive_lb:.10g}")
    click.echo(f"ratio: {outcome.ratio:.10g}")
    click.echo(f"bound: {'n/a' if outcome.bound is None else format(outcome.bound, '.10g')}")
    click.echo(f"within_bound: {'true' if outcome.within_bound else 'false'}")

    if not outcome.feasible:
        for violation in outcome.report.violations:
            click.echo(f"{violation.kind}: {violation.job}: {violation.detail}", err=True)
        sys.exit(1)
    if not outcome.within_bound:
        click.echo("Error: ratio exceeds the proven bound", err=True)
        sys.exit(1)


def cmd_check(mode: str | None, instance_file: Path, schedule_file: Path) -> None:
    """Check a schedule file against an instance file."""
    from .io import read_instance, read_schedule
    from .model import Mode, check_feasible, total_energy

    with _exit_on_error():
        instance = read_instance(instance_file)
        declared, schedule = read_schedule(schedule_file)
        if mode is not None:
            declared = Mode.PREEMPTIVE if mode == "pre" else Mode.NON_PREEMPTIVE
        report = check_feasible(instance, schedule, declared)

    if report.feasible:
        with _exit_on_error():
            energy = total_energy(instance, schedule)
        click.echo(f"✓ feasible ({declared.value}), energy {energy:.10g}")
        return

    for violation in report.violations:
        click.echo(f"{violation.kind}: {violation.job}: {violation.detail}")
    click.echo(f"✗ infeasible: {len(report.violations)} violation(s)", err=True)
    sys.exit(1)


def cmd_bench(
    families: str,
    trials: int,
    alphas: str,
    machines: str,
    seed: int,
    n: int,
    workers: int | None,
    tolerance: float | None,
    out: Path | None,
) -> None:
    """Run the benchmark grid and write the CSV report."""
    from .bench import BenchPlan, run_bench, summarize
    from .io import write_report

    config = load_config()
    try:
        plan = BenchPlan(
            families=[Family.parse(name) for name in families.split(",") if name.strip()],
            trials=trials,
            alphas=_split_list(alphas, float, "--alphas"),
            machines=_split_list(machines, int, "--machines"),
            n=n,
            seed=seed,
            workers=config.bench.workers if workers is None else workers,
            tolerance=_resolve_tolerance(tolerance),
            bound_slack=config.bench.bound_slack,
            generator=config.generator,
        )
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(2)

    with _exit_on_error():
        rows = run_bench(plan)
        _emit(write_report(rows), out)

    if out is not None:
        click.echo(
            f"\n{'Family':<16} {'Algorithm':<10} {'Rows':>6} {'Within':>7} "
            f"{'Max ratio':>12} {'Bound':>12}"
        )
        click.echo("-" * 68)
        for row in summarize(rows):
            click.echo(
                f"{row.family:<16} {row.algorithm:<10} {row.count:>6} {row.within:>7} "
                f"{row.max_ratio:>12.6g} {row.bound:>12.6g}"
            )
        click.echo(f"\n✓ Report written to {out}")

    if not all(row.within_bound for row in rows):
        click.echo("Error: some rows are infeasible or exceed their bound", err=True)
        sys.exit(1)


def cmd_gap(n: int, alpha: float, verify_oracle: bool) -> None:
    """Print the closed-form gap energies, optionally checked against the solvers."""
    from .model import Mode, check_feasible, total_energy
    from .oracle import (
        brute_force_nonpreemptive,
        gap_energies,
        gap_energies_exact,
        gap_instance,
        gap_schedule,
    )
    from .preemptive import optimal_preemptive

    if n < 3 or alpha <= 1:
        click.echo("Error: gap needs n >= 3 and alpha > 1", err=True)
        sys.exit(2)

    preemptive, nonpreemptive = gap_energies(n, alpha)
    ratio = nonpreemptive / preemptive
    exact = ""
    if alpha == int(alpha):
        _, exact_npr = gap_energies_exact(n, int(alpha))
        if exact_npr.denominator != 1:
            exact = f" ({exact_npr})"
    click.echo(f"E_pr = {preemptive:.10g}")
    click.echo(f"E_npr = {nonpreemptive:.10g}{exact}")
    click.echo(f"ratio = {ratio:.10g}")
    click.echo(f"ratio / n^(alpha-1) = {ratio / n ** (alpha - 1):.10g}")

    if not verify_oracle:
        return

    config = load_config()
    instance = gap_instance(n, alpha)
    construction = gap_schedule(n)
    report = check_feasible(instance, construction, Mode.NON_PREEMPTIVE)
    click.echo(f"construction feasible: {'true' if report.feasible else 'false'}")
    click.echo(f"construction energy = {total_energy(instance, construction):.10g}")

    with _exit_on_error():
        _, lower = optimal_preemptive(instance, config.solver.tolerance)
        click.echo(f"preemptive solver = {lower:.10g}")
        result = brute_force_nonpreemptive(instance, config=config.oracle)
    gap_to_oracle = (nonpreemptive - result.energy) / result.energy
    click.echo(f"oracle optimum = {result.energy:.10g} ({result.enumerated} orders timed)")
    click.echo(f"construction vs oracle = {gap_to_oracle:.3e} relative")

    if not report.feasible:
        sys.exit(1)


if __name__ == "__main__":
    main()
