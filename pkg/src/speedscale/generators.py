"""Seeded random instances for each supported family."""

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

import numpy as np

from .config import GeneratorConfig
from .errors import GenerationFailure
from .logging import get_logger
from .model import FamilyFlags, Instance, Job, classify
from .oracle import gap_instance

logger = get_logger("generators")

GENERATOR_NAME = "numpy.random.Philox"

# works are drawn on a grid of tenths
_WORK_STEPS = 10


class Family(StrEnum):
    COMMON_RELEASE = "CommonRelease"
    COMMON_DEADLINE = "CommonDeadline"
    CLIQUE = "Clique"
    AGREEABLE = "Agreeable"
    PURE_LAMINAR = "PureLaminar"
    GAP = "Gap"

    @classmethod
    def parse(cls, name: str) -> "Family":
        """Accept the canonical name or any spelling that differs only in case, '-' or '_'."""
        wanted = name.replace("-", "").replace("_", "").lower()
        for family in cls:
            if family.value.lower() == wanted:
                return family
        raise ValueError(f"unknown family '{name}' (choose from {', '.join(f.value for f in cls)})")

    def holds(self, flags: FamilyFlags) -> bool:
        """Whether classify flags put an instance in this family."""
        if self is Family.GAP:
            return flags.laminar
        return bool(getattr(flags, _FLAG_NAMES[self]))


_FLAG_NAMES = {
    Family.COMMON_RELEASE: "common_release",
    Family.COMMON_DEADLINE: "common_deadline",
    Family.CLIQUE: "clique",
    Family.AGREEABLE: "agreeable",
    Family.PURE_LAMINAR: "pure_laminar",
}


@dataclass(frozen=True)
class GenSpec:
    """Everything that determines a generated instance."""

    family: Family
    n: int
    m: int = 1
    alpha: float = 3.0
    seed: int = 0
    work_min: int = GeneratorConfig.work_min
    work_max: int = GeneratorConfig.work_max
    horizon: int = GeneratorConfig.horizon
    grid: int = GeneratorConfig.grid
    gap_n: int | None = None
    max_attempts: int = GeneratorConfig.max_attempts

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")
        if not 0 < self.work_min <= self.work_max:
            raise ValueError(f"work range must be positive, got [{self.work_min}, {self.work_max}]")
        if self.horizon <= 0 or self.grid < 2:
            raise ValueError(
                f"horizon must be positive and grid at least 2, got {self.horizon}, {self.grid}"
            )
        if self.alpha <= 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if self.family is Family.GAP and (self.gap_n or self.n) < 3:
            raise ValueError("gap instances need gap_n >= 3")

    @classmethod
    def from_config(
        cls, family: Family, n: int, config: GeneratorConfig, **kwargs: object
    ) -> "GenSpec":
        return cls(
            family,
            n,
            work_min=config.work_min,
            work_max=config.work_max,
            horizon=config.horizon,
            grid=config.grid,
            max_attempts=config.max_attempts,
            **kwargs,  # type: ignore[arg-type]
        )


Windows = list[tuple[int, int]]


def _common_release(rng: np.random.Generator, spec: GenSpec) -> Windows:
    return [(0, int(d)) for d in rng.integers(1, spec.grid, size=spec.n, endpoint=True)]


def _common_deadline(rng: np.random.Generator, spec: GenSpec) -> Windows:
    return [(int(r), spec.grid) for r in rng.integers(0, spec.grid - 1, size=spec.n, endpoint=True)]


def _clique(rng: np.random.Generator, spec: GenSpec) -> Windows:
    point = int(rng.integers(1, spec.grid - 1, endpoint=True))
    releases = rng.integers(0, point, size=spec.n, endpoint=True)
    deadlines = rng.integers(point, spec.grid, size=spec.n, endpoint=True)
    return [(int(r), int(d)) for r, d in zip(releases, deadlines)]


def _agreeable(rng: np.random.Generator, spec: GenSpec) -> Windows:
    releases = np.sort(rng.integers(0, spec.grid - 1, size=spec.n, endpoint=True))
    deadlines = np.sort(rng.integers(1, spec.grid, size=spec.n, endpoint=True))
    return [(int(r), int(d)) for r, d in zip(releases, deadlines)]


def _pure_laminar(rng: np.random.Generator, spec: GenSpec) -> Windows:
    mid = spec.grid // 2
    releases = np.sort(rng.integers(0, mid - 1, size=spec.n, endpoint=True))
    deadlines = np.sort(rng.integers(mid + 1, spec.grid, size=spec.n, endpoint=True))[::-1]
    return [(int(r), int(d)) for r, d in zip(releases, deadlines)]


_SAMPLERS: dict[Family, Callable[[np.random.Generator, GenSpec], Windows]] = {
    Family.COMMON_RELEASE: _common_release,
    Family.COMMON_DEADLINE: _common_deadline,
    Family.CLIQUE: _clique,
    Family.AGREEABLE: _agreeable,
    Family.PURE_LAMINAR: _pure_laminar,
}


def generate(spec: GenSpec) -> Instance:
    """Sample an instance of spec.family; the same spec always yields the same instance.

    Times are integer multiples of horizon / grid. Samples with an empty window
    or outside the family are redrawn.

    Args:
        spec: Family, size, exponent, seed and sampling ranges.

    Returns:
        The instance, with generator, seed and family in its metadata.

    Raises:
        GenerationFailure: if max_attempts samples all fail.
    """
    if spec.family is Family.GAP:
        instance = gap_instance(spec.gap_n or spec.n, spec.alpha)
        instance.metadata.update(generator=GENERATOR_NAME, seed=spec.seed)
        return instance

    rng = np.random.Generator(np.random.Philox(spec.seed))
    tick = Fraction(spec.horizon, spec.grid)
    sampler = _SAMPLERS[spec.family]

    for attempt in range(1, spec.max_attempts + 1):
        windows = sampler(rng, spec)
        works = rng.integers(
            spec.work_min * _WORK_STEPS, spec.work_max * _WORK_STEPS, size=spec.n, endpoint=True
        )
        if any(r >= d for r, d in windows):
            logger.debug(f"Attempt {attempt}: empty window, resampling")
            continue
        jobs = tuple(
            Job(f"J{i}", Fraction(int(w), _WORK_STEPS), r * tick, d * tick)
            for i, ((r, d), w) in enumerate(zip(windows, works), start=1)
        )
        metadata = {"generator": GENERATOR_NAME, "seed": spec.seed, "family": spec.family.value}
        instance = Instance(jobs, spec.m, spec.alpha, metadata)
        if spec.family.holds(classify(instance)):
            return instance
        logger.debug(f"Attempt {attempt}: instance left family {spec.family}, resampling")

    logger.warning(f"Gave up generating {spec.family} after {spec.max_attempts} attempts")
    raise GenerationFailure(
        f"no {spec.family} instance with n={spec.n} after {spec.max_attempts} attempts"
    )
