"""Tests for seeded instance generation."""

from fractions import Fraction

import pytest

from speedscale.config import GeneratorConfig
from speedscale.errors import GenerationFailure
from speedscale.generators import GENERATOR_NAME, Family, GenSpec, generate
from speedscale.model import classify


class TestFamily:
    """Tests for family name parsing."""

    @pytest.mark.parametrize("name", ["Clique", "clique", "CLIQUE"])
    def test_parse_case_insensitive(self, name: str):
        """Test family names in any case."""
        assert Family.parse(name) is Family.CLIQUE

    @pytest.mark.parametrize("name", ["common-release", "common_release", "CommonRelease"])
    def test_parse_separators(self, name: str):
        """Test family names with dashes and underscores."""
        assert Family.parse(name) is Family.COMMON_RELEASE

    def test_parse_unknown(self):
        """Test an unknown family name."""
        with pytest.raises(ValueError, match="unknown family"):
            Family.parse("laminar-ish")


class TestGenSpec:
    """Tests for GenSpec validation."""

    def test_rejects_bad_sizes(self):
        """Test that non-positive n and m are refused."""
        with pytest.raises(ValueError):
            GenSpec(Family.CLIQUE, 0)
        with pytest.raises(ValueError):
            GenSpec(Family.CLIQUE, 3, m=0)

    def test_rejects_bad_work_range(self):
        """Test that an empty work range is refused."""
        with pytest.raises(ValueError):
            GenSpec(Family.CLIQUE, 3, work_min=5, work_max=2)

    def test_rejects_alpha_at_most_one(self):
        """Test that alpha must exceed one."""
        with pytest.raises(ValueError):
            GenSpec(Family.AGREEABLE, 3, alpha=1.0)

    def test_from_config(self):
        """Test building a spec from generator settings."""
        config = GeneratorConfig(work_min=2, work_max=3, horizon=50, grid=500)
        spec = GenSpec.from_config(Family.AGREEABLE, 4, config, m=2, seed=9)
        assert (spec.work_min, spec.work_max, spec.horizon, spec.grid) == (2, 3, 50, 500)
        assert (spec.m, spec.seed) == (2, 9)


class TestGenerate:
    """Tests for generate."""

    @pytest.mark.parametrize(
        "family",
        [
            Family.COMMON_RELEASE,
            Family.COMMON_DEADLINE,
            Family.CLIQUE,
            Family.AGREEABLE,
            Family.PURE_LAMINAR,
        ],
    )
    def test_instances_belong_to_family(self, family: Family):
        """Test that generated instances classify into their family."""
        for seed in range(5):
            instance = generate(GenSpec(family, 8, m=2, seed=seed))
            assert instance.n == 8
            assert family.holds(classify(instance))

    def test_same_spec_same_instance(self):
        """Test that a spec always yields the same instance."""
        spec = GenSpec(Family.CLIQUE, 6, seed=42)
        assert generate(spec) == generate(spec)

    def test_seed_changes_instance(self):
        """Test that another seed yields another instance."""
        first = generate(GenSpec(Family.AGREEABLE, 6, seed=1))
        second = generate(GenSpec(Family.AGREEABLE, 6, seed=2))
        assert first != second

    def test_times_on_grid_and_works_in_range(self):
        """Test times on the grid and works within range."""
        spec = GenSpec(
            Family.COMMON_RELEASE, 10, seed=3, horizon=20, grid=40, work_min=2, work_max=4
        )
        instance = generate(spec)
        tick = Fraction(1, 2)
        for job in instance.jobs:
            assert (job.release / tick).denominator == 1
            assert (job.deadline / tick).denominator == 1
            assert 0 <= job.release < job.deadline <= 20
            assert 2 <= job.work <= 4
            assert (job.work * 10).denominator == 1

    def test_metadata(self):
        """Test generator metadata on the instance."""
        instance = generate(GenSpec(Family.CLIQUE, 3, seed=11))
        assert instance.metadata == {"generator": GENERATOR_NAME, "seed": 11, "family": "Clique"}

    def test_gap_family(self):
        """Test that the Gap family returns the gap instance."""
        instance = generate(GenSpec(Family.GAP, 1, gap_n=4, alpha=2))
        assert instance.n == 4
        assert instance.metadata["gap_n"] == 4
        assert instance.alpha == 2

    def test_gives_up_after_max_attempts(self):
        """Test GenerationFailure after max_attempts samples."""
        # on a two-tick grid a quarter of the clique windows come out empty
        spec = GenSpec(Family.CLIQUE, 60, grid=2, max_attempts=3)
        with pytest.raises(GenerationFailure):
            generate(spec)
