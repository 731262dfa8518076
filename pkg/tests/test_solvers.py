"""Tests for solver discovery, selection and the solve-and-check pipeline."""

import pytest

from speedscale.errors import WrongFamily
from speedscale.model import Instance, Mode, classify
from speedscale.oracle import gap_instance
from speedscale.solvers import (
    applicable_solvers,
    get_solver,
    get_solver_info,
    list_solvers,
    reload_solvers,
    run_solver,
    select_solver,
)
from speedscale.solvers.exact import OracleSolver


class TestDiscovery:
    """Tests for solver discovery."""

    def test_all_solvers_found(self):
        """Test that discovery finds every solver."""
        reload_solvers()
        assert set(list_solvers()) == {"crd", "cd", "clique", "agr", "preemptive", "oracle"}

    def test_get_solver_is_case_insensitive(self):
        """Test solver lookup in any case."""
        solver = get_solver("CRD")
        assert solver is not None
        assert solver.name == "crd"

    def test_unknown_solver(self):
        """Test lookup of an unknown solver."""
        assert get_solver("nope") is None
        assert get_solver_info("nope") is None

    def test_solver_info(self):
        """Test solver info dictionaries."""
        assert get_solver_info("preemptive") == {
            "name": "preemptive",
            "description": get_solver("preemptive").description,
            "mode": "preemptive",
        }
        assert get_solver_info("agr")["mode"] == "nonpreemptive"


class TestSelection:
    """Tests for auto selection."""

    def test_tightest_bound_first(self, common_release_instance: Instance):
        """Test that solvers are ordered by bound."""
        names = [s.name for s in applicable_solvers(classify(common_release_instance))]
        assert names == ["crd", "cd", "clique", "agr"]
        assert select_solver(classify(common_release_instance)).name == "crd"

    def test_clique_instance(self, clique_instance: Instance):
        """Test auto selection on a clique."""
        assert select_solver(classify(clique_instance)).name == "clique"

    def test_agreeable_instance(self, agreeable_instance: Instance):
        """Test auto selection on an agreeable instance."""
        assert select_solver(classify(agreeable_instance)).name == "agr"

    def test_no_applicable_algorithm(self):
        """Test WrongFamily when no algorithm applies."""
        with pytest.raises(WrongFamily):
            select_solver(classify(gap_instance(4)))


class TestRunSolver:
    """Tests for run_solver."""

    def test_crd_outcome(self, common_release_instance: Instance):
        """Test the crd outcome on three unit jobs."""
        outcome = run_solver(get_solver("crd"), common_release_instance)
        assert outcome.feasible
        assert outcome.mode is Mode.NON_PREEMPTIVE
        assert outcome.energy == pytest.approx(6.75)
        assert outcome.preemptive_lb == pytest.approx(4.5)
        assert outcome.ratio == pytest.approx(1.5)
        assert outcome.bound == pytest.approx(1.5)
        assert outcome.within_bound

    def test_precomputed_lower_bound(self, common_release_instance: Instance):
        """Test a lower bound passed in by the caller."""
        outcome = run_solver(get_solver("crd"), common_release_instance, lower_bound=6.75)
        assert outcome.ratio == pytest.approx(1.0)

    def test_bound_violation_is_flagged(self, common_release_instance: Instance):
        """Test that a ratio above the bound is flagged."""
        outcome = run_solver(get_solver("crd"), common_release_instance, lower_bound=1.0)
        assert outcome.feasible
        assert not outcome.within_bound

    def test_preemptive_solver(self, mixed_instance: Instance):
        """Test the preemptive solver outcome."""
        outcome = run_solver(get_solver("preemptive"), mixed_instance)
        assert outcome.feasible
        assert outcome.mode is Mode.PREEMPTIVE
        assert outcome.ratio == pytest.approx(1.0)
        assert outcome.within_bound

    def test_oracle_has_no_bound(self, clique_instance: Instance):
        """Test that the oracle reports no bound."""
        outcome = run_solver(OracleSolver(), clique_instance)
        assert outcome.bound is None
        assert outcome.within_bound
        assert outcome.ratio == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.parametrize("name", ["crd", "cd", "clique", "agr"])
    def test_every_algorithm_within_bound_on_identical_windows(
        self, name: str, common_release_instance: Instance
    ):
        """Test every algorithm on identical windows."""
        outcome = run_solver(get_solver(name), common_release_instance)
        assert outcome.feasible
        assert outcome.within_bound
