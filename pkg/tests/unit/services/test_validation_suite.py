"""Unit tests for the named validation checks."""

import pytest
import numpy as np

from src.services.validation_suite import CHECKS, CheckResult, run_checks


class TestRegistry:
    """Test the check registry."""

    def test_check_count(self):
        """Test the suite covers catalog, operators and comixture identities."""
        assert len(CHECKS) >= 20
        assert "prox_l1 vs oracle" in CHECKS
        assert "comixture firm nonexpansiveness" in CHECKS
        assert "condat_vu step-size guardrail" in CHECKS

    def test_tolerances_positive(self):
        """Test every check declares a positive tolerance."""
        assert all(check.tolerance > 0 for check in CHECKS.values())


class TestRunChecks:
    """Test running the suite."""

    def test_all_pass(self):
        """Test every check passes on a few instances."""
        results = run_checks(instances=3, seed=0)

        assert len(results) == len(CHECKS)
        failed = [(r.name, r.defect, r.detail) for r in results if not r.passed]
        assert failed == []

    def test_selected_names(self):
        """Test a subset runs in the requested order."""
        names = ["dft parseval", "adjoint convolution"]
        results = run_checks(instances=2, names=names)

        assert [r.name for r in results] == names
        assert all(isinstance(r, CheckResult) for r in results)

    def test_unknown_name(self):
        """Test unknown check names are rejected."""
        with pytest.raises(KeyError):
            run_checks(names=["no such check"])

    def test_deterministic(self):
        """Test the same seed gives the same defects."""
        names = ["prox_l1 vs oracle", "comixture firm nonexpansiveness"]
        first = run_checks(instances=3, seed=7, names=names)
        second = run_checks(instances=3, seed=7, names=names)

        assert [r.defect for r in first] == [r.defect for r in second]

    def test_broken_prox_is_named(self, mocker):
        """Test replacing a catalog prox with the identity fails its check."""
        mocker.patch('src.services.validation_suite.prox_l1', side_effect=lambda x, gamma: np.array(x, copy=True))
        results = {r.name: r for r in run_checks(instances=4, names=["prox_l1 vs oracle", "dft parseval"])}

        assert not results["prox_l1 vs oracle"].passed
        assert results["prox_l1 vs oracle"].defect > results["prox_l1 vs oracle"].tolerance
        assert results["dft parseval"].passed

    def test_raising_check_is_reported(self, mocker):
        """Test a check that raises fails with the exception in its detail."""
        mocker.patch('src.services.validation_suite.prox_l1', side_effect=RuntimeError("boom"))
        result = run_checks(instances=2, names=["prox_l1 vs oracle"])[0]

        assert not result.passed
        assert result.defect == float('inf')
        assert result.detail == "RuntimeError: boom"
