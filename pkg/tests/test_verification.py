"""Tests for fracladder.verification module."""

import json
from dataclasses import replace

import pytest

from fracladder.config import RunConfig, Tolerances
from fracladder.verification import (
    CheckKind,
    CheckRecord,
    VerificationReport,
    VerificationSuite,
)


@pytest.fixture
def quick_config():
    """Small but valid configuration for fast suite runs."""
    return replace(RunConfig(), alphas=(1.5, 2.0), levels=(0, 2), points=4096, random_members=5, workers=2)


class TestCheckRecord:
    """Test suite for CheckRecord."""

    def test_passes_within_tolerance(self):
        """Test that residual <= tolerance passes."""
        record = CheckRecord.measure("x", CheckKind.KERNEL, 1.5, 0, 1e-14, 1e-12)

        assert record.passed

    def test_fails_above_tolerance(self):
        """Test that residual > tolerance fails."""
        assert not CheckRecord.measure("x", CheckKind.KERNEL, 1.5, 0, 1e-8, 1e-12).passed

    def test_zero_tolerance_always_fails(self):
        """Test that a zero tolerance fails even an exact zero residual."""
        assert not CheckRecord.measure("x", CheckKind.KERNEL, 1.5, 0, 0.0, 0.0).passed

    def test_non_finite_residual_fails(self):
        """Test that NaN residuals fail."""
        assert not CheckRecord.measure("x", CheckKind.NUMERIC, 1.5, 0, float("nan"), 1.0).passed

    def test_to_dict(self):
        """Test the serialized field names."""
        data = CheckRecord.measure("x", CheckKind.NODE, 1.5, 2, 1e-12, 1e-9, "detail").to_dict()

        assert data == {
            'name': "x", 'kind': "node", 'alpha': 1.5, 'n': 2,
            'residual': 1e-12, 'tolerance': 1e-9, 'passed': True, 'detail': "detail",
        }


class TestVerificationReport:
    """Test suite for VerificationReport."""

    def test_overall_pass_is_conjunction(self):
        """Test that one failing record fails the report."""
        good = CheckRecord.measure("a", CheckKind.KERNEL, 1.5, 0, 0.0, 1.0)
        bad = CheckRecord.measure("b", CheckKind.EIGEN, 1.5, 0, 2.0, 1.0)

        assert VerificationReport([good], "0.1.0").passed
        report = VerificationReport([good, bad], "0.1.0")
        assert not report.passed
        assert report.failing() == [bad]
        assert report.summary_by_kind() == {
            'kernel': {'total': 1, 'passed': 1},
            'eigen_identity': {'total': 1, 'passed': 0},
        }

    def test_save(self, tmp_path):
        """Test that the saved JSON carries the documented fields."""
        report = VerificationReport([CheckRecord.measure("a", CheckKind.KERNEL, 1.5, 0, 0.0, 1.0)], "0.1.0")
        path = tmp_path / "report.json"
        report.save(path)

        data = json.loads(path.read_text(encoding="utf-8"))
        assert set(data) == {'engine_version', 'timestamp', 'passed', 'summary', 'records', 'e2_comparison'}
        assert data['passed'] is True
        assert data['engine_version'] == "0.1.0"


class TestVerificationSuite:
    """Test suite for VerificationSuite."""

    def test_sweep_includes_config_alphas(self):
        """Test that configured alphas join the 1.1..2.0 sweep."""
        suite = VerificationSuite(replace(RunConfig(), alphas=(1.25,)))

        assert 1.25 in suite.sweep
        assert 1.1 in suite.sweep and 2.0 in suite.sweep

    @pytest.mark.parametrize("kind", [
        CheckKind.KERNEL,
        CheckKind.SYMBOLS,
        CheckKind.CLOSED_FORM_STATE,
        CheckKind.PRINTED_ENERGY,
        CheckKind.E2_PRINTED,
        CheckKind.EIGEN,
        CheckKind.RECOVERY,
        CheckKind.NODE,
    ])
    def test_exact_groups_pass(self, quick_config, kind):
        """Test that every exact identity group passes at default tolerances."""
        records = VerificationSuite(quick_config).groups()[kind]()

        assert records
        assert all(r.passed for r in records), [r.name for r in records if not r.passed]

    def test_factorization_group_passes(self, quick_config):
        """Test the randomized factorization check."""
        records = VerificationSuite(quick_config).check_factorization()

        assert len(records) == 10
        assert all(r.passed for r in records)

    def test_numeric_group_passes(self, quick_config):
        """Test transform, Gaussian, cross-representation and residual checks."""
        records = VerificationSuite(quick_config).check_numeric()

        assert len(records) == 3 + len(quick_config.alphas) * len(quick_config.levels)
        assert all(r.passed for r in records), [(r.name, r.residual) for r in records if not r.passed]

    def test_e2_check_at_alpha_two(self, quick_config):
        """Test that the alpha = 2 sweep entry adds the constant-five check."""
        records = VerificationSuite(quick_config).check_printed_e2()

        assert any(r.name == "printed E_2 = 5 at alpha=2" for r in records)

    def test_kernel_records_measured_residual(self, quick_config):
        """Test that kernel records carry the rounding-level coefficient of A phi_0."""
        records = VerificationSuite(quick_config).check_kernel()

        assert {r.kind for r in records} == {CheckKind.KERNEL}
        assert all(0.0 <= r.residual <= 1e-14 for r in records)

    def test_zero_tolerance_fails_everything(self, quick_config):
        """Test that tolerance 0 fails every residual check."""
        config = replace(quick_config, tolerances=Tolerances().overridden(0.0))
        records = VerificationSuite(config).check_kernel()

        assert records
        assert not any(r.passed for r in records)

    def test_run_reports_progress(self, quick_config, mocker):
        """Test that run() calls the progress callback around every group."""
        suite = VerificationSuite(quick_config, engine_version="9.9.9")
        for kind in suite.groups():
            mocker.patch.object(suite, f"check_{_method(kind)}", return_value=[
                CheckRecord.measure(kind.value, kind, 1.5, 0, 0.0, 1.0)])
        progress = mocker.Mock()

        report = suite.run(progress=progress)

        assert report.passed
        assert report.engine_version == "9.9.9"
        assert progress.call_count == 2 * len(CheckKind)
        progress.assert_any_call("kernel", "running", "")
        progress.assert_any_call("kernel", "done", "1/1 passed")

    def test_e2_divergence_only_when_requested(self, quick_config):
        """Test that the printed E_2 divergence is attached with verbatim_e2."""
        suite = VerificationSuite(replace(quick_config, verbatim_e2=True))
        divergence = suite.e2_divergence()

        assert len(divergence) == len(suite.sweep)
        by_alpha = {entry['alpha']: entry for entry in divergence}
        assert by_alpha[2.0]['agreeing_points'] == by_alpha[2.0]['points']
        assert by_alpha[1.5]['agreeing_points'] < by_alpha[1.5]['points']


def _method(kind):
    return {
        CheckKind.KERNEL: "kernel",
        CheckKind.SYMBOLS: "symbols",
        CheckKind.FACTORIZATION: "factorization",
        CheckKind.CLOSED_FORM_STATE: "closed_form_states",
        CheckKind.PRINTED_ENERGY: "printed_energies",
        CheckKind.E2_PRINTED: "printed_e2",
        CheckKind.EIGEN: "eigen_identity",
        CheckKind.RECOVERY: "recovery",
        CheckKind.NODE: "nodes",
        CheckKind.NUMERIC: "numeric",
    }[kind]
