import pytest

from modules.system_algebra import weak_value
from modules.verification import AcceptanceBattery, CheckResult, CheckStatus, qubit_scenario, reference_pointers


@pytest.fixture
def battery():
    return AcceptanceBattery(seed=7, cases=4)


class TestFixedChecks:

    @pytest.mark.parametrize("check", [
        "check_weak_value_arithmetic",
        "check_theorem_shifts",
        "check_convergence_order",
        "check_special_cases",
        "check_derivation_consistency",
        "check_continuity",
        "check_variance_rate",
        "check_integration_by_parts",
    ])
    def test_check_passes(self, battery, check):
        result = getattr(battery, check)()
        assert result.passed, result.message

    def test_convergence_reports_all_slopes(self, battery):
        result = battery.check_convergence_order()
        assert set(result.details["slopes"]) == {"q", "p", "succ"}

    def test_default_scenario_weak_value(self):
        s = qubit_scenario()
        assert abs(weak_value(s.observable, s.psi_i, s.psi_f).value - 1j) <= 1e-12

    def test_reference_pointers_are_distinct(self):
        pointers = reference_pointers()
        assert set(pointers) == {"real", "chirped", "moving", "narrow"}


class TestRandomBatteries:

    def test_unconditional_identity(self, battery):
        assert battery.check_unconditional_identity().passed

    def test_oracle_equivalence(self, battery):
        result = battery.check_oracle_equivalence()
        assert result.passed, result.message
        assert "8 scenarios" in result.message

    def test_estimator_round_trip_keeps_results(self, battery):
        result = battery.check_estimator_round_trip()
        assert result.passed, result.message
        assert [r.scenario_id for r in battery.results] == [f"7-{i:04d}" for i in range(4)]

    def test_determinism(self, battery):
        assert battery.check_determinism().passed


class TestSummary:

    def test_errors_become_failures(self, mocker, battery):
        mocker.patch.object(battery, "check_continuity", side_effect=RuntimeError("boom"))
        result = battery._guarded("continuity", battery.check_continuity)
        assert result.status == CheckStatus.FAILED
        assert "boom" in result.message

    def test_summary_counts(self, mocker, battery):
        names = [
            "check_weak_value_arithmetic", "check_theorem_shifts", "check_convergence_order",
            "check_special_cases", "check_unconditional_identity", "check_oracle_equivalence",
            "check_continuity", "check_variance_rate", "check_derivation_consistency",
            "check_estimator_round_trip", "check_determinism", "check_integration_by_parts",
        ]
        for name in names:
            mocker.patch.object(
                battery, name, return_value=CheckResult(name=name, status=CheckStatus.PASSED)
            )
        mocker.patch.object(
            battery, "check_continuity",
            return_value=CheckResult(name="continuity", status=CheckStatus.FAILED, message="too large"),
        )
        summary = battery.check_all()
        assert summary["status"] == "failed"
        assert summary["summary"] == {"total": 12, "passed": 11, "failed": 1}
        assert summary["checks"][6]["status"] == "failed"

    def test_to_dict(self):
        data = CheckResult(name="x", status=CheckStatus.PASSED, message="ok", details={"v": 1}).to_dict()
        assert data["status"] == "passed"
        assert data["details"] == {"v": 1}
        assert CheckResult(name="x", status=CheckStatus.FAILED, message="bad").to_row() == {
            "name": "x", "status": "failed", "message": "bad"
        }

    @pytest.mark.slow
    def test_full_battery_passes(self):
        summary = AcceptanceBattery(seed=7, cases=10).check_all()
        failed = [c["name"] for c in summary["checks"] if c["status"] != "passed"]
        assert summary["status"] == "passed", failed
