"""
Acceptance Battery Module

This module runs the named property and oracle checks that the simulator
must pass, each reported as a CheckResult, and summarises them the way a
health endpoint would.
"""
import io
import traceback
from enum import Enum
from typing import Any, Callable, Dict, List, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from models.pointer import EvolutionSpec
from models.scenario import GaussianRecipe, Scenario, ScenarioResult
from models.theory import PointerObservable
from models.system import WeakValue
from modules.harness import (
    build_pointer,
    emit_report,
    estimate_weak_value,
    generate_scenario,
    run_scenario,
    sweep_g,
)
from modules.logging_utils import LogContext
from modules.measurement import (
    couple_postselect_exact,
    full_tensor_reference,
    joint_state_after_kick,
    unconditional_moments,
)
from modules.pointer_space import (
    build_grid,
    continuity_residual,
    d_var_q_dt,
    evolve_free,
    make_gaussian,
    moments,
)
from modules.system_algebra import eigendecompose, expectation, make_state, named_observable, weak_value
from modules.theory import integration_by_parts_residual, predict_general_observable, predict_shifts


CONVERGENCE_LADDER = (1e-3, 3e-3, 1e-2, 3e-2)
SLOPE_TOLERANCE = 0.2
UNCONDITIONAL_COUPLINGS = (0.1, 0.5, 1.0)
ORACLE_COUPLING = 0.3

QUBIT_PRE = (1.0, 1.0)
IMAGINARY_POST = (1.0, 1j)            # Pauli-Z weak value i
AMPLIFIED_POST = (-1 - 2j, 1.0)        # Pauli-Z weak value 1 + i


def qubit_scenario(
    psi_f: Sequence[complex] = IMAGINARY_POST,
    g: float = 1e-3,
    sigma: float = 1.0,
    chirp: float = 0.5,
    p0: float = 0.0,
    n_points: int = 1024,
    length: float = 80.0,
    observable: str = "pauli-z",
    psi_i: Sequence[complex] = QUBIT_PRE,
    scenario_id: str = "qubit"
) -> Scenario:
    """Qubit scenario with a Gaussian pointer; defaults give A_w = i with a chirped pointer"""
    return Scenario(
        scenario_id=scenario_id,
        observable=named_observable(observable),
        psi_i=make_state(psi_i),
        psi_f=make_state(psi_f),
        g=g,
        pointer=GaussianRecipe(sigma=sigma, chirp=chirp, p0=p0),
        grid=build_grid(n_points, length),
    )


def reference_pointers(n_points: int = 1024, length: float = 80.0) -> Dict[str, object]:
    """Pointer family used by the derivation and integration-by-parts checks"""
    grid = build_grid(n_points, length)
    return {
        "real": make_gaussian(grid, sigma=1.0),
        "chirped": make_gaussian(grid, sigma=1.0, chirp=0.5),
        "moving": make_gaussian(grid, q0=1.5, p0=0.7, sigma=1.2, chirp=0.25),
        "narrow": make_gaussian(grid, q0=-2.0, p0=-0.4, sigma=0.6, chirp=-0.3),
    }


class CheckStatus(str, Enum):
    """Outcome of a single acceptance check"""
    PASSED = "passed"
    FAILED = "failed"


class CheckResult(BaseModel):
    """Outcome and measured quantities of one named check"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    status: CheckStatus
    message: str = ""
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASSED

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {
            "name": self.name,
            "status": self.status.value,
            "message": self.message,
            "details": self.details,
        }

    def to_row(self) -> Dict[str, str]:
        """Flat record for the checks CSV"""
        return {"name": self.name, "status": self.status.value, "message": self.message}


def _verdict(name: str, ok: bool, message: str, **details) -> CheckResult:
    status = CheckStatus.PASSED if ok else CheckStatus.FAILED
    return CheckResult(name=name, status=status, message=message, details=details)


class AcceptanceBattery:
    """
    Property and oracle checks for the whole simulator

    Random batteries draw ``cases`` scenarios for the estimator round trip,
    half as many for the unconditional identity and twice as many for the
    tensor-product oracle, all seeded from ``seed``.
    """

    def __init__(self, seed: int = 7, cases: int = 100):
        self.seed = seed
        self.cases = cases
        self.checks: List[CheckResult] = []
        self.results: List[ScenarioResult] = []

    # ------------------------------------------------------------------
    # System algebra and first-order shifts
    # ------------------------------------------------------------------

    def check_weak_value_arithmetic(self) -> CheckResult:
        """Pauli-Z weak value i, and eigenstates returning their eigenvalue"""
        Z = named_observable("pauli-z")
        w = weak_value(Z, make_state(QUBIT_PRE), make_state(IMAGINARY_POST))
        deviation = abs(w.value - 1j)

        X = named_observable("pauli-x")
        spectrum = eigendecompose(X)
        eigen_dev = 0.0
        for i, lam in enumerate(spectrum.eigenvalues):
            e = make_state(spectrum.eigenvectors[:, i])
            eigen_dev = max(eigen_dev, abs(weak_value(X, e, e).value - lam))

        ok = deviation <= 1e-12 and eigen_dev <= 1e-12
        return _verdict(
            "weak_value_arithmetic", ok,
            f"|A_w - i| = {deviation:.2e}, eigenstate deviation {eigen_dev:.2e}",
            deviation=deviation, eigen_deviation=eigen_dev,
        )

    def check_theorem_shifts(self) -> CheckResult:
        """Exact-backend shifts of the chirped A_w = i scenario against the first-order prediction"""
        small = run_scenario(qubit_scenario(g=1e-3, scenario_id="shift-1e-3"))
        large = run_scenario(qubit_scenario(g=1e-2, scenario_id="shift-1e-2"))
        ok = small.r_q <= 1e-5 and small.r_p <= 1e-5 and large.r_q <= 1e-3
        return _verdict(
            "theorem_shifts", ok,
            f"g=1e-3: r_q={small.r_q:.2e}, r_p={small.r_p:.2e}; g=1e-2: r_q={large.r_q:.2e}",
            delta_q=small.delta_q_sim, delta_p=small.delta_p_sim,
            r_q=small.r_q, r_p=small.r_p, r_q_large=large.r_q,
        )

    def check_convergence_order(self) -> CheckResult:
        """Quadratic residuals in all three channels over the coupling ladder"""
        scenario = qubit_scenario(psi_f=AMPLIFIED_POST, p0=0.7, scenario_id="convergence")
        report = sweep_g(scenario, CONVERGENCE_LADDER)
        slopes = {ch: fit.slope for ch, fit in report.fits.items()}
        ok = all(
            not fit.exact and abs(fit.slope - 2.0) <= SLOPE_TOLERANCE
            for fit in report.fits.values()
        )
        return _verdict(
            "convergence_order", ok,
            ", ".join(f"{ch}: {s if s is None else round(s, 3)}" for ch, s in slopes.items()),
            slopes=slopes,
        )

    def check_special_cases(self) -> CheckResult:
        """Real weak value leaves <p> unmoved; a real pointer leaves <q> unmoved to O(g^2)"""
        g = 1e-3
        real_w = run_scenario(qubit_scenario(
            psi_f=(np.cos(0.3), np.sin(0.3)), psi_i=(np.cos(0.3), np.sin(0.3)),
            observable="pauli-x", g=g, scenario_id="real-weak-value",
        ))
        real_pointer = run_scenario(qubit_scenario(chirp=0.0, g=g, scenario_id="real-pointer"))
        var_p = real_pointer.moments_i.var_p

        ok = (
            real_w.r_p <= 1e-9
            and abs(real_pointer.delta_q_sim) <= 10 * g ** 2
            and abs(real_pointer.delta_p_sim - 2 * g * var_p) <= 10 * g ** 2
        )
        return _verdict(
            "special_cases", ok,
            f"b=0: r_p={real_w.r_p:.2e}; real pointer: dq={real_pointer.delta_q_sim:.2e}",
            r_p_real_weak_value=real_w.r_p,
            delta_q_real_pointer=real_pointer.delta_q_sim,
        )

    def check_derivation_consistency(self) -> CheckResult:
        """General-observable formula with M = q and M = p against the shift formulas"""
        w = WeakValue(a=0.5, b=1.0)
        g = 1e-2
        worst = 0.0
        for phi in reference_pointers().values():
            shifts = predict_shifts(w, g, phi)
            initial = moments(phi)
            q_f = predict_general_observable(w, g, phi, PointerObservable.position())
            p_f = predict_general_observable(w, g, phi, PointerObservable.momentum())
            worst = max(worst, abs(q_f - (initial.mean_q + shifts.delta_q)))
            worst = max(worst, abs(p_f - (initial.mean_p + shifts.delta_p)))
        return _verdict(
            "derivation_consistency", worst <= 1e-10,
            f"max deviation {worst:.2e}", max_deviation=worst,
        )

    # ------------------------------------------------------------------
    # Pointer dynamics
    # ------------------------------------------------------------------

    def check_continuity(self) -> CheckResult:
        """Continuity residual small and shrinking when N doubles and dt halves"""
        coarse_grid = build_grid(1024, 80.0)
        fine_grid = build_grid(2048, 80.0)
        coarse = continuity_residual(
            make_gaussian(coarse_grid, p0=0.7, sigma=1.0), EvolutionSpec(dt=1e-4)
        )
        fine = continuity_residual(
            make_gaussian(fine_grid, p0=0.7, sigma=1.0), EvolutionSpec(dt=5e-5)
        )
        ok = coarse <= 1e-6 and fine < coarse
        return _verdict(
            "continuity", ok, f"N=1024: {coarse:.2e}, N=2048: {fine:.2e}",
            coarse=coarse, fine=fine,
        )

    def check_variance_rate(self) -> CheckResult:
        """Algebraic dVar_q/dt against 4 c sigma^2 / m and a central difference, with and without V"""
        grid = build_grid(1024, 80.0)
        dt = 1e-4
        potential = np.cos(grid.positions)
        worst = 0.0
        for chirp, sigma, mass in ((0.25, 1.0, 1.0), (0.5, 1.0, 1.0), (-0.3, 1.5, 2.0)):
            phi = make_gaussian(grid, sigma=sigma, chirp=chirp)
            rate = d_var_q_dt(phi, mass)
            worst = max(worst, abs(rate - 4 * chirp * sigma ** 2 / mass))
            for V in (None, potential):
                spec = EvolutionSpec(mass=mass, dt=dt, potential=V)
                forward = moments(evolve_free(phi, spec, 1)).var_q
                backward = moments(evolve_free(phi, spec, -1)).var_q
                worst = max(worst, abs(rate - (forward - backward) / (2 * dt)))
        return _verdict(
            "variance_rate", worst <= 1e-6, f"max deviation {worst:.2e}", max_deviation=worst,
        )

    def check_integration_by_parts(self) -> CheckResult:
        """Boundary-free integration by parts on the periodic grid"""
        worst = max(integration_by_parts_residual(phi) for phi in reference_pointers().values())
        return _verdict(
            "integration_by_parts", worst <= 1e-10, f"max residual {worst:.2e}", max_residual=worst,
        )

    # ------------------------------------------------------------------
    # Random batteries
    # ------------------------------------------------------------------

    def check_unconditional_identity(self) -> CheckResult:
        """Unconditional mean shift equals g <A> and the joint state keeps unit norm"""
        grid = build_grid(512, 60.0)
        count = max(1, self.cases // 2)
        shift_dev = 0.0
        norm_dev = 0.0
        for index in range(count):
            s = generate_scenario(self.seed, index, grid=grid)
            phi = build_pointer(s)
            mean_a = expectation(s.observable, s.psi_i)
            initial = moments(phi).mean_q
            for g in UNCONDITIONAL_COUPLINGS:
                spec = s.with_g(g).coupling()
                shift = unconditional_moments(spec, phi).mean_q - initial
                shift_dev = max(shift_dev, abs(shift - g * mean_a))
                joint = joint_state_after_kick(spec, phi)
                norm_dev = max(norm_dev, abs(grid.dq * np.sum(np.abs(joint) ** 2) - 1.0))
        ok = shift_dev <= 1e-9 and norm_dev <= 1e-12
        return _verdict(
            "unconditional_identity", ok,
            f"{count} scenarios: shift deviation {shift_dev:.2e}, norm deviation {norm_dev:.2e}",
            shift_deviation=shift_dev, norm_deviation=norm_dev,
        )

    def check_oracle_equivalence(self) -> CheckResult:
        """Branch-sum coupling against the brute-force joint-space computation"""
        count = 2 * self.cases
        worst = 0.0
        for index in range(count):
            grid = build_grid(256 if index % 2 else 512, 40.0)
            s = generate_scenario(self.seed, index, g=ORACLE_COUPLING, grid=grid)
            phi = build_pointer(s)
            spec = s.coupling()
            exact = couple_postselect_exact(spec, phi)
            oracle = full_tensor_reference(spec, phi)
            worst = max(worst, float(np.max(np.abs(exact.amplitudes - oracle.amplitudes))))
        return _verdict(
            "oracle_equivalence", worst <= 1e-10,
            f"{count} scenarios: max amplitude deviation {worst:.2e}", max_deviation=worst,
        )

    def check_estimator_round_trip(self) -> CheckResult:
        """Estimated (a, b) within 5 g of the weak value over the random battery"""
        g = 1e-3
        worst = 0.0
        self.results = []
        for index in range(self.cases):
            s = generate_scenario(self.seed, index, g=g)
            phi = build_pointer(s)
            result = run_scenario(s, phi)
            self.results.append(result)
            est = estimate_weak_value(result.delta_q_sim, result.delta_p_sim, g, phi, s.mass)
            worst = max(worst, abs(est.a - result.weak_value.a), abs(est.b - result.weak_value.b))
        return _verdict(
            "estimator_round_trip", worst <= 5 * g,
            f"{self.cases} scenarios: max deviation {worst:.2e} (limit {5 * g:.0e})", max_deviation=worst,
        )

    def check_determinism(self) -> CheckResult:
        """Rebuilding part of the battery from the seed gives byte-identical CSV"""
        count = min(self.cases, 5)

        def render() -> str:
            buffer = io.StringIO()
            emit_report([run_scenario(generate_scenario(self.seed, i)) for i in range(count)], buffer)
            return buffer.getvalue()

        ok = render() == render()
        return _verdict("determinism", ok, f"{count} scenarios rendered twice")

    # ------------------------------------------------------------------

    def _guarded(self, name: str, check: Callable[[], CheckResult]) -> CheckResult:
        try:
            result = check()
        except Exception as e:
            logger.error(f"Check {name} raised: {e}\n{traceback.format_exc()}")
            return CheckResult(name=name, status=CheckStatus.FAILED, message=f"Check error: {str(e)}")
        if result.passed:
            logger.info(f"Check {result.name} passed: {result.message}")
        else:
            logger.error(f"Check {result.name} failed: {result.message}")
        return result

    def check_all(self) -> Dict:
        """Run all checks and summarise them"""
        registry = [
            ("weak_value_arithmetic", self.check_weak_value_arithmetic),
            ("theorem_shifts", self.check_theorem_shifts),
            ("convergence_order", self.check_convergence_order),
            ("special_cases", self.check_special_cases),
            ("unconditional_identity", self.check_unconditional_identity),
            ("oracle_equivalence", self.check_oracle_equivalence),
            ("continuity", self.check_continuity),
            ("variance_rate", self.check_variance_rate),
            ("derivation_consistency", self.check_derivation_consistency),
            ("estimator_round_trip", self.check_estimator_round_trip),
            ("determinism", self.check_determinism),
            ("integration_by_parts", self.check_integration_by_parts),
        ]
        with LogContext(f"acceptance battery seed={self.seed} cases={self.cases}"):
            self.checks = [self._guarded(name, check) for name, check in registry]

        passed = len([c for c in self.checks if c.passed])
        return {
            "status": CheckStatus.PASSED.value if passed == len(self.checks) else CheckStatus.FAILED.value,
            "seed": self.seed,
            "cases": self.cases,
            "checks": [c.to_dict() for c in self.checks],
            "summary": {
                "total": len(self.checks),
                "passed": passed,
                "failed": len(self.checks) - passed,
            }
        }
