"""
Harness Module

This module handles:
- Running a scenario end to end and scoring it against first-order theory
- Convergence sweeps over a coupling ladder with log-log slope fits
- Weak-value estimation from observed pointer shifts
- Seeded random scenario generation for verification batteries
- CSV report emission and reading
"""
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from config import settings
from models.pointer import Grid, PointerState
from models.scenario import (
    REPORT_COLUMNS,
    RESIDUAL_CHANNELS,
    Backend,
    ConvergenceReport,
    GaussianRecipe,
    Scenario,
    ScenarioResult,
    SlopeFit,
    check_ladder,
)
from models.system import Observable, SystemState, WeakValue
from modules.exceptions import (
    DegeneratePointerError,
    InvalidStateError,
    NegligibleSuccessError,
    ReportWriteError,
    ScenarioFileError,
)
from modules.logging_utils import log_with_context, with_run_id
from modules.measurement import simulate
from modules.pointer_space import build_grid, d_var_q_dt, evolve_free, make_gaussian, moments, moments_of
from modules.system_algebra import inner_product, weak_value
from modules.theory import predict_shifts, predict_success_probability


VAR_P_FLOOR = 1e-12


# ============================================================================
# Running scenarios
# ============================================================================

def build_pointer(s: Scenario) -> PointerState:
    """Initial pointer state described by the scenario's recipe"""
    recipe = s.pointer
    if isinstance(recipe, GaussianRecipe):
        return make_gaussian(s.grid, q0=recipe.q0, p0=recipe.p0, sigma=recipe.sigma, chirp=recipe.chirp)
    return PointerState.normalized(s.grid, recipe.amplitudes)


@with_run_id
def run_scenario(s: Scenario, phi: Optional[PointerState] = None) -> ScenarioResult:
    """
    Simulate one scenario and compare the post-selected pointer with theory

    Post-selected moments are normalized by <alpha|alpha>. Residuals are
    absolute differences of the simulated and predicted mean shifts, and of the
    simulated and first-order success probabilities.

    Args:
        s: Scenario to run
        phi: Pre-built initial pointer (built from the recipe when omitted)

    Raises:
        NegligibleSuccessError: if <alpha|alpha> is below the hard floor
    """
    spec = s.coupling()
    phi = build_pointer(s) if phi is None else phi
    w = weak_value(spec.observable, spec.psi_i, spec.psi_f)

    alpha = simulate(spec, phi, s.backend)
    if alpha.success_prob < settings.success_error_threshold:
        raise NegligibleSuccessError(alpha.success_prob, settings.success_error_threshold)

    moments_i = moments(phi)
    moments_f = moments_of(alpha.amplitudes, alpha.grid)
    prediction = predict_shifts(w, s.g, phi, s.mass)
    succ_pred = predict_success_probability(inner_product(spec.psi_f, spec.psi_i), w, s.g, phi)

    result = ScenarioResult(
        scenario_id=s.scenario_id,
        backend=s.backend,
        g=s.g,
        weak_value=w,
        moments_i=moments_i,
        moments_f=moments_f,
        prediction=prediction,
        dvarq_dt=d_var_q_dt(phi, s.mass),
        succ_sim=alpha.success_prob,
        succ_pred=succ_pred,
        r_q=abs(moments_f.mean_q - moments_i.mean_q - prediction.delta_q),
        r_p=abs(moments_f.mean_p - moments_i.mean_p - prediction.delta_p),
        r_succ=abs(alpha.success_prob - succ_pred),
    )
    logger.debug(
        f"Scenario {s.scenario_id} ({s.backend.value}, g={s.g}): "
        f"r_q={result.r_q:.3e} r_p={result.r_p:.3e} r_succ={result.r_succ:.3e}"
    )
    return result


def _fit_channel(g_values: np.ndarray, residuals: np.ndarray, floor: float) -> SlopeFit:
    if np.all(residuals <= floor):
        return SlopeFit(exact=True)
    logs = np.log(np.maximum(residuals, np.finfo(float).tiny))
    slope, intercept = np.polyfit(np.log(g_values), logs, 1)
    return SlopeFit(exact=False, slope=float(slope), intercept=float(intercept))


@with_run_id
def sweep_g(
    s: Scenario,
    g_ladder: Sequence[float],
    exact_floor: Optional[float] = None
) -> ConvergenceReport:
    """
    Run the scenario with the exact backend at every g of the ladder

    A channel whose residuals all sit at or below the exact floor is flagged
    ``exact`` instead of being fitted.

    Raises:
        InvalidLadderError: if the ladder has fewer than four points or is not
            strictly increasing
    """
    floor = settings.exact_residual_floor if exact_floor is None else exact_floor
    g_values = [float(g) for g in g_ladder]
    check_ladder(g_values)

    base = s.with_backend(Backend.EXACT)
    phi = build_pointer(base)
    results = [run_scenario(base.with_g(g), phi) for g in g_values]

    residuals = {ch: [r.residual(ch) for r in results] for ch in RESIDUAL_CHANNELS}
    fits = {
        ch: _fit_channel(np.asarray(g_values), np.asarray(values), floor)
        for ch, values in residuals.items()
    }
    for ch, fit in fits.items():
        if fit.exact:
            log_with_context("info", f"Channel {ch}: residuals at floor, fit flagged exact")
        else:
            log_with_context("info", f"Channel {ch}: slope {fit.slope:.3f}, intercept {fit.intercept:.3f}")
    return ConvergenceReport(g_values=g_values, residuals=residuals, fits=fits, results=results)


@with_run_id
def sweep_sigma(s: Scenario, sigmas: Sequence[float]) -> List[ScenarioResult]:
    """
    Run a Gaussian-pointer scenario at fixed g over a list of pointer widths

    Exploratory only: broad pointers weaken the measurement, but no
    convergence contract is attached to this regime.
    """
    if not isinstance(s.pointer, GaussianRecipe):
        raise InvalidStateError("scenario", "sigma sweeps need a gaussian pointer recipe")
    results = []
    for sigma in sigmas:
        recipe = s.pointer.model_copy(update={"sigma": float(sigma)})
        results.append(run_scenario(s.model_copy(update={"pointer": recipe})))
    return results


def check_variance_rate(s: Scenario, dt: float = 1e-4) -> Tuple[float, float]:
    """
    Algebraic dVar_q/dt against a central difference under the scenario's Hamiltonian

    Returns:
        (algebraic rate, finite-difference rate)
    """
    phi = build_pointer(s)
    spec = s.evolution(dt)
    forward = moments(evolve_free(phi, spec, 1)).var_q
    backward = moments(evolve_free(phi, spec, -1)).var_q
    return d_var_q_dt(phi, s.mass), (forward - backward) / (2.0 * dt)


# ============================================================================
# Weak-value estimation
# ============================================================================

def estimate_weak_value_from_moments(
    delta_q: float,
    delta_p: float,
    g: float,
    var_p: float,
    dvarq_dt: float,
    m: float = 1.0
) -> WeakValue:
    """
    Invert the first-order shift formulas

    b = delta_p / (2 g Var_p), a = delta_q / g - b m dVar_q/dt

    Raises:
        InvalidStateError: if g is zero
        DegeneratePointerError: if Var_p is below 1e-12
    """
    if g == 0:
        raise InvalidStateError("coupling", "g must be nonzero to estimate a weak value")
    if var_p < VAR_P_FLOOR:
        raise DegeneratePointerError(var_p)
    b = delta_p / (2.0 * g * var_p)
    a = delta_q / g - b * m * dvarq_dt
    return WeakValue(a=a, b=b)


def estimate_weak_value(delta_q: float, delta_p: float, g: float, phi: PointerState, m: float = 1.0) -> WeakValue:
    """Estimate (a, b) from observed mean shifts of the pointer ``phi``"""
    return estimate_weak_value_from_moments(
        delta_q, delta_p, g, moments(phi).var_p, d_var_q_dt(phi, m), m
    )


# ============================================================================
# Random scenario batteries
# ============================================================================

def random_state(rng: np.random.Generator, dim: int) -> SystemState:
    """Haar-random pure state from a normalized complex Gaussian vector"""
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return SystemState(amplitudes=vec / np.linalg.norm(vec))


def random_observable(rng: np.random.Generator, dim: int) -> Observable:
    """(G + G^dagger) / 2 with G a unit-variance complex Gaussian matrix"""
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    return Observable(matrix=0.5 * (G + G.conj().T))


def generate_scenario(
    seed: int,
    index: int,
    g: float = 1e-3,
    grid: Optional[Grid] = None,
    pointer: Optional[GaussianRecipe] = None,
    dim: Optional[int] = None,
    min_overlap: Optional[float] = None,
    backend: Backend = Backend.EXACT,
    max_draws: int = 1000
) -> Scenario:
    """
    Reproducible random scenario for a verification battery

    The generator is seeded with (seed, index), so every scenario can be
    rebuilt on its own. Post-selections with |<psi_f|psi_i>| below
    ``min_overlap`` are redrawn.

    Args:
        seed: Battery seed
        index: Scenario index within the battery
        g: Coupling strength
        grid: Pointer grid (512 points over length 40 by default)
        pointer: Gaussian recipe (sigma=1, chirp=0.25 by default)
        dim: System dimension (drawn from 2..4 when omitted)
        min_overlap: Overlap floor (settings.battery_min_overlap by default)
        backend: Backend recorded in the scenario
    """
    floor = settings.battery_min_overlap if min_overlap is None else min_overlap
    rng = np.random.default_rng([seed, index])
    dim = int(rng.integers(2, 5)) if dim is None else dim

    A = random_observable(rng, dim)
    psi_i = random_state(rng, dim)
    for draw in range(max_draws):
        psi_f = random_state(rng, dim)
        if abs(inner_product(psi_f, psi_i)) >= floor:
            break
        logger.debug(f"Scenario {seed}/{index}: redrawing post-selection (draw {draw})")
    else:
        raise InvalidStateError("scenario battery", f"no post-selection above overlap {floor} in {max_draws} draws")

    return Scenario(
        scenario_id=f"{seed}-{index:04d}",
        observable=A,
        psi_i=psi_i,
        psi_f=psi_f,
        g=g,
        pointer=pointer or GaussianRecipe(sigma=1.0, chirp=0.25),
        grid=grid or build_grid(512, 40.0),
        backend=backend,
        seed=seed,
    )


# ============================================================================
# Reports
# ============================================================================

def results_frame(results: Sequence[ScenarioResult]) -> pd.DataFrame:
    """Results in the given order with the fixed report columns"""
    return pd.DataFrame([r.to_row() for r in results], columns=REPORT_COLUMNS)


def emit_report(results: Sequence[ScenarioResult], path: Union[str, Path, TextIO, None] = None) -> None:
    """
    Write the results CSV, one row per result, floats with 17 significant digits

    Args:
        results: Scenario results, written in the given order
        path: Output file or open text stream (stdout when omitted)

    Raises:
        ReportWriteError: if the destination cannot be written
    """
    target = sys.stdout if path is None else path
    try:
        results_frame(results).to_csv(
            target, index=False, float_format=settings.csv_float_format, lineterminator="\n"
        )
    except OSError as e:
        raise ReportWriteError(str(path), str(e))
    logger.debug(f"Wrote {len(results)} result rows to {path or '<stdout>'}")


def fits_frame(report: ConvergenceReport) -> pd.DataFrame:
    """One row per residual channel: exact flag, slope and intercept"""
    rows = [
        {"channel": ch, "exact": fit.exact, "slope": fit.slope, "intercept": fit.intercept}
        for ch, fit in report.fits.items()
    ]
    return pd.DataFrame(rows, columns=["channel", "exact", "slope", "intercept"])


def emit_fits(report: ConvergenceReport, path: Union[str, Path, TextIO, None] = None) -> None:
    """Write the slope fits of a sweep as CSV"""
    target = sys.stdout if path is None else path
    try:
        fits_frame(report).to_csv(
            target, index=False, float_format=settings.csv_float_format, lineterminator="\n"
        )
    except OSError as e:
        raise ReportWriteError(str(path), str(e))


def read_report(path: Union[str, Path]) -> pd.DataFrame:
    """
    Load a results CSV written by emit_report

    Raises:
        ScenarioFileError: if the file is missing, unparseable or lacks report columns
    """
    try:
        frame = pd.read_csv(path, dtype={"scenario_id": str, "backend": str}, float_precision="round_trip")
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise ScenarioFileError(str(path), str(e))
    missing = [c for c in REPORT_COLUMNS if c not in frame.columns]
    if missing:
        raise ScenarioFileError(str(path), f"missing columns {missing}")
    return frame


def estimate_from_report(frame: pd.DataFrame, m: float = 1.0) -> pd.DataFrame:
    """
    Estimated weak values for every row of a results table

    Rows with g = 0 or a degenerate pointer get NaN estimates.
    """
    records: List[Dict[str, object]] = []
    for row in frame.itertuples(index=False):
        try:
            est = estimate_weak_value_from_moments(
                row.mean_q_f_sim - row.mean_q_i,
                row.mean_p_f_sim - row.mean_p_i,
                row.g,
                row.var_p,
                row.dvarq_dt,
                m,
            )
            a_est, b_est = est.a, est.b
        except (InvalidStateError, DegeneratePointerError) as e:
            log_with_context("warning", f"Row {row.scenario_id}: {e}")
            a_est, b_est = float("nan"), float("nan")
        records.append({
            "scenario_id": row.scenario_id,
            "backend": row.backend,
            "g": row.g,
            "a": row.a,
            "b": row.b,
            "a_est": a_est,
            "b_est": b_est,
        })
    return pd.DataFrame(records, columns=["scenario_id", "backend", "g", "a", "b", "a_est", "b_est"])
