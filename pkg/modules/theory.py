"""
Theory Module

First-order predictions for the post-selected pointer:
- Mean position and momentum shifts from the weak value
- The general shift of an arbitrary pointer observable
- Reduced formulas for real weak values and real pointers
- First-order success probability and pointer density
"""
from typing import Optional

import numpy as np
from loguru import logger

from config import settings
from models.pointer import Grid, PointerState
from models.system import WeakValue
from models.theory import PointerObservable, ShiftPrediction, SpecialCaseReport
from modules.exceptions import NonHermitianObservableError
from modules.pointer_space import (
    apply_momentum,
    braket,
    d_var_q_dt,
    moments,
    polar_fields,
    probability_flux,
    spectral_derivative,
)


HERMITIAN_CHECK_TOLERANCE = 1e-10


def predict_shifts(w: WeakValue, g: float, phi: PointerState, m: float = 1.0) -> ShiftPrediction:
    """
    Predicted pointer shifts to first order in g

    <q>_f = <q>_i + g a + g b m dVar_q/dt
    <p>_f = <p>_i + 2 g b Var_p

    Args:
        w: Weak value a + ib
        g: Coupling strength
        phi: Initial pointer state
        m: Pointer mass

    Returns:
        ShiftPrediction with absolute shifts and final means
    """
    initial = moments(phi)
    rate = d_var_q_dt(phi, m)
    delta_q = g * w.a + g * w.b * m * rate
    delta_p = 2.0 * g * w.b * initial.var_p
    return ShiftPrediction(
        delta_q=delta_q,
        delta_p=delta_p,
        mean_q_f=initial.mean_q + delta_q,
        mean_p_f=initial.mean_p + delta_p,
    )


# ============================================================================
# General pointer observables
# ============================================================================

def apply_pointer_observable(M: PointerObservable, amplitudes: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply F_1 F_2 ... F_n to the amplitudes, rightmost factor first"""
    result = np.asarray(amplitudes, dtype=complex)
    for factor in reversed(M.factors):
        if factor.representation == "position":
            result = grid.positions ** factor.power * result
        else:
            result = apply_momentum(result, grid, factor.power)
    return result


def check_pointer_observable_hermitian(
    M: PointerObservable,
    grid: Grid,
    pairs: int = 4,
    seed: int = 0,
    tolerance: float = HERMITIAN_CHECK_TOLERANCE
) -> float:
    """
    Compare <phi|M chi> with <M phi|chi> over random unit vectors

    The deviation is measured relative to ||M phi|| + ||M chi||.

    Returns:
        The largest relative deviation found

    Raises:
        NonHermitianObservableError: if it exceeds the tolerance
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        phi, chi = (rng.standard_normal((2, grid.n_points)) + 1j * rng.standard_normal((2, grid.n_points)))
        phi = phi / np.sqrt(grid.norm_squared(phi))
        chi = chi / np.sqrt(grid.norm_squared(chi))
        m_phi = apply_pointer_observable(M, phi, grid)
        m_chi = apply_pointer_observable(M, chi, grid)
        scale = np.sqrt(grid.norm_squared(m_phi)) + np.sqrt(grid.norm_squared(m_chi))
        deviation = abs(braket(phi, m_chi, grid) - braket(m_phi, chi, grid)) / max(scale, 1.0)
        worst = max(worst, deviation)
    if worst > tolerance:
        raise NonHermitianObservableError(M.name, worst)
    return worst


def predict_general_observable(
    w: WeakValue,
    g: float,
    phi: PointerState,
    M: PointerObservable,
    check_hermitian: bool = True
) -> float:
    """
    Predicted <M>_f to first order in g

    <M>_f = <M>_i + i g a <pM - Mp>_i + g b (<pM + Mp>_i - 2 <p>_i <M>_i)

    Raises:
        NonHermitianObservableError: if M is not Hermitian on the grid, or the
            commutator term comes out complex
    """
    grid = phi.grid
    if check_hermitian:
        check_pointer_observable_hermitian(M, grid)

    psi = phi.amplitudes
    norm = braket(psi, psi, grid).real
    m_psi = apply_pointer_observable(M, psi, grid)
    p_psi = apply_momentum(psi, grid)

    mean_m = braket(psi, m_psi, grid) / norm
    mean_p = braket(psi, p_psi, grid).real / norm
    p_m = braket(psi, apply_momentum(m_psi, grid), grid) / norm
    m_p = braket(psi, apply_pointer_observable(M, p_psi, grid), grid) / norm

    commutator = 1j * (p_m - m_p)
    if abs(commutator.imag) > HERMITIAN_CHECK_TOLERANCE * max(1.0, abs(commutator)):
        raise NonHermitianObservableError(M.name, abs(commutator.imag))

    anticommutator = (p_m + m_p).real
    prediction = mean_m.real + g * w.a * commutator.real + g * w.b * (anticommutator - 2.0 * mean_p * mean_m.real)
    logger.debug(f"<{M.name}>_f predicted {prediction:.12g} at g={g}")
    return float(prediction)


# ============================================================================
# Special cases and supplementary first-order quantities
# ============================================================================

def special_case_checks(
    w: WeakValue,
    phi: PointerState,
    g: float = 1.0,
    m: float = 1.0,
    tol: float = 1e-8,
    node_threshold: Optional[float] = None,
    tol_b: Optional[float] = None
) -> SpecialCaseReport:
    """
    Classify which reduced shift formulas apply

    "real-weak-value" when |b| <= tol_b (settings.real_weak_value_tolerance
    by default): delta_q = g a, delta_p = 0.
    "real-pointer" when phi is real up to a global phase (max unmasked
    |S'| <= tol): delta_q = g a, delta_p = 2 g b Var_p.
    Otherwise the full first-order shifts are reported.
    """
    fields = polar_fields(phi, m, node_threshold)
    gradient = fields.max_abs_phase_gradient
    b_floor = settings.real_weak_value_tolerance if tol_b is None else tol_b
    real_weak_value = abs(w.b) <= b_floor
    real_pointer = gradient <= tol

    cases = []
    if real_weak_value:
        cases.append("real-weak-value")
    if real_pointer:
        cases.append("real-pointer")

    initial = moments(phi)
    if real_weak_value:
        delta_q, delta_p = g * w.a, 0.0
    elif real_pointer:
        delta_q, delta_p = g * w.a, 2.0 * g * w.b * initial.var_p
    else:
        full = predict_shifts(w, g, phi, m)
        delta_q, delta_p = full.delta_q, full.delta_p

    return SpecialCaseReport(
        real_weak_value=real_weak_value,
        real_pointer=real_pointer,
        cases=cases,
        delta_q=delta_q,
        delta_p=delta_p,
        success_scale=1.0 + 2.0 * g * w.b * initial.mean_p,
        max_phase_gradient=gradient,
    )


def predict_success_probability(overlap: complex, w: WeakValue, g: float, phi: PointerState) -> float:
    """|<psi_f|psi_i>|^2 (1 + 2 g b <p>_i)"""
    return float(abs(overlap) ** 2 * (1.0 + 2.0 * g * w.b * moments(phi).mean_p))


def first_order_density(w: WeakValue, overlap: complex, g: float, phi: PointerState) -> np.ndarray:
    """
    |alpha(q)|^2 to first order: |<psi_f|psi_i>|^2 (rho - g a rho' + 2 g b rho S')
    """
    rho = np.abs(phi.amplitudes) ** 2
    flux = probability_flux(phi.amplitudes, phi.grid)
    return abs(overlap) ** 2 * (rho - g * w.a * spectral_derivative(rho, phi.grid) + 2.0 * g * w.b * flux)


def integration_by_parts_residual(phi: PointerState) -> float:
    """
    |int 2 rho S' (q - mu) dq + int (q - mu)^2 (rho S')' dq|

    Zero in the continuum for any state that vanishes at the grid edges.
    """
    grid = phi.grid
    offset = grid.positions - moments(phi).mean_q
    flux = probability_flux(phi.amplitudes, grid)
    first = np.sum(2.0 * flux * offset)
    second = np.sum(offset ** 2 * spectral_derivative(flux, grid))
    return float(abs(grid.dq * (first + second)))
