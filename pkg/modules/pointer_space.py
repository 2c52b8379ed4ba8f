"""
Pointer Space Module

This module handles:
- Periodic position grids with spectral (FFT) momentum operators
- Chirped Gaussian pointer states and exact spectral translation
- Pointer moments, polar decomposition and probability current
- Instantaneous variance growth rate from the Heisenberg relations
- Split-operator free evolution and the continuity-equation check
- Two-column wavefunction dumps
"""
from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru import logger

from config import settings
from models.pointer import EvolutionSpec, Grid, Moments, PointerState, PolarFields
from modules.exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    ReportWriteError,
    ScenarioFileError,
    TailMassError,
)


# ============================================================================
# Grid and spectral operators
# ============================================================================

def build_grid(n_points: int, length: float) -> Grid:
    """Uniform periodic grid; n_points must be a power of two >= 64"""
    return Grid(n_points=int(n_points), length=float(length))


def apply_momentum(amplitudes: np.ndarray, grid: Grid, power: int = 1) -> np.ndarray:
    """p^power applied spectrally: ifft(k^power * fft(phi))"""
    return np.fft.ifft(grid.wavenumbers ** power * np.fft.fft(amplitudes))


def spectral_derivative(values: np.ndarray, grid: Grid) -> np.ndarray:
    """d/dq via the FFT; real input gives real output"""
    derivative = np.fft.ifft(1j * grid.wavenumbers * np.fft.fft(values))
    if np.isrealobj(values):
        return derivative.real
    return derivative


def braket(bra: np.ndarray, ket: np.ndarray, grid: Grid) -> complex:
    """Grid quadrature of conj(bra) * ket"""
    return complex(grid.dq * np.vdot(bra, ket))


# ============================================================================
# State construction
# ============================================================================

def make_gaussian(
    grid: Grid,
    q0: float = 0.0,
    p0: float = 0.0,
    sigma: float = 1.0,
    chirp: float = 0.0
) -> PointerState:
    """
    Chirped Gaussian phi(q) ~ exp(-(q-q0)^2/(4 sigma^2) + i c (q-q0)^2 + i p0 q)

    Var_q equals sigma^2, Var_p equals 1/(4 sigma^2) + 4 c^2 sigma^2 and the
    variance grows at 4 c sigma^2 / m.

    Raises:
        TailMassError: if q0 is closer than 8 sigma to a grid edge
    """
    if sigma <= 0:
        raise InvalidStateError("gaussian", f"sigma must be positive, got {sigma}")
    x = grid.positions - q0
    amplitudes = np.exp(-x ** 2 / (4.0 * sigma ** 2) + 1j * chirp * x ** 2 + 1j * p0 * grid.positions)
    clearance = 0.5 * grid.length - abs(q0)
    if 8.0 * sigma > clearance:
        raise TailMassError(
            grid.tail_mass(amplitudes),
            settings.tail_mass_limit,
            f"gaussian with 8*sigma={8 * sigma:g} beyond edge clearance {clearance:g}",
        )
    if chirp == 0.0 and p0 == 0.0:
        amplitudes = amplitudes.real.astype(complex)
    return PointerState.normalized(grid, amplitudes)


def translate(phi: PointerState, s: float) -> PointerState:
    """
    phi(q - s), applied as the momentum-space phase exp(-i s k)

    Exact for band-limited states; the result must still satisfy the tail guard.
    """
    if s == 0.0:
        return phi
    shifted = np.fft.ifft(np.exp(-1j * s * phi.grid.wavenumbers) * np.fft.fft(phi.amplitudes))
    return PointerState(grid=phi.grid, amplitudes=shifted)


# ============================================================================
# Moments and polar decomposition
# ============================================================================

def moments_of(amplitudes: np.ndarray, grid: Grid) -> Moments:
    """
    Moments of arbitrary (possibly sub-normalized) amplitudes

    Position moments use quadrature over |phi|^2, momentum moments the
    discrete-Fourier density |phi~|^2; both are normalized by the total weight.
    """
    density = np.abs(amplitudes) ** 2
    total = float(np.sum(density))
    if total <= 0.0:
        raise InvalidStateError("pointer amplitudes", "zero norm")
    q = grid.positions
    mean_q = float(np.sum(q * density) / total)
    var_q = float(np.sum((q - mean_q) ** 2 * density) / total)

    k = grid.wavenumbers
    spectrum = np.abs(np.fft.fft(amplitudes)) ** 2
    weight = float(np.sum(spectrum))
    mean_p = float(np.sum(k * spectrum) / weight)
    var_p = float(np.sum((k - mean_p) ** 2 * spectrum) / weight)

    return Moments(mean_q=mean_q, mean_p=mean_p, var_q=var_q, var_p=var_p)


def moments(phi: PointerState) -> Moments:
    """Means and variances of position and momentum for a normalized state"""
    return moments_of(phi.amplitudes, phi.grid)


def probability_flux(amplitudes: np.ndarray, grid: Grid) -> np.ndarray:
    """Im(conj(phi) phi'), i.e. rho S', defined everywhere including nodes"""
    if not np.any(np.imag(amplitudes)):
        return np.zeros(grid.n_points)
    derivative = spectral_derivative(amplitudes, grid)
    return np.imag(np.conj(amplitudes) * derivative)


def polar_fields(phi: PointerState, m: float = 1.0, node_threshold: Optional[float] = None) -> PolarFields:
    """
    rho = |phi|^2, S' = Im(phi' conj(phi)) / rho and j = rho S' / m

    S' is masked where rho < node_threshold * max(rho).
    """
    threshold = settings.node_threshold if node_threshold is None else node_threshold
    rho = np.abs(phi.amplitudes) ** 2
    flux = probability_flux(phi.amplitudes, phi.grid)

    nodes = rho < threshold * float(np.max(rho))
    safe_rho = np.where(nodes, 1.0, rho)
    s_prime = np.ma.masked_array(flux / safe_rho, mask=nodes)

    return PolarFields(grid=phi.grid, rho=rho, s_prime=s_prime, current=flux / m)


def symmetrized_qp(phi: PointerState) -> float:
    """<pq + qp> = 2 Re <phi| q p |phi>"""
    p_phi = apply_momentum(phi.amplitudes, phi.grid)
    q_phi = phi.grid.positions * phi.amplitudes
    return 2.0 * braket(q_phi, p_phi, phi.grid).real


def d_var_q_dt(phi: PointerState, m: float = 1.0) -> float:
    """
    Instantaneous growth rate of Var_q: (<pq + qp> - 2<q><p>) / m

    Computed algebraically; independent of any potential V(q).
    """
    if m <= 0:
        raise InvalidStateError("mass", f"must be positive, got {m}")
    mom = moments(phi)
    return (symmetrized_qp(phi) - 2.0 * mom.mean_q * mom.mean_p) / m


# ============================================================================
# Time evolution
# ============================================================================

def evolve_free(phi: PointerState, spec: EvolutionSpec, steps: int) -> PointerState:
    """
    Strang split-operator evolution under H = p^2/2m + V(q)

    Negative ``steps`` evolve backwards by |steps| * dt. With V = 0 the
    momentum density is invariant and the propagation is exact.
    """
    if steps == 0:
        return phi
    grid = phi.grid
    dt = spec.dt if steps > 0 else -spec.dt
    potential = spec.potential_on(grid)

    half_kick = np.exp(-0.5j * dt * potential)
    drift = np.exp(-0.5j * dt * grid.wavenumbers ** 2 / spec.mass)

    psi = phi.amplitudes.copy()
    for _ in range(abs(int(steps))):
        psi = half_kick * np.fft.ifft(drift * np.fft.fft(half_kick * psi))
    return PointerState(grid=grid, amplitudes=psi)


def continuity_residual(phi: PointerState, spec: EvolutionSpec) -> float:
    """
    max_j |rho_t + j'| with rho_t the central difference over one dt of evolution
    """
    forward = np.abs(evolve_free(phi, spec, 1).amplitudes) ** 2
    backward = np.abs(evolve_free(phi, spec, -1).amplitudes) ** 2
    rho_t = (forward - backward) / (2.0 * spec.dt)

    current = probability_flux(phi.amplitudes, phi.grid) / spec.mass
    residual = float(np.max(np.abs(rho_t + spectral_derivative(current, phi.grid))))
    logger.debug(f"Continuity residual {residual:.3e} at N={phi.grid.n_points}, dt={spec.dt}")
    return residual


# ============================================================================
# Wavefunction dumps
# ============================================================================

def dump_wavefunction(amplitudes: np.ndarray, grid: Grid, path: Union[str, Path]) -> None:
    """Write columns q, Re phi, Im phi with 17 significant digits"""
    table = np.column_stack([grid.positions, np.real(amplitudes), np.imag(amplitudes)])
    try:
        np.savetxt(path, table, fmt="%.17g", header="q re_phi im_phi")
    except OSError as e:
        raise ReportWriteError(str(path), str(e))


def load_wavefunction(path: Union[str, Path], grid: Optional[Grid] = None) -> np.ndarray:
    """Read a dump written by dump_wavefunction; checks the q column against ``grid``"""
    try:
        table = np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as e:
        raise ScenarioFileError(str(path), str(e))
    if table.shape[1] != 3:
        raise ScenarioFileError(str(path), f"expected 3 columns, got {table.shape[1]}")
    if grid is not None:
        if table.shape[0] != grid.n_points:
            raise DimensionMismatchError(grid.n_points, table.shape[0], "tabulated pointer")
        if np.max(np.abs(table[:, 0] - grid.positions)) > 1e-9 * max(1.0, grid.length):
            raise ScenarioFileError(str(path), "position column does not match the grid")
    return table[:, 1] + 1j * table[:, 2]
