"""
Data models for the measurement pointer on a periodic grid
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import settings
from modules.exceptions import (
    BadGridSpecError,
    DimensionMismatchError,
    InvalidStateError,
    StabilityGuardError,
    TailMassError,
)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Grid(BaseModel):
    """Uniform periodic grid q_j = -L/2 + j*dq with its paired momentum lattice"""
    model_config = ConfigDict(frozen=True)

    n_points: int
    length: float

    @model_validator(mode='after')
    def validate_spec(self) -> 'Grid':
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise BadGridSpecError(f"n_points must be a power of two >= 64, got {n}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise BadGridSpecError(f"length must be positive and finite, got {self.length}")
        return self

    @property
    def dq(self) -> float:
        return self.length / self.n_points

    @property
    def positions(self) -> np.ndarray:
        return -0.5 * self.length + self.dq * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Momentum lattice in FFT order (k = 2*pi*n/L)"""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dq)

    @property
    def momentum_lattice(self) -> np.ndarray:
        """Momentum lattice sorted over n in [-N/2, N/2)"""
        return np.fft.fftshift(self.wavenumbers)

    @property
    def k_max(self) -> float:
        return float(np.pi / self.dq)

    def tail_mask(self, fraction: Optional[float] = None) -> np.ndarray:
        """Points lying in the outer band of the grid at either end"""
        frac = settings.tail_fraction if fraction is None else fraction
        band = max(1, int(round(frac * self.n_points)))
        mask = np.zeros(self.n_points, dtype=bool)
        mask[:band] = True
        mask[-band:] = True
        return mask

    def tail_mass(self, amplitudes: np.ndarray) -> float:
        """Probability mass carried by the outer band, relative to the total"""
        density = np.abs(amplitudes) ** 2
        total = float(np.sum(density))
        if total == 0.0:
            return 0.0
        return float(np.sum(density[self.tail_mask()]) / total)

    def norm_squared(self, amplitudes: np.ndarray) -> float:
        return float(self.dq * np.sum(np.abs(amplitudes) ** 2))


def _validate_amplitudes(grid: Grid, v, subject: str) -> np.ndarray:
    arr = np.array(v, dtype=complex)
    if arr.ndim != 1:
        raise InvalidStateError(subject, f"expected a vector, got shape {arr.shape}")
    if arr.shape[0] != grid.n_points:
        raise DimensionMismatchError(grid.n_points, arr.shape[0], subject)
    return _readonly(arr)


class PointerState(BaseModel):
    """Normalized pointer wavefunction sampled on a grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    amplitudes: np.ndarray

    @model_validator(mode='before')
    @classmethod
    def coerce_amplitudes(cls, data):
        if isinstance(data, dict) and isinstance(data.get('grid'), Grid):
            data = dict(data)
            data['amplitudes'] = _validate_amplitudes(data['grid'], data.get('amplitudes'), "pointer state")
        return data

    @model_validator(mode='after')
    def validate_state(self) -> 'PointerState':
        """Unit norm and negligible tail mass"""
        norm = self.grid.norm_squared(self.amplitudes)
        if abs(norm - 1.0) > settings.norm_tolerance:
            raise InvalidStateError("pointer state", f"dq*sum|phi|^2 = {norm!r} differs from 1")
        mass = self.grid.tail_mass(self.amplitudes)
        if mass > settings.tail_mass_limit:
            raise TailMassError(mass, settings.tail_mass_limit)
        return self

    @classmethod
    def normalized(cls, grid: Grid, amplitudes: np.ndarray) -> 'PointerState':
        """Rescale arbitrary amplitudes to unit norm"""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = grid.norm_squared(amplitudes)
        if norm <= 0.0:
            raise InvalidStateError("pointer state", "zero amplitudes cannot be normalized")
        return cls(grid=grid, amplitudes=amplitudes / np.sqrt(norm))


class Moments(BaseModel):
    """First and second moments of a pointer state"""
    model_config = ConfigDict(frozen=True)

    mean_q: float
    mean_p: float
    var_q: float = Field(..., ge=0)
    var_p: float = Field(..., ge=0)

    @model_validator(mode='after')
    def validate_uncertainty(self) -> 'Moments':
        if self.var_q * self.var_p < 0.25 - 1e-9:
            raise InvalidStateError(
                "moments", f"uncertainty product {self.var_q * self.var_p!r} is below 1/4"
            )
        return self

    @property
    def uncertainty_product(self) -> float:
        return self.var_q * self.var_p


class PolarFields(BaseModel):
    """Density, phase gradient and probability current of phi = R exp(iS)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    rho: np.ndarray
    s_prime: np.ma.MaskedArray
    current: np.ndarray

    @model_validator(mode='after')
    def validate_density(self) -> 'PolarFields':
        total = float(self.grid.dq * np.sum(self.rho))
        if abs(total - 1.0) > settings.norm_tolerance:
            raise InvalidStateError("polar fields", f"dq*sum(rho) = {total!r} differs from 1")
        if np.any(self.rho < 0):
            raise InvalidStateError("polar fields", "negative density")
        return self

    @property
    def max_abs_phase_gradient(self) -> float:
        """Largest |S'| over the unmasked region"""
        if self.s_prime.count() == 0:
            return 0.0
        return float(np.ma.max(np.ma.abs(self.s_prime)))


class EvolutionSpec(BaseModel):
    """Pointer Hamiltonian H = p^2/2m + V(q) and the split-operator time step"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mass: float = Field(default=1.0, gt=0)
    dt: float = Field(..., gt=0)
    potential: Optional[np.ndarray] = None

    @field_validator('potential', mode='before')
    @classmethod
    def coerce_potential(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=float)
        if arr.ndim != 1:
            raise InvalidStateError("potential", f"expected a vector, got shape {arr.shape}")
        return _readonly(arr)

    @model_validator(mode='after')
    def validate_stability(self) -> 'EvolutionSpec':
        if self.potential is not None and self.potential.size:
            product = self.dt * float(np.max(np.abs(self.potential)))
            if product > settings.stability_limit:
                raise StabilityGuardError(product, settings.stability_limit)
        return self

    def potential_on(self, grid: Grid) -> np.ndarray:
        """Potential sampled on ``grid`` (zero when none was given)"""
        if self.potential is None:
            return np.zeros(grid.n_points)
        if self.potential.shape[0] != grid.n_points:
            raise DimensionMismatchError(grid.n_points, self.potential.shape[0], "potential")
        return self.potential
