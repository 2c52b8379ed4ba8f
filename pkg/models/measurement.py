"""
Data models for the von Neumann coupling and post-selection
"""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.pointer import Grid, PointerState
from models.system import Observable, SystemState
from modules.exceptions import DimensionMismatchError, InvalidStateError


class CouplingSpec(BaseModel):
    """Impulsive interaction g*delta(t - t0) A (x) p with pre- and post-selection"""
    model_config = ConfigDict(frozen=True)

    g: float
    observable: Observable
    psi_i: SystemState
    psi_f: SystemState
    mass: float = Field(default=1.0, gt=0)

    @model_validator(mode='after')
    def validate_dimensions(self) -> 'CouplingSpec':
        dim = self.observable.dim
        if self.psi_i.dim != dim:
            raise DimensionMismatchError(dim, self.psi_i.dim, "pre-selected state")
        if self.psi_f.dim != dim:
            raise DimensionMismatchError(dim, self.psi_f.dim, "post-selected state")
        if not math.isfinite(self.g):
            raise InvalidStateError("coupling", f"g must be finite, got {self.g}")
        return self

    def with_g(self, g: float) -> 'CouplingSpec':
        return self.model_copy(update={"g": g})


class PostSelectedPointer(BaseModel):
    """Sub-normalized pointer amplitude alpha(q) and its squared norm"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    amplitudes: np.ndarray
    success_prob: float
    approximate: bool = False  # truncated expansions may exceed unit norm at O(g^2)

    @model_validator(mode='after')
    def validate_success(self) -> 'PostSelectedPointer':
        if self.amplitudes.shape != (self.grid.n_points,):
            raise DimensionMismatchError(self.grid.n_points, self.amplitudes.shape[0], "post-selected pointer")
        measured = self.grid.norm_squared(self.amplitudes)
        if abs(measured - self.success_prob) > 1e-12:
            raise InvalidStateError("post-selected pointer", "success_prob disagrees with the amplitudes")
        upper = np.inf if self.approximate else 1.0 + 1e-10
        if not 0.0 <= self.success_prob <= upper:
            raise InvalidStateError("post-selected pointer", f"success_prob {self.success_prob!r} outside [0, 1]")
        return self

    @classmethod
    def from_amplitudes(
        cls, grid: Grid, amplitudes: np.ndarray, approximate: bool = False
    ) -> 'PostSelectedPointer':
        amplitudes = np.array(amplitudes, dtype=complex)
        amplitudes.flags.writeable = False
        return cls(
            grid=grid,
            amplitudes=amplitudes,
            success_prob=grid.norm_squared(amplitudes),
            approximate=approximate,
        )

    def normalized(self) -> PointerState:
        """The conditional pointer state alpha / sqrt(<alpha|alpha>)"""
        return PointerState.normalized(self.grid, self.amplitudes)
