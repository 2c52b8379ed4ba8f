"""
Data models for the measured finite-dimensional system
"""
import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config import settings
from modules.exceptions import InvalidStateError, NonHermitianError


def _frozen_complex_array(value, ndim: int, subject: str) -> np.ndarray:
    """Coerce to a read-only complex array of the given rank"""
    arr = np.array(value, dtype=complex)
    if arr.ndim != ndim:
        raise InvalidStateError(subject, f"expected a rank-{ndim} array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


class SystemState(BaseModel):
    """Normalized pure state of the measured system"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    amplitudes: np.ndarray

    @field_validator('amplitudes', mode='before')
    @classmethod
    def coerce_amplitudes(cls, v) -> np.ndarray:
        return _frozen_complex_array(v, 1, "system state")

    @model_validator(mode='after')
    def validate_normalization(self) -> 'SystemState':
        """Dimension at least two and unit Euclidean norm"""
        if self.amplitudes.shape[0] < 2:
            raise InvalidStateError("system state", "dimension must be at least 2")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidStateError("system state", f"norm {norm!r} differs from 1")
        return self

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])


class Observable(BaseModel):
    """Hermitian matrix acting on the measured system"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @field_validator('matrix', mode='before')
    @classmethod
    def coerce_matrix(cls, v) -> np.ndarray:
        return _frozen_complex_array(v, 2, "observable")

    @model_validator(mode='after')
    def validate_hermitian(self) -> 'Observable':
        """Square and Hermitian within the configured tolerance"""
        rows, cols = self.matrix.shape
        if rows != cols or rows < 2:
            raise InvalidStateError("observable", f"matrix must be square with dim >= 2, got {self.matrix.shape}")
        deviation = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
        if deviation > settings.hermitian_tolerance:
            raise NonHermitianError(deviation, settings.hermitian_tolerance)
        return self

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def __add__(self, other: 'Observable') -> 'Observable':
        return Observable(matrix=self.matrix + other.matrix)


class SpectralDecomposition(BaseModel):
    """Ascending eigenvalues with orthonormal eigenvector columns"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @field_validator('eigenvalues', mode='before')
    @classmethod
    def coerce_eigenvalues(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=float)
        arr.flags.writeable = False
        return arr

    @field_validator('eigenvectors', mode='before')
    @classmethod
    def coerce_eigenvectors(cls, v) -> np.ndarray:
        return _frozen_complex_array(v, 2, "eigenvector matrix")

    @model_validator(mode='after')
    def validate_orthonormal(self) -> 'SpectralDecomposition':
        dim = self.eigenvalues.shape[0]
        if self.eigenvectors.shape != (dim, dim):
            raise InvalidStateError("spectral decomposition", "eigenvector matrix shape mismatch")
        gram = self.eigenvectors.conj().T @ self.eigenvectors
        if np.max(np.abs(gram - np.eye(dim))) > 1e-12:
            raise InvalidStateError("spectral decomposition", "eigenvectors are not orthonormal")
        return self

    def reconstruct(self) -> np.ndarray:
        """Sum of a_i e_i e_i^dagger"""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def eigenspaces(self, tolerance: float = None) -> List[Tuple[float, np.ndarray]]:
        """
        Group numerically equal eigenvalues

        Returns:
            List of (eigenvalue, projector) pairs, one per distinct eigenvalue,
            in ascending order. The eigenvalue reported for a group is the mean
            of its members.
        """
        tol = settings.eigenvalue_group_tolerance if tolerance is None else tolerance
        groups: List[List[int]] = []
        for i, lam in enumerate(self.eigenvalues):
            if groups and abs(lam - self.eigenvalues[groups[-1][0]]) <= tol * max(1.0, abs(lam)):
                groups[-1].append(i)
            else:
                groups.append([i])

        spaces = []
        for members in groups:
            block = self.eigenvectors[:, members]
            projector = block @ block.conj().T
            spaces.append((float(np.mean(self.eigenvalues[members])), projector))
        return spaces


class WeakValue(BaseModel):
    """Complex weak value A_w = a + ib"""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float

    @model_validator(mode='after')
    def validate_finite(self) -> 'WeakValue':
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidStateError("weak value", f"non-finite components ({self.a}, {self.b})")
        return self

    @classmethod
    def from_complex(cls, value: complex) -> 'WeakValue':
        return cls(a=float(value.real), b=float(value.imag))

    @property
    def value(self) -> complex:
        return complex(self.a, self.b)
