"""
System Algebra Module

This module handles:
- Construction of normalized system states and Hermitian observables
- Inner products, expectation values and weak values
- Spectral decomposition with reproducible eigenvector phases
"""
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from config import settings
from models.system import Observable, SpectralDecomposition, SystemState, WeakValue
from modules.exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
    OrthogonalPostSelectionError,
    ZeroVectorError,
)


NAMED_OBSERVABLES = {
    "pauli-x": np.array([[0, 1], [1, 0]], dtype=complex),
    "pauli-y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "pauli-z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def make_state(amplitudes: Sequence[complex]) -> SystemState:
    """
    Normalize a nonzero complex vector into a system state

    Raises:
        ZeroVectorError: if the Euclidean norm is below 1e-14
    """
    vec = np.asarray(amplitudes, dtype=complex).ravel()
    if vec.shape[0] < 2:
        raise InvalidStateError("system state", "dimension must be at least 2")
    norm = float(np.linalg.norm(vec))
    if norm < 1e-14:
        raise ZeroVectorError(norm)
    return SystemState(amplitudes=vec / norm)


def make_observable(matrix) -> Observable:
    """Wrap a matrix as an observable; raises NonHermitianError when M != M^dagger"""
    return Observable(matrix=np.asarray(matrix, dtype=complex))


def named_observable(name: str, dim: int = 2) -> Observable:
    """
    Look up one of the built-in observables

    Args:
        name: "pauli-x", "pauli-y", "pauli-z" or "identity"
        dim: dimension, only used by "identity"
    """
    key = name.strip().lower()
    if key == "identity":
        return Observable(matrix=np.eye(dim, dtype=complex))
    if key not in NAMED_OBSERVABLES:
        raise InvalidStateError("observable", f"unknown name {name!r}")
    return Observable(matrix=NAMED_OBSERVABLES[key])


def _check_dims(expected: int, got: int, context: str) -> None:
    if expected != got:
        raise DimensionMismatchError(expected, got, context)


def _require_hermitian(A: Observable) -> None:
    deviation = float(np.max(np.abs(A.matrix - A.matrix.conj().T)))
    if deviation > settings.hermitian_tolerance:
        raise NonHermitianError(deviation, settings.hermitian_tolerance)


def inner_product(psi_f: SystemState, psi_i: SystemState) -> complex:
    """<psi_f|psi_i>, conjugate-linear in the first argument"""
    _check_dims(psi_f.dim, psi_i.dim, "inner product")
    return complex(np.vdot(psi_f.amplitudes, psi_i.amplitudes))


def expectation(A: Observable, psi: SystemState) -> float:
    """<psi|A|psi> for a Hermitian A"""
    _check_dims(A.dim, psi.dim, "expectation")
    _require_hermitian(A)
    value = complex(np.vdot(psi.amplitudes, A.matrix @ psi.amplitudes))
    if abs(value.imag) > 1e-12:
        raise NonHermitianError(abs(value.imag), 1e-12)
    return float(value.real)


def weak_value(
    A: Observable,
    psi_i: SystemState,
    psi_f: SystemState,
    overlap_threshold: Optional[float] = None
) -> WeakValue:
    """
    Weak value <psi_f|A|psi_i> / <psi_f|psi_i>

    Raises:
        OrthogonalPostSelectionError: if |<psi_f|psi_i>| is below the threshold
    """
    threshold = settings.overlap_threshold if overlap_threshold is None else overlap_threshold
    _check_dims(A.dim, psi_i.dim, "pre-selected state")
    _check_dims(A.dim, psi_f.dim, "post-selected state")

    overlap = inner_product(psi_f, psi_i)
    if abs(overlap) < threshold:
        raise OrthogonalPostSelectionError(abs(overlap), threshold)

    numerator = complex(np.vdot(psi_f.amplitudes, A.matrix @ psi_i.amplitudes))
    value = numerator / overlap
    logger.debug(f"Weak value {value:.6g} at overlap {abs(overlap):.3e}")
    return WeakValue.from_complex(value)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate so the first non-negligible component is real and positive"""
    for component in vector:
        if abs(component) > 1e-12:
            return vector * (abs(component) / component)
    return vector


def eigendecompose(A: Observable) -> SpectralDecomposition:
    """
    Ascending spectral decomposition of a Hermitian observable

    Eigenvectors are phase-fixed; within a degenerate block the columns are
    ordered lexicographically by their components so the result is reproducible.
    """
    _require_hermitian(A)
    values, vectors = np.linalg.eigh(A.matrix)
    vectors = np.column_stack([_fix_phase(vectors[:, i]) for i in range(vectors.shape[1])])

    tol = settings.eigenvalue_group_tolerance
    order = list(range(len(values)))
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and abs(values[stop] - values[start]) <= tol * max(1.0, abs(values[start])):
            stop += 1
        if stop - start > 1:
            block = sorted(
                range(start, stop),
                key=lambda j: tuple(np.round(np.concatenate([vectors[:, j].real, vectors[:, j].imag]), 12)),
            )
            order[start:stop] = block
        start = stop

    return SpectralDecomposition(eigenvalues=values[order], eigenvectors=vectors[:, order])
