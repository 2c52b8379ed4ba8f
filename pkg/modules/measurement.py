"""
Measurement Module

This module handles:
- The impulsive von Neumann kick exp(-i g A (x) p) followed by post-selection
- Exact branch-sum coupling, first-order and exponential weak approximants
- Success probability and the unconditional (strong-measurement) pointer
- A brute-force joint-space oracle for the exact coupling
"""
from typing import Callable, Dict, Optional

import numpy as np
from loguru import logger

from config import settings
from models.measurement import CouplingSpec, PostSelectedPointer
from models.pointer import Moments, PointerState
from models.scenario import Backend
from modules.exceptions import AmplificationGuardError, SizeGuardError
from modules.logging_utils import log_with_context
from modules.pointer_space import apply_momentum, moments, translate
from modules.system_algebra import eigendecompose, inner_product, weak_value


def _warn_if_unlikely(alpha: PostSelectedPointer, backend: str) -> PostSelectedPointer:
    if alpha.success_prob < settings.success_warn_threshold:
        log_with_context(
            "warning",
            f"Post-selection success probability {alpha.success_prob:.3e} ({backend}) "
            f"is below {settings.success_warn_threshold:.1e}",
        )
    return alpha


def couple_postselect_exact(spec: CouplingSpec, phi: PointerState) -> PostSelectedPointer:
    """
    alpha(q) = sum_i c_i phi(q - g a_i) with c_i = <psi_f|P_i|psi_i>

    Exact for every g. Degenerate eigenvalues share one translated branch.

    Raises:
        TailMassError: if any translated branch violates the tail guard
    """
    spectrum = eigendecompose(spec.observable)
    alpha = np.zeros(phi.grid.n_points, dtype=complex)
    for eigenvalue, projector in spectrum.eigenspaces():
        weight = complex(np.vdot(spec.psi_f.amplitudes, projector @ spec.psi_i.amplitudes))
        branch = translate(phi, spec.g * eigenvalue)
        alpha += weight * branch.amplitudes
    return _warn_if_unlikely(PostSelectedPointer.from_amplitudes(phi.grid, alpha), "exact")


def couple_postselect_first_order(spec: CouplingSpec, phi: PointerState) -> PostSelectedPointer:
    """
    alpha ~ <psi_f|psi_i> (I - i g A_w p) phi

    Raises:
        OrthogonalPostSelectionError: if the weak value is undefined
    """
    w = weak_value(spec.observable, spec.psi_i, spec.psi_f)
    overlap = inner_product(spec.psi_f, spec.psi_i)
    p_phi = apply_momentum(phi.amplitudes, phi.grid)
    alpha = overlap * (phi.amplitudes - 1j * spec.g * w.value * p_phi)
    return _warn_if_unlikely(
        PostSelectedPointer.from_amplitudes(phi.grid, alpha, approximate=True), "first-order"
    )


def couple_postselect_weak_exp(
    spec: CouplingSpec,
    phi: PointerState,
    amplification_limit: Optional[float] = None
) -> PostSelectedPointer:
    """
    alpha ~ <psi_f|psi_i> exp(-i g A_w p) phi, a translation by the complex g*A_w

    Raises:
        AmplificationGuardError: if g * |Im A_w| * k_max exceeds the limit
        OrthogonalPostSelectionError: if the weak value is undefined
    """
    limit = settings.amplification_limit if amplification_limit is None else amplification_limit
    w = weak_value(spec.observable, spec.psi_i, spec.psi_f)
    factor = abs(spec.g * w.b) * phi.grid.k_max
    if factor > limit:
        raise AmplificationGuardError(factor, limit)

    overlap = inner_product(spec.psi_f, spec.psi_i)
    propagator = np.exp(-1j * spec.g * w.value * phi.grid.wavenumbers)
    alpha = overlap * np.fft.ifft(propagator * np.fft.fft(phi.amplitudes))
    return _warn_if_unlikely(
        PostSelectedPointer.from_amplitudes(phi.grid, alpha, approximate=True), "weak-exp"
    )


def success_probability(alpha: PostSelectedPointer) -> float:
    """<alpha|alpha>, the probability that post-selection succeeds"""
    return alpha.grid.norm_squared(alpha.amplitudes)


def unconditional_moments(spec: CouplingSpec, phi: PointerState) -> Moments:
    """
    Pointer moments after the kick without post-selection

    The pointer is the mixture sum_i <psi_i|P_i|psi_i> |phi(q - g a_i)|^2; its
    momentum distribution is untouched because p commutes with the coupling.
    """
    spectrum = eigendecompose(spec.observable)
    q = phi.grid.positions
    density = np.zeros(phi.grid.n_points)
    for eigenvalue, projector in spectrum.eigenspaces():
        weight = float(np.vdot(spec.psi_i.amplitudes, projector @ spec.psi_i.amplitudes).real)
        density += weight * np.abs(translate(phi, spec.g * eigenvalue).amplitudes) ** 2

    total = float(np.sum(density))
    mean_q = float(np.sum(q * density) / total)
    var_q = float(np.sum((q - mean_q) ** 2 * density) / total)
    initial = moments(phi)
    return Moments(mean_q=mean_q, mean_p=initial.mean_p, var_q=var_q, var_p=initial.var_p)


def joint_state_after_kick(
    spec: CouplingSpec,
    phi: PointerState,
    size_limit: Optional[int] = None
) -> np.ndarray:
    """
    exp(-i g A (x) p) |psi_i>|phi> as a dim x n_points array (system slot first)

    The kick is applied in the momentum representation by diagonalizing A and
    giving every eigen-branch its own phase exp(-i g a k).

    Raises:
        SizeGuardError: if dim * n_points exceeds the memory guard
    """
    limit = settings.tensor_size_limit if size_limit is None else size_limit
    dim = spec.observable.dim
    size = dim * phi.grid.n_points
    if size > limit:
        raise SizeGuardError(size, limit)

    joint = np.outer(spec.psi_i.amplitudes, phi.amplitudes)
    joint_k = np.fft.fft(joint, axis=1)

    values, vectors = np.linalg.eigh(spec.observable.matrix)
    phases = np.exp(-1j * spec.g * np.outer(values, phi.grid.wavenumbers))
    kicked_k = vectors @ (phases * (vectors.conj().T @ joint_k))
    return np.fft.ifft(kicked_k, axis=1)


def full_tensor_reference(spec: CouplingSpec, phi: PointerState) -> PostSelectedPointer:
    """Brute-force <psi_f| exp(-i g A p) |psi_i>|phi> on the joint space"""
    joint = joint_state_after_kick(spec, phi)
    alpha = spec.psi_f.amplitudes.conj() @ joint
    logger.debug(f"Tensor reference on a {joint.shape[0]}x{joint.shape[1]} joint array")
    return PostSelectedPointer.from_amplitudes(phi.grid, alpha)


BACKENDS: Dict[Backend, Callable[[CouplingSpec, PointerState], PostSelectedPointer]] = {
    Backend.EXACT: couple_postselect_exact,
    Backend.FIRST_ORDER: couple_postselect_first_order,
    Backend.WEAK_EXP: couple_postselect_weak_exp,
}


def simulate(spec: CouplingSpec, phi: PointerState, backend: Backend = Backend.EXACT) -> PostSelectedPointer:
    """Dispatch to the selected coupling backend"""
    return BACKENDS[Backend(backend)](spec, phi)
