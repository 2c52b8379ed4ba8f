"""
Custom Exception Classes for the weak measurement simulator

This module defines custom exceptions for better error handling and debugging.
None of them derive from ValueError, so raising one inside a pydantic
validator propagates it unchanged.
"""
from typing import Optional


class WeakMeasurementError(Exception):
    """Base exception for all simulator errors"""
    pass


class InvalidStateError(WeakMeasurementError):
    """Raised when a state or array violates a structural invariant"""
    def __init__(self, subject: str, message: str):
        self.subject = subject
        super().__init__(f"Invalid {subject}: {message}")


class ZeroVectorError(WeakMeasurementError):
    """Raised when a state vector cannot be normalized"""
    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"Cannot normalize vector with norm {norm:.3e}")


class DimensionMismatchError(WeakMeasurementError):
    """Raised when operands live in spaces of different dimension"""
    def __init__(self, expected: int, got: int, context: str = "operand"):
        self.expected = expected
        self.got = got
        super().__init__(f"Dimension mismatch for {context}: expected {expected}, got {got}")


class NonHermitianError(WeakMeasurementError):
    """Raised when a system observable is not Hermitian within tolerance"""
    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"Observable is not Hermitian: max|M - M^dagger| = {deviation:.3e} > {tolerance:.1e}"
        )


class NonHermitianObservableError(WeakMeasurementError):
    """Raised when a pointer observable is not Hermitian on the grid"""
    def __init__(self, name: str, deviation: float):
        self.name = name
        self.deviation = deviation
        super().__init__(f"Pointer observable {name} is not Hermitian (deviation {deviation:.3e})")


class OrthogonalPostSelectionError(WeakMeasurementError):
    """Raised when pre- and post-selected states are (nearly) orthogonal"""
    def __init__(self, overlap: float, threshold: float):
        self.overlap = overlap
        self.threshold = threshold
        super().__init__(
            f"Post-selection overlap |<psi_f|psi_i>| = {overlap:.3e} is below threshold {threshold:.1e}"
        )


class BadGridSpecError(WeakMeasurementError):
    """Raised when a grid specification is invalid"""
    def __init__(self, message: str):
        super().__init__(f"Bad grid specification: {message}")


class TailMassError(WeakMeasurementError):
    """Raised when a pointer state carries too much probability near the grid edges"""
    def __init__(self, mass: float, limit: float, context: str = "pointer state"):
        self.mass = mass
        self.limit = limit
        super().__init__(f"Tail mass {mass:.3e} of {context} exceeds limit {limit:.1e}")


class StabilityGuardError(WeakMeasurementError):
    """Raised when an evolution time step is too large for the potential"""
    def __init__(self, product: float, limit: float):
        self.product = product
        self.limit = limit
        super().__init__(f"dt * max|V| = {product:.3e} exceeds stability limit {limit}")


class AmplificationGuardError(WeakMeasurementError):
    """Raised when a complex translation would amplify a momentum tail too strongly"""
    def __init__(self, factor: float, limit: float):
        self.factor = factor
        self.limit = limit
        super().__init__(f"g * |Im A_w| * k_max = {factor:.3e} exceeds amplification limit {limit}")


class SizeGuardError(WeakMeasurementError):
    """Raised when a joint-space computation would exceed the memory guard"""
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"Joint array size {size} exceeds limit {limit}")


class NegligibleSuccessError(WeakMeasurementError):
    """Raised when the post-selection success probability is too small to normalize"""
    def __init__(self, probability: float, floor: float):
        self.probability = probability
        self.floor = floor
        super().__init__(f"Success probability {probability:.3e} is below the floor {floor:.1e}")


class DegeneratePointerError(WeakMeasurementError):
    """Raised when the pointer momentum variance is too small to invert the shift formulas"""
    def __init__(self, var_p: float):
        self.var_p = var_p
        super().__init__(f"Pointer momentum variance {var_p:.3e} is too small")


class InvalidLadderError(WeakMeasurementError):
    """Raised when a coupling ladder cannot support a convergence fit"""
    def __init__(self, message: str):
        super().__init__(f"Invalid coupling ladder: {message}")


class ScenarioFileError(WeakMeasurementError):
    """Raised when a scenario, matrix or result file cannot be parsed"""
    def __init__(self, path: Optional[str], message: str):
        self.path = path
        where = f" {path}" if path else ""
        super().__init__(f"Cannot read input{where}: {message}")


class ReportWriteError(WeakMeasurementError):
    """Raised when a report or dump cannot be written"""
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"Failed to write {path}: {message}")
