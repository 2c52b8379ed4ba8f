"""
Data models for scenarios, their results and convergence reports
"""
from enum import Enum
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.measurement import CouplingSpec
from models.pointer import EvolutionSpec, Grid, Moments
from models.system import Observable, SystemState, WeakValue
from models.theory import ShiftPrediction
from modules.exceptions import InvalidLadderError, InvalidStateError


REPORT_COLUMNS = [
    "scenario_id", "backend", "g", "a", "b",
    "mean_q_i", "mean_q_f_sim", "mean_q_f_pred", "r_q",
    "mean_p_i", "mean_p_f_sim", "mean_p_f_pred", "r_p",
    "var_p", "dvarq_dt", "succ_sim", "succ_pred",
]

RESIDUAL_CHANNELS = ("q", "p", "succ")


def check_ladder(g_values: List[float]) -> None:
    """At least four positive, strictly increasing couplings"""
    if len(g_values) < 4:
        raise InvalidLadderError(f"need at least 4 points, got {len(g_values)}")
    if g_values[0] <= 0:
        raise InvalidLadderError("g values must be positive for a log-log fit")
    if any(b <= a for a, b in zip(g_values, g_values[1:])):
        raise InvalidLadderError("g values must be strictly increasing")


class Backend(str, Enum):
    """Simulation backends for the coupled, post-selected pointer"""
    EXACT = "exact"
    FIRST_ORDER = "first-order"
    WEAK_EXP = "weak-exp"


class GaussianRecipe(BaseModel):
    """phi(q) ~ exp(-(q-q0)^2/(4 sigma^2) + i c (q-q0)^2 + i p0 q)"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    sigma: float = Field(default=1.0, gt=0)
    chirp: float = 0.0
    q0: float = 0.0
    p0: float = 0.0


class TabulatedRecipe(BaseModel):
    """Pointer amplitudes given point by point; normalized when built"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["tabulated"] = "tabulated"
    amplitudes: np.ndarray
    source: Optional[str] = None

    @field_validator('amplitudes', mode='before')
    @classmethod
    def coerce_amplitudes(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=complex)
        if arr.ndim != 1:
            raise InvalidStateError("tabulated pointer", f"expected a vector, got shape {arr.shape}")
        arr.flags.writeable = False
        return arr


class Scenario(BaseModel):
    """One pre/post-selected weak measurement to simulate and check"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    scenario_id: str = "0"
    observable: Observable
    psi_i: SystemState
    psi_f: SystemState
    g: float
    mass: float = Field(default=1.0, gt=0)
    pointer: Union[GaussianRecipe, TabulatedRecipe] = Field(default_factory=GaussianRecipe, discriminator="kind")
    grid: Grid
    backend: Backend = Backend.EXACT
    seed: Optional[int] = None
    potential: Optional[np.ndarray] = None  # V(q) for free-evolution checks; the kick itself ignores it

    @field_validator('potential', mode='before')
    @classmethod
    def coerce_potential(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=float)
        if arr.ndim != 1:
            raise InvalidStateError("potential", f"expected a vector, got shape {arr.shape}")
        arr.flags.writeable = False
        return arr

    def coupling(self) -> CouplingSpec:
        return CouplingSpec(
            g=self.g, observable=self.observable, psi_i=self.psi_i, psi_f=self.psi_f, mass=self.mass
        )

    def evolution(self, dt: float) -> EvolutionSpec:
        """Pointer Hamiltonian p^2/2m + V(q) with time step dt"""
        return EvolutionSpec(mass=self.mass, dt=dt, potential=self.potential)

    def with_g(self, g: float) -> 'Scenario':
        return self.model_copy(update={"g": g})

    def with_backend(self, backend: Backend) -> 'Scenario':
        return self.model_copy(update={"backend": Backend(backend)})


class ScenarioResult(BaseModel):
    """Simulated versus predicted pointer shifts for one scenario"""
    model_config = ConfigDict(frozen=True)

    scenario_id: str
    backend: Backend
    g: float
    weak_value: WeakValue
    moments_i: Moments
    moments_f: Moments
    prediction: ShiftPrediction
    dvarq_dt: float
    succ_sim: float
    succ_pred: float
    r_q: float = Field(..., ge=0)
    r_p: float = Field(..., ge=0)
    r_succ: float = Field(..., ge=0)

    @model_validator(mode='after')
    def validate_finite(self) -> 'ScenarioResult':
        values = [self.r_q, self.r_p, self.r_succ, self.succ_sim, self.succ_pred, self.dvarq_dt]
        if not all(np.isfinite(values)):
            raise InvalidStateError("scenario result", "non-finite entries")
        return self

    @property
    def delta_q_sim(self) -> float:
        return self.moments_f.mean_q - self.moments_i.mean_q

    @property
    def delta_p_sim(self) -> float:
        return self.moments_f.mean_p - self.moments_i.mean_p

    def residual(self, channel: str) -> float:
        return {"q": self.r_q, "p": self.r_p, "succ": self.r_succ}[channel]

    def to_row(self) -> Dict[str, object]:
        """One CSV row, keyed by REPORT_COLUMNS"""
        return {
            "scenario_id": self.scenario_id,
            "backend": self.backend.value,
            "g": self.g,
            "a": self.weak_value.a,
            "b": self.weak_value.b,
            "mean_q_i": self.moments_i.mean_q,
            "mean_q_f_sim": self.moments_f.mean_q,
            "mean_q_f_pred": self.prediction.mean_q_f,
            "r_q": self.r_q,
            "mean_p_i": self.moments_i.mean_p,
            "mean_p_f_sim": self.moments_f.mean_p,
            "mean_p_f_pred": self.prediction.mean_p_f,
            "r_p": self.r_p,
            "var_p": self.moments_i.var_p,
            "dvarq_dt": self.dvarq_dt,
            "succ_sim": self.succ_sim,
            "succ_pred": self.succ_pred,
        }


class SlopeFit(BaseModel):
    """Least-squares line through log(residual) against log(g)"""
    model_config = ConfigDict(frozen=True)

    exact: bool = False
    slope: Optional[float] = None
    intercept: Optional[float] = None


class ConvergenceReport(BaseModel):
    """Residuals over a geometric coupling ladder with fitted convergence orders"""
    model_config = ConfigDict(frozen=True)

    g_values: List[float]
    residuals: Dict[str, List[float]]
    fits: Dict[str, SlopeFit]
    results: List[ScenarioResult] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_ladder(self) -> 'ConvergenceReport':
        check_ladder(self.g_values)
        return self
