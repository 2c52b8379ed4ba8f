"""
Data models for closed-form first-order predictions
"""
from enum import Enum
from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from modules.exceptions import InvalidStateError


class ShiftPrediction(BaseModel):
    """Predicted first-order shifts of the pointer means"""
    model_config = ConfigDict(frozen=True)

    delta_q: float
    delta_p: float
    mean_q_f: float
    mean_p_f: float


class PointerObservableKind(str, Enum):
    """Supported pointer observable families"""
    POSITION = "position"
    MOMENTUM = "momentum"
    POSITION_SQUARED = "position-squared"
    COMPOSITE = "composite"


class ObservableFactor(BaseModel):
    """A power of q or of p; diagonal in the position or momentum representation"""
    model_config = ConfigDict(frozen=True)

    representation: Literal["position", "momentum"]
    power: int = Field(default=1, ge=1)

    @property
    def label(self) -> str:
        symbol = "q" if self.representation == "position" else "p"
        return symbol if self.power == 1 else f"{symbol}^{self.power}"


class PointerObservable(BaseModel):
    """Ordered product F_1 F_2 ... F_n of diagonal factors"""
    model_config = ConfigDict(frozen=True)

    kind: PointerObservableKind
    factors: List[ObservableFactor]

    @model_validator(mode='after')
    def validate_factors(self) -> 'PointerObservable':
        if not self.factors:
            raise InvalidStateError("pointer observable", "at least one factor is required")
        return self

    @classmethod
    def position(cls) -> 'PointerObservable':
        return cls(kind=PointerObservableKind.POSITION, factors=[ObservableFactor(representation="position")])

    @classmethod
    def momentum(cls) -> 'PointerObservable':
        return cls(kind=PointerObservableKind.MOMENTUM, factors=[ObservableFactor(representation="momentum")])

    @classmethod
    def position_squared(cls) -> 'PointerObservable':
        return cls(
            kind=PointerObservableKind.POSITION_SQUARED,
            factors=[ObservableFactor(representation="position", power=2)],
        )

    @classmethod
    def composite(cls, factors: List[ObservableFactor]) -> 'PointerObservable':
        return cls(kind=PointerObservableKind.COMPOSITE, factors=factors)

    @property
    def name(self) -> str:
        return " ".join(f.label for f in self.factors)


class SpecialCaseReport(BaseModel):
    """Which reduced shift formulas apply to a scenario, with their values"""
    model_config = ConfigDict(frozen=True)

    real_weak_value: bool
    real_pointer: bool
    cases: List[str] = Field(default_factory=list)
    delta_q: float
    delta_p: float
    success_scale: float
    max_phase_gradient: float

    @property
    def reduced(self) -> bool:
        return bool(self.cases)
