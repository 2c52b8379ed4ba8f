"""Models package for the weak measurement simulator"""
from .system import (
    SystemState,
    Observable,
    SpectralDecomposition,
    WeakValue
)
from .pointer import (
    Grid,
    PointerState,
    Moments,
    PolarFields,
    EvolutionSpec
)
from .measurement import CouplingSpec, PostSelectedPointer
from .theory import (
    ShiftPrediction,
    PointerObservable,
    PointerObservableKind,
    ObservableFactor,
    SpecialCaseReport
)
from .scenario import (
    Backend,
    GaussianRecipe,
    TabulatedRecipe,
    Scenario,
    ScenarioResult,
    SlopeFit,
    ConvergenceReport,
    REPORT_COLUMNS,
    RESIDUAL_CHANNELS,
    check_ladder
)

__all__ = [
    'SystemState',
    'Observable',
    'SpectralDecomposition',
    'WeakValue',
    'Grid',
    'PointerState',
    'Moments',
    'PolarFields',
    'EvolutionSpec',
    'CouplingSpec',
    'PostSelectedPointer',
    'ShiftPrediction',
    'PointerObservable',
    'PointerObservableKind',
    'ObservableFactor',
    'SpecialCaseReport',
    'Backend',
    'GaussianRecipe',
    'TabulatedRecipe',
    'Scenario',
    'ScenarioResult',
    'SlopeFit',
    'ConvergenceReport',
    'REPORT_COLUMNS',
    'RESIDUAL_CHANNELS',
    'check_ladder'
]
