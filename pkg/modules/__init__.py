"""Modules package for the weak measurement simulator

Submodules are imported directly (``from modules.measurement import ...``);
the package itself stays import-light because the models package depends on
``modules.exceptions``.
"""

__all__ = [
    'system_algebra',
    'pointer_space',
    'measurement',
    'theory',
    'harness',
    'scenario_loader',
    'verification',
    'exceptions',
    'logging_utils'
]
