"""Quench dynamics of two trapped bosons and an impurity."""

from ._core import (
    QuenchEngine,
    QuenchResult,
    ho_energy,
    eval_ho,
    preset_names,
    preset_text,
    validate_config,
    run,
)

__all__ = [
    "QuenchEngine",
    "QuenchResult",
    "ho_energy",
    "eval_ho",
    "preset_names",
    "preset_text",
    "validate_config",
    "run",
]
