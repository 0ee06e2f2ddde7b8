"""Preparation-noncontextuality games: bounds, quantum values, see-saw, Bell bridge."""

from ._core import (
    FormatError,
    Game,
    GameError,
    QuantumStrategy,
    bridge,
    build_cglmp_game,
    build_rac,
    cglmp_mixed_value,
    cglmp_quantum_strategy,
    cglmp_value_formula,
    obliviousness_deviation,
    pnc_bound,
    quantum_performance,
    rac_pnc_bound,
    seesaw,
)

__all__ = [
    "FormatError",
    "Game",
    "GameError",
    "QuantumStrategy",
    "bridge",
    "build_cglmp_game",
    "build_rac",
    "cglmp_mixed_value",
    "cglmp_quantum_strategy",
    "cglmp_value_formula",
    "obliviousness_deviation",
    "pnc_bound",
    "quantum_performance",
    "rac_pnc_bound",
    "seesaw",
]
