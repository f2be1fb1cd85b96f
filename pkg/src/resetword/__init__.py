"""Shortest reset words of complete deterministic automata."""
from .automaton import (
    Automaton,
    AutomatonFormatError,
    NotSynchronizingError,
    cerny_automaton,
    random_automaton,
)
from .cost import OutOfMemory, StepKind, TuningParams
from .engine import ExactResult, SolverConfig, forced_schedule, solve_exact
from .heuristics import HeuristicResult, adaptive_upper_bound, beam_ibfs, eppstein
from .oracle import power_set_bfs_oracle

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "AutomatonFormatError",
    "NotSynchronizingError",
    "cerny_automaton",
    "random_automaton",
    "OutOfMemory",
    "StepKind",
    "TuningParams",
    "ExactResult",
    "SolverConfig",
    "forced_schedule",
    "solve_exact",
    "HeuristicResult",
    "adaptive_upper_bound",
    "beam_ibfs",
    "eppstein",
    "power_set_bfs_oracle",
]
