"""Quantum-inspired evolutionary algorithm, orthogonal-array parameter tuning,
and the binary benchmark suite used to validate the tuning method."""

from .engine import BinarySolution, EngineConfig, RunRecord, StopCriteria, run
from .qbits import Qbit, QbitString, RotationPolicy, init_equal, init_random, observe

__all__ = [
    "BinarySolution",
    "EngineConfig",
    "Qbit",
    "QbitString",
    "RotationPolicy",
    "RunRecord",
    "StopCriteria",
    "init_equal",
    "init_random",
    "observe",
    "run",
]

__version__ = "0.1.0"
