"""
Services package initialization
"""
from rebsim.services.builder import ProtocolBuilder, ProtocolEvaluator
from rebsim.services.protocols import ProtocolEngine, ProtocolSpec, pareto, run
from rebsim.services.sweep import best_point, pareto_csv, run_sweep

__all__ = [
    "ProtocolBuilder",
    "ProtocolEvaluator",
    "ProtocolEngine",
    "ProtocolSpec",
    "pareto",
    "run",
    "best_point",
    "pareto_csv",
    "run_sweep",
]
