"""Charge-pump PLL simulation toolkit.

Discrete-time models (an exact state-selected map, the original 1994
algorithm with its failure taxonomy, and a two-parameter reduced form), an
event-driven circuit-level reference simulator, and parameter-plane analysis
utilities.
"""

from .core import (AllowedArea, LoopParameters, NormalizedGains, PllState,
                   allowed_area, normalized_gains)
from .corrected_map import (Auxiliaries, FrequencyFaultError, OverloadCondition,
                            StepKind, StepOutcome, Termination, Trajectory,
                            auxiliaries, run_trajectory, step)
from .paemel import (CaseSixTrace, Failure, FailureKind, HistorySeed,
                     OriginalStepResult, original_step)
from .reduced_map import (ReducedOutcome, ReducedParams, ReducedState,
                          params_from_reduced, reduced_step, state_from_reduced,
                          to_reduced)
from .circuit import (CircuitState, Pulse, PulseTrain, SimTermination,
                      SimulationResult, init_from_discrete, simulate)

__version__ = "0.1.0"

__all__ = [
    "AllowedArea", "Auxiliaries", "CaseSixTrace", "CircuitState", "Failure",
    "FailureKind", "FrequencyFaultError", "HistorySeed", "LoopParameters",
    "NormalizedGains", "OriginalStepResult", "OverloadCondition", "PllState",
    "Pulse", "PulseTrain", "ReducedOutcome", "ReducedParams", "ReducedState",
    "SimTermination", "SimulationResult", "StepKind", "StepOutcome",
    "Termination", "Trajectory", "allowed_area", "auxiliaries",
    "init_from_discrete", "normalized_gains", "original_step",
    "params_from_reduced", "reduced_step", "run_trajectory", "simulate",
    "state_from_reduced", "step", "to_reduced",
]
