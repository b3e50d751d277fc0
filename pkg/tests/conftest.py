"""Shared golden parameter sets.

Four hand-checked loop configurations exercising distinct regimes. Expected
values quoted in the tests were derived by direct substitution into the
model formulas and cross-checked against the event-driven circuit simulator;
where a published rounded figure exists the stated tolerance reflects its
printed precision.
"""

from cppll.core import LoopParameters, PllState

# Short sourcing pulse start; the VCO leads and the next pulse sinks current.
SHORT_UP = LoopParameters(r2=0.2, c=0.01, kv=20.0, ip=0.1, t_ref=0.125)
SHORT_UP_STATE = PllState(tau=0.0125, v=1.0)

# Wide sinking pulse; slips one cycle and drives the VCO into overload.
DEEP_SLIP = SHORT_UP
DEEP_SLIP_STATE = PllState(tau=-0.098, v=1.0)

# Wide sinking pulse with double the capacitance; slips but keeps running.
SHALLOW_SLIP = LoopParameters(r2=0.2, c=0.02, kv=20.0, ip=0.1, t_ref=0.125)
SHALLOW_SLIP_STATE = PllState(tau=-0.123, v=0.6)

# Lock-in benchmark: starts five times too fast and acquires lock.
LOCK_IN = LoopParameters(r2=1000.0, c=1e-6, kv=500.0, ip=1e-3, t_ref=1e-3)
LOCK_IN_STATE = PllState(tau=0.0, v=10.0)
