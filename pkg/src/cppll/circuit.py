"""Event-driven circuit-level charge-pump PLL simulator.

The loop is modeled as four ideal blocks: a reference clock emitting rising
edges every t_ref seconds, a tri-state phase-frequency detector, a charge
pump injecting +/-ip into a series r2-c filter, and a VCO whose instantaneous
frequency is omega_free + kv * (filter output). Between events the pump
current is constant, so the capacitor voltage is affine in time and the VCO
phase is quadratic; every event time (reference edge, VCO integer-phase
crossing, frequency-zero crossing) is the root of at most a quadratic. The
simulation is therefore exact to floating-point roundoff, with no solver
step-size artifacts, which is what qualifies it as ground truth for the
discrete-time maps.

PFD transitions (rising edges only; the VCO waveform is represented by its
integer phase crossings, duty cycle is irrelevant to an ideal PFD):

    reference edge:  NULL -> UP,   DOWN -> NULL,  UP stays UP
    VCO edge:        NULL -> DOWN, UP   -> NULL,  DOWN stays DOWN

Each maximal interval with the pump on is one pulse; its signed width
(positive while sourcing) and the capacitor voltage at its end reproduce the
discrete state (tau(k), v(k)). Simultaneous reference and VCO edges (within
1e-15 * t_ref) are processed reference-first, so an exactly locked loop
produces zero-width pulses, which are not recorded.

If the VCO frequency reaches zero the simulation stops at the exact crossing
time and reports overload; no saturation is modeled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import LoopParameters, PllState

_TIE_REL = 1e-15          # edge-coincidence tolerance, in units of t_ref
_PHASE_RESIDUAL = 1e-9    # max acceptable |theta - integer| at a VCO edge, cycles


class PfdState(enum.Enum):
    UP = "UP"
    NULL = "NULL"
    DOWN = "DOWN"


class SimTermination(enum.Enum):
    COMPLETED = "completed"
    OVERLOADED = "overloaded"


@dataclass(frozen=True)
class CircuitState:
    """Continuous-time state snapshot: the PFD output, the capacitor voltage,
    the VCO phase in cycles (edges fire at integers), and the time of the
    next reference edge."""

    time: float
    pfd: PfdState
    v_cap: float
    theta_vco: float
    next_ref_edge: float


@dataclass(frozen=True)
class Pulse:
    """One maximal pump-on interval: signed width (positive while sourcing)
    and the capacitor voltage when the pump returned to NULL."""

    start: float
    width: float
    v_end: float


@dataclass(frozen=True)
class PulseTrain:
    pulses: tuple[Pulse, ...]

    def states(self) -> list[PllState]:
        """Discrete readout: the k-th recorded pulse as a map state."""
        return [PllState(tau=q.width, v=q.v_end, k=i) for i, q in enumerate(self.pulses)]


@dataclass(frozen=True)
class CircuitEvent:
    """One processed event, recorded after its PFD transitions were applied."""

    time: float
    kind: str  # "init", "ref", "vco", "ref+vco", "overload"
    pfd: PfdState
    v_cap: float
    v_f: float
    theta_vco: float


@dataclass(frozen=True)
class SimulationResult:
    train: PulseTrain
    termination: SimTermination
    end_time: float
    events: tuple[CircuitEvent, ...] = ()
    max_phase_residual: float = 0.0


def init_from_discrete(p: LoopParameters, st0: PllState) -> CircuitState:
    """Circuit state at t = 0 whose zeroth pulse realizes (tau(0), v(0)).

    tau(0) > 0: a reference edge fired at t = 0 (pump sourcing), the VCO edge
    is due at t = tau(0), and the capacitor starts at v(0) - (ip/c)*tau(0) so
    it ends the pulse at v(0). tau(0) < 0: a VCO edge fired at t = 0 (pump
    sinking), the reference edge is due at |tau(0)|, and the capacitor starts
    at v(0) + (ip/c)*|tau(0)|. tau(0) = 0: coincident edges, no pump
    activity, the capacitor sits at v(0). Later reference edges follow the
    first at multiples of t_ref.

    Initial pairs that no actual pulse can produce (a sourcing pulse so wide
    the VCO would have fired mid-pulse) yield a zeroth pulse that does not
    match (tau(0), v(0)); the construction does not detect this.
    """
    rate = p.ip / p.c
    if st0.tau > 0.0:
        v_cap = st0.v - rate * st0.tau
        f0 = p.omega_free + p.kv * (v_cap + p.r2 * p.ip)
        advance = f0 * st0.tau + (p.kv * p.ip / (2.0 * p.c)) * st0.tau * st0.tau
        return CircuitState(time=0.0, pfd=PfdState.UP, v_cap=v_cap,
                            theta_vco=1.0 - advance, next_ref_edge=p.t_ref)
    if st0.tau < 0.0:
        v_cap = st0.v + rate * (-st0.tau)
        return CircuitState(time=0.0, pfd=PfdState.DOWN, v_cap=v_cap,
                            theta_vco=0.0, next_ref_edge=-st0.tau)
    return CircuitState(time=0.0, pfd=PfdState.NULL, v_cap=st0.v,
                        theta_vco=0.0, next_ref_edge=p.t_ref)


def _phase_crossing(a2: float, f0: float, gap: float) -> float | None:
    """Earliest dt > 0 with a2*dt^2 + f0*dt = gap (gap > 0), None if the
    phase never gets there (decelerating pump, VCO stalls first)."""
    if a2 == 0.0:
        return gap / f0 if f0 > 0.0 else None
    disc = f0 * f0 + 4.0 * a2 * gap
    if disc < 0.0:
        return None
    denom = f0 + math.sqrt(disc)
    if denom <= 0.0:
        return None
    return 2.0 * gap / denom


_PUMP_SIGN = {PfdState.UP: 1.0, PfdState.NULL: 0.0, PfdState.DOWN: -1.0}


def simulate(p: LoopParameters, init: PllState,
             max_pulses: int | None = None, max_time: float | None = None,
             record_events: bool = False, max_events: int = 1_000_000) -> SimulationResult:
    """Run the circuit from init_from_discrete(p, init) until the horizon.

    The horizon is max_pulses recorded pulses and/or max_time seconds,
    whichever comes first; at least one must be given. max_events bounds the
    number of processed edges (a locked loop records no pulses but keeps
    producing edges) and raises RuntimeError when exhausted.
    """
    if max_pulses is None and max_time is None:
        raise ValueError("provide max_pulses and/or max_time")
    if max_pulses is not None and max_pulses < 0:
        raise ValueError("max_pulses must be >= 0")

    cs = init_from_discrete(p, init)
    t = cs.time
    pfd = cs.pfd
    v_cap = cs.v_cap
    theta = cs.theta_vco
    ref0 = cs.next_ref_edge
    ref_i = 0
    target = math.floor(theta) + 1  # next integer strictly above theta
    tie_eps = _TIE_REL * p.t_ref

    pulses: list[Pulse] = []
    events: list[CircuitEvent] = []
    max_residual = 0.0
    pulse_start = t if pfd is not PfdState.NULL else None
    pulse_sign = _PUMP_SIGN[pfd]

    def current() -> float:
        return _PUMP_SIGN[pfd] * p.ip

    def record(kind: str) -> None:
        if record_events:
            i = current()
            events.append(CircuitEvent(time=t, kind=kind, pfd=pfd, v_cap=v_cap,
                                       v_f=v_cap + p.r2 * i, theta_vco=theta))

    def leave_null(sign: float) -> None:
        nonlocal pulse_start, pulse_sign
        pulse_start = t
        pulse_sign = sign

    def enter_null() -> None:
        nonlocal pulse_start
        if pulse_start is not None and t > pulse_start:
            pulses.append(Pulse(start=pulse_start, width=pulse_sign * (t - pulse_start),
                                v_end=v_cap))
        pulse_start = None

    record("init")

    def finish(termination: SimTermination) -> SimulationResult:
        return SimulationResult(train=PulseTrain(tuple(pulses)), termination=termination,
                                end_time=t, events=tuple(events),
                                max_phase_residual=max_residual)

    for _ in range(max_events):
        if max_pulses is not None and len(pulses) >= max_pulses:
            return finish(SimTermination.COMPLETED)
        i = current()
        f0 = p.omega_free + p.kv * (v_cap + p.r2 * i)
        if f0 <= 0.0:
            record("overload")
            return finish(SimTermination.OVERLOADED)
        a2 = p.kv * i / (2.0 * p.c)  # phase acceleration; f(dt) = f0 + 2*a2*dt

        t_ref_e = ref0 + ref_i * p.t_ref
        dt_vco = _phase_crossing(a2, f0, target - theta)
        t_vco_e = t + dt_vco if dt_vco is not None else math.inf
        t_over = t + f0 * p.c / (p.kv * p.ip) if i < 0.0 else math.inf
        t_edge = min(t_ref_e, t_vco_e)

        if max_time is not None and max_time <= t_edge and max_time < t_over:
            dt = max_time - t
            v_cap += (i / p.c) * dt
            theta += f0 * dt + a2 * dt * dt
            t = max_time
            record("horizon")
            return finish(SimTermination.COMPLETED)

        if t_over < t_edge - tie_eps:
            dt = t_over - t
            v_cap += (i / p.c) * dt
            theta += f0 * dt + a2 * dt * dt
            t = t_over
            record("overload")
            return finish(SimTermination.OVERLOADED)

        fire_ref = t_ref_e - t_edge <= tie_eps
        fire_vco = t_vco_e - t_edge <= tie_eps
        dt = t_edge - t
        v_cap += (i / p.c) * dt
        theta += f0 * dt + a2 * dt * dt
        t = t_edge

        if fire_ref:
            ref_i += 1
            if pfd is PfdState.NULL:
                pfd = PfdState.UP
                leave_null(1.0)
            elif pfd is PfdState.DOWN:
                pfd = PfdState.NULL
                enter_null()
        if fire_vco:
            residual = abs(theta - target)
            max_residual = max(max_residual, residual)
            assert residual <= _PHASE_RESIDUAL, "VCO edge missed its integer phase"
            theta = float(target)
            target += 1
            if pfd is PfdState.NULL:
                pfd = PfdState.DOWN
                leave_null(-1.0)
            elif pfd is PfdState.UP:
                pfd = PfdState.NULL
                enter_null()
        record("ref+vco" if fire_ref and fire_vco else ("ref" if fire_ref else "vco"))

    raise RuntimeError(f"event budget of {max_events} exhausted at t = {t}")
