"""Exact discrete-time nonlinear charge-pump PLL map.

One step advances the loop from the end of pump pulse k to the end of pump
pulse k+1 in closed form. The branch taken is selected from the *current*
state (tau(k), v(k)) alone:

    tau(k) >= 0, c <= 0   next pulse sources current; width from a quadratic
    tau(k) >= 0, c >  0   next pulse sinks current; width is linear
    tau(k) <  0, l_b <= T next pulse sinks current again (VCO edge first)
    tau(k) <  0, l_b >  T next pulse sources current; width from a quadratic

where c is the normalized phase headroom to the next reference edge and l_b
the pump-off time to the next VCO edge. Selecting on the current state keeps
both quadratic discriminants nonnegative by construction, so the map is total
wherever the pump-off VCO frequency kv*v + omega_free is positive.

The voltage update is always v(k+1) = v(k) + (ip/c) * tau(k+1).

After each step the new state is tested against the two VCO overload
conditions (pump-on frequency driven to zero); an overloaded step ends the
simulation, no post-overload continuation is modeled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import LoopParameters, PllState, euclid_mod, positive_quadratic_root


class FrequencyFaultError(ValueError):
    """kv*v + omega_free was <= 0 where the model divides by it."""


class OverloadCondition(enum.Enum):
    POSITIVE_TAU = "positive-tau"  # tau(k+1) > 0 and v - (ip/c)*tau would stall the VCO
    NEGATIVE_TAU = "negative-tau"  # tau(k+1) < 0 and v - ip*r2 would stall the VCO


class StepKind(enum.Enum):
    NEXT = "next"
    OVERLOADED = "overloaded"
    FREQUENCY_FAULT = "frequency_fault"


@dataclass(frozen=True)
class Auxiliaries:
    """Intermediate quantities of one map step.

    a (1/(V s^2)) and b (Hz) are the quadratic coefficients; c_val and d_val
    the dimensionless branch discriminators; s_lk the VCO phase advance (in
    cycles) over a sinking pulse of width |tau|, s_la = s_lk mod 1 its
    fractional part; l_b (s) the pump-off time until the next VCO edge.
    """

    a: float
    b: float
    c_val: float
    d_val: float
    l_b: float
    s_la: float
    s_lk: float


@dataclass(frozen=True)
class StepOutcome:
    """Result of one map step: a successor, an overload, or a frequency fault.

    On overload the offending successor state is still reported (it is the
    last meaningful state of the trajectory). ``margin`` is the value of the
    applicable overload expression (negative exactly when overloaded); it is
    None when tau(k+1) == 0, where neither condition applies.
    """

    kind: StepKind
    state: PllState | None = None
    branch: int | None = None
    overload: OverloadCondition | None = None
    margin: float | None = None

    @property
    def ok(self) -> bool:
        return self.kind is StepKind.NEXT


class Termination(enum.Enum):
    COMPLETED = "completed"
    OVERLOADED = "overloaded"
    FREQUENCY_FAULT = "frequency_fault"


@dataclass(frozen=True)
class Trajectory:
    states: tuple[PllState, ...]
    termination: Termination
    branches: tuple[int, ...] = ()
    overload: OverloadCondition | None = None


def _raw_auxiliaries(p: LoopParameters, st: PllState):
    """All auxiliary quantities; l_b and d_val are None when the pump-off
    frequency is not positive (the divisor of l_b)."""
    f_gap = p.omega_free + p.kv * st.v
    a = p.kv * p.ip / (2.0 * p.c)
    b = f_gap + p.kv * p.ip * p.r2
    tau_mod = euclid_mod(st.tau, p.t_ref)
    c_val = (p.t_ref - tau_mod) * f_gap - 1.0
    s_lk = -(p.kv * st.v - p.ip * p.r2 * p.kv + p.omega_free) * st.tau \
        + p.kv * p.ip * st.tau * st.tau / (2.0 * p.c)
    s_la = euclid_mod(s_lk, 1.0)
    if f_gap > 0.0:
        l_b = (1.0 - s_la) / f_gap
        d_val = s_la + p.t_ref * f_gap - 1.0
    else:
        l_b = None
        d_val = None
    return f_gap, a, b, tau_mod, c_val, s_lk, s_la, l_b, d_val


def auxiliaries(p: LoopParameters, st: PllState) -> Auxiliaries:
    """Auxiliary quantities of the map at (tau(k), v(k)).

    Raises FrequencyFaultError when kv*v + omega_free <= 0, where l_b's
    divisor is invalid.
    """
    f_gap, a, b, _, c_val, s_lk, s_la, l_b, d_val = _raw_auxiliaries(p, st)
    if l_b is None:
        raise FrequencyFaultError(
            f"pump-off VCO frequency kv*v + omega_free = {f_gap!r} is not positive"
        )
    return Auxiliaries(a=a, b=b, c_val=c_val, d_val=d_val, l_b=l_b, s_la=s_la, s_lk=s_lk)


def overload_margin(p: LoopParameters, st: PllState) -> float | None:
    """Overload margin at a state, per the sign of its tau; None for tau == 0.

    Negative margin means the VCO was driven past zero frequency while that
    pulse (tau > 0: the preceding pump-off gap; tau < 0: the sinking pulse)
    was produced.
    """
    if st.tau > 0.0:
        return st.v + p.omega_free / p.kv - (p.ip / p.c) * st.tau
    if st.tau < 0.0:
        return st.v + p.omega_free / p.kv - p.ip * p.r2
    return None


def step(p: LoopParameters, st: PllState) -> StepOutcome:
    """Advance the map by one pump pulse.

    Precondition: st.tau > -t_ref. Branch guards are evaluated exactly as
    written (tau == 0 goes to the nonnegative branches, boundaries c == 0 and
    l_b == T to branches 1 and 3 respectively).
    """
    if not st.tau > -p.t_ref:
        raise ValueError(f"tau must exceed -t_ref, got tau={st.tau!r}, t_ref={p.t_ref!r}")
    f_gap, a, b, tau_mod, c_val, s_lk, s_la, l_b, d_val = _raw_auxiliaries(p, st)
    if st.tau >= 0.0:
        if c_val <= 0.0:
            branch = 1
            tau_next = positive_quadratic_root(a, b, c_val)
        else:
            # c_val > 0 implies f_gap > 0, so the division is safe
            branch = 2
            tau_next = 1.0 / f_gap - p.t_ref + tau_mod
    else:
        if l_b is None:
            return StepOutcome(kind=StepKind.FREQUENCY_FAULT)
        if l_b <= p.t_ref:
            branch = 3
            tau_next = l_b - p.t_ref
        else:
            branch = 4
            assert d_val < 0.0  # l_b > t_ref with positive f_gap forces this
            tau_next = positive_quadratic_root(a, b, d_val)
    v_next = st.v + (p.ip / p.c) * tau_next
    nxt = PllState(tau=tau_next, v=v_next, k=st.k + 1)
    margin = overload_margin(p, nxt)
    if margin is not None and margin < 0.0:
        which = OverloadCondition.POSITIVE_TAU if tau_next > 0.0 else OverloadCondition.NEGATIVE_TAU
        return StepOutcome(kind=StepKind.OVERLOADED, state=nxt, branch=branch,
                           overload=which, margin=margin)
    return StepOutcome(kind=StepKind.NEXT, state=nxt, branch=branch, margin=margin)


def run_trajectory(p: LoopParameters, st0: PllState, max_steps: int) -> Trajectory:
    """Iterate the map from st0 for up to max_steps pulses.

    The returned sequence includes st0. Overload appends the offending state
    and stops; a frequency fault stops without a successor.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    states = [st0]
    branches: list[int] = []
    st = st0
    for _ in range(max_steps):
        out = step(p, st)
        if out.kind is StepKind.FREQUENCY_FAULT:
            return Trajectory(tuple(states), Termination.FREQUENCY_FAULT, tuple(branches))
        states.append(out.state)
        branches.append(out.branch)
        if out.kind is StepKind.OVERLOADED:
            return Trajectory(tuple(states), Termination.OVERLOADED, tuple(branches),
                              overload=out.overload)
        st = out.state
    return Trajectory(tuple(states), Termination.COMPLETED, tuple(branches))
