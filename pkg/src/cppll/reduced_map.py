"""Two-parameter reduced form of the exact charge-pump PLL map.

Change of variables: s = tau / T is the pulse width in reference periods and
w = T*(omega_free + kv*v) - 1 the relative VCO frequency offset during the
pump-off gap (w = 0 means the VCO period equals the reference period).
Under it the map depends only on

    alpha = kv * ip * t_ref * r2,      beta = kv * ip * t_ref^2 / (2 * c),

with the updates mirroring the dimensional branches and
w(k+1) = w(k) + 2*beta*s(k+1). The reduced step was obtained by direct
substitution; its correctness is established by the commutation property
with the dimensional map (see the test suite), not by a separate derivation
kept here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import LoopParameters, PllState, euclid_mod, positive_quadratic_root
from .corrected_map import OverloadCondition, StepKind


@dataclass(frozen=True)
class ReducedParams:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class ReducedState:
    s: float
    w: float
    k: int = 0


@dataclass(frozen=True)
class ReducedOutcome:
    """Mirror of the dimensional step outcome in reduced coordinates."""

    kind: StepKind
    state: ReducedState | None = None
    branch: int | None = None
    overload: OverloadCondition | None = None
    margin: float | None = None

    @property
    def ok(self) -> bool:
        return self.kind is StepKind.NEXT


def to_reduced(p: LoopParameters, st: PllState) -> tuple[ReducedParams, ReducedState]:
    rp = ReducedParams(alpha=p.kv * p.ip * p.t_ref * p.r2,
                       beta=p.kv * p.ip * p.t_ref * p.t_ref / (2.0 * p.c))
    rs = ReducedState(s=st.tau / p.t_ref,
                      w=p.t_ref * (p.omega_free + p.kv * st.v) - 1.0,
                      k=st.k)
    return rp, rs


def params_from_reduced(rp: ReducedParams) -> LoopParameters:
    """A dimensional section through parameter space with the given (alpha, beta).

    Convention: t_ref = r2 = ip = 1, omega_free = 0, hence kv = alpha and
    c = alpha / (2*beta). Any section works because the reduced dynamics
    depend on (alpha, beta) alone.
    """
    return LoopParameters(r2=1.0, c=rp.alpha / (2.0 * rp.beta), kv=rp.alpha,
                          ip=1.0, t_ref=1.0, omega_free=0.0)


def state_from_reduced(p: LoopParameters, rs: ReducedState) -> PllState:
    """Dimensional state whose reduced image is rs (inverse of to_reduced)."""
    v = ((rs.w + 1.0) / p.t_ref - p.omega_free) / p.kv
    return PllState(tau=rs.s * p.t_ref, v=v, k=rs.k)


def reduced_step(rp: ReducedParams, rs: ReducedState) -> ReducedOutcome:
    """One pump pulse in reduced coordinates.

    Branch guards and overload tests mirror the dimensional map exactly;
    margins are reported in reduced units (the dimensional margins scaled by
    t_ref * kv), so their signs, not values, match the dimensional outcome.
    """
    if not rs.s > -1.0:
        raise ValueError(f"s must exceed -1, got {rs.s!r}")
    w_gap = rs.w + 1.0  # t_ref * (pump-off VCO frequency)
    b = w_gap + rp.alpha
    if rs.s >= 0.0:
        s_mod = euclid_mod(rs.s, 1.0)
        c_val = (1.0 - s_mod) * w_gap - 1.0
        if c_val <= 0.0:
            branch = 1
            s_next = positive_quadratic_root(rp.beta, b, c_val)
        else:
            branch = 2
            s_next = 1.0 / w_gap - 1.0 + s_mod
    else:
        s_lk = -(w_gap - rp.alpha) * rs.s + rp.beta * rs.s * rs.s
        s_la = euclid_mod(s_lk, 1.0)
        if w_gap <= 0.0:
            return ReducedOutcome(kind=StepKind.FREQUENCY_FAULT)
        lb_norm = (1.0 - s_la) / w_gap  # l_b in units of t_ref
        if lb_norm <= 1.0:
            branch = 3
            s_next = lb_norm - 1.0
        else:
            branch = 4
            d_val = s_la + w_gap - 1.0
            assert d_val < 0.0
            s_next = positive_quadratic_root(rp.beta, b, d_val)
    w_next = rs.w + 2.0 * rp.beta * s_next
    nxt = ReducedState(s=s_next, w=w_next, k=rs.k + 1)
    if s_next > 0.0:
        margin = w_next + 1.0 - 2.0 * rp.beta * s_next
        which = OverloadCondition.POSITIVE_TAU
    elif s_next < 0.0:
        margin = w_next + 1.0 - rp.alpha
        which = OverloadCondition.NEGATIVE_TAU
    else:
        return ReducedOutcome(kind=StepKind.NEXT, state=nxt, branch=branch)
    if margin < 0.0:
        return ReducedOutcome(kind=StepKind.OVERLOADED, state=nxt, branch=branch,
                              overload=which, margin=margin)
    return ReducedOutcome(kind=StepKind.NEXT, state=nxt, branch=branch, margin=margin)
