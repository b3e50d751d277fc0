"""M. van Paemel's original discrete-time charge-pump PLL algorithm.

Implements the flowchart paths of the original model (van Paemel, "Analysis
of a charge-pump PLL: a new model", IEEE Trans. Circuits Syst. II, 1994) for
which closed-form update formulas are available here:

  case 1   0 <= tau(k) < T, next pulse sources current (quadratic root);
  case 2   tau(k) < 0, next pulse sinks current (linear expression);
  case 6   cycle slip: the case-2 value fell below -T, and the elapsed VCO
           periods t_1, t_2, ... are recovered by a recursion seeded with
           v(k-1) until their sum exceeds |tau(k)|.

The point of carrying this model alongside the state-selected map is its
failure taxonomy, reproduced faithfully instead of being patched over:

  * case 1 and the case-6 recursion can demand the square root of a negative
    number (``NEGATIVE_DISCRIMINANT``);
  * case 6 at k = 0 references the nonexistent v(-1)
    (``UNDEFINED_HISTORY``), unless a seeding policy supplies it;
  * every flowchart continuation whose formula is not implemented here
    (cases 3-5, a positive case-2 result, completion of the case-6 sum)
    stops with ``UNSUPPORTED_CASE`` rather than guessing.

The model has no free-running VCO term; omega_free must be zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import LoopParameters, PllState

_CASE6_MAX_ITER = 100_000


class FailureKind(enum.Enum):
    NEGATIVE_DISCRIMINANT = "negative_discriminant"
    UNDEFINED_HISTORY = "undefined_history"
    UNSUPPORTED_CASE = "unsupported_case"


class HistorySeed(enum.Enum):
    """How the case-6 recursion obtains its seed v_0 = v(k-1).

    STRICT   only an actual predecessor qualifies; at k = 0 the algorithm
             fails with UNDEFINED_HISTORY (the literal behavior).
    BACKSTEP v(k-1) is reconstructed as v(k) - (ip/c)*tau(k), which is exact
             for k >= 1 by the voltage update and extends it to k = 0.
    CURRENT  seed with v(k) itself; known wrong, kept because the resulting
             failure mode is a documented reference point.
    """

    STRICT = "strict"
    BACKSTEP = "backstep"
    CURRENT = "current"


@dataclass(frozen=True)
class Failure:
    kind: FailureKind
    case: int | None = None       # flowchart case (1 or 6 for discriminants)
    value: float | None = None    # the offending discriminant
    detail: str | None = None


@dataclass(frozen=True)
class CaseSixTrace:
    """Recorded cycle-slip recursion: pulse widths ts and the voltage
    recursion vs = (v_0, v_1, ..., v_n), one element longer than ts."""

    ts: tuple[float, ...]
    vs: tuple[float, ...]

    @property
    def partial_sum(self) -> float:
        return math.fsum(self.ts)


@dataclass(frozen=True)
class OriginalStepResult:
    """One step of the original algorithm.

    Exactly one of ``state`` (success) and ``failure`` is set. ``case2_trial``
    keeps the raw case-2 value even when the flowchart then moved on to case
    6, and ``case6`` carries the recursion trace whenever case 6 ran.
    """

    state: PllState | None = None
    failure: Failure | None = None
    case_used: int | None = None
    case2_trial: float | None = None
    case6: CaseSixTrace | None = None

    @property
    def ok(self) -> bool:
        return self.state is not None


def case2_trial(p: LoopParameters, st: PllState) -> float:
    """The raw case-2 update value; below -T it indicates a cycle slip."""
    return (1.0 / p.kv - p.ip * p.r2 * st.tau - p.ip * st.tau * st.tau / (2.0 * p.c)) / st.v \
        - p.t_ref + st.tau


def _case6(p: LoopParameters, st: PllState, trial: float,
           history: HistorySeed) -> OriginalStepResult:
    if history is HistorySeed.STRICT and st.k == 0:
        return OriginalStepResult(
            failure=Failure(FailureKind.UNDEFINED_HISTORY,
                            detail="v(-1) referenced at k = 0"),
            case_used=6, case2_trial=trial)
    if history is HistorySeed.CURRENT:
        v0 = st.v
    else:
        # exact predecessor voltage, since v(k) = v(k-1) + (ip/c)*tau(k)
        v0 = st.v - (p.ip / p.c) * st.tau
    rate = p.ip / p.c
    q = 2.0 * rate / p.kv
    ts: list[float] = []
    vs: list[float] = [v0]
    total = 0.0
    target = -st.tau  # |tau(k)|, tau(k) < 0 here
    for _ in range(_CASE6_MAX_ITER):
        head = vs[-1] - p.ip * p.r2
        disc = head * head - q
        if disc < 0.0:
            return OriginalStepResult(
                failure=Failure(FailureKind.NEGATIVE_DISCRIMINANT, case=6, value=disc),
                case_used=6, case2_trial=trial,
                case6=CaseSixTrace(tuple(ts), tuple(vs)))
        t_n = (head - math.sqrt(disc)) / rate
        if not t_n > 0.0:
            return OriginalStepResult(
                failure=Failure(FailureKind.UNSUPPORTED_CASE, case=6,
                                detail="nonpositive pulse width in the slip recursion "
                                       "(VCO-overload variants not implemented)"),
                case_used=6, case2_trial=trial,
                case6=CaseSixTrace(tuple(ts), tuple(vs)))
        ts.append(t_n)
        vs.append(vs[-1] - rate * t_n)
        total = math.fsum(ts)
        if total > target:
            return OriginalStepResult(
                failure=Failure(FailureKind.UNSUPPORTED_CASE, case=6,
                                detail="slip recursion completed; its continuation "
                                       "formulas are not implemented"),
                case_used=6, case2_trial=trial,
                case6=CaseSixTrace(tuple(ts), tuple(vs)))
    raise RuntimeError("case-6 recursion failed to terminate")


def original_step(p: LoopParameters, st: PllState,
                  history: HistorySeed = HistorySeed.STRICT) -> OriginalStepResult:
    """One step of the original flowchart from (tau(k), v(k)).

    Successful case-1/case-2 steps update the voltage by
    v(k+1) = v(k) + (ip/c) * tau(k+1), matching the exact map, so the two
    models coincide wherever the original's formulas apply and stay in range.
    """
    if p.omega_free != 0.0:
        raise ValueError("the original model has no free-running VCO term; omega_free must be 0")
    rate = p.ip / p.c
    if st.tau >= 0.0:
        if st.tau >= p.t_ref:
            return OriginalStepResult(
                failure=Failure(FailureKind.UNSUPPORTED_CASE,
                                detail="tau(k) >= T is outside the implemented flowchart paths"))
        head = p.ip * p.r2 + st.v
        disc = head * head - 2.0 * rate * (st.v * (p.t_ref - st.tau) - 1.0 / p.kv)
        if disc < 0.0:
            return OriginalStepResult(
                failure=Failure(FailureKind.NEGATIVE_DISCRIMINANT, case=1, value=disc),
                case_used=1)
        tau_next = (-head + math.sqrt(disc)) / rate
        if tau_next < 0.0 or tau_next > p.t_ref:
            return OriginalStepResult(
                failure=Failure(FailureKind.UNSUPPORTED_CASE,
                                detail="case-1 result outside [0, T]; the flowchart "
                                       "continues into cases 3-5"),
                case_used=1)
        return OriginalStepResult(
            state=PllState(tau=tau_next, v=st.v + rate * tau_next, k=st.k + 1),
            case_used=1)
    if st.v <= 0.0:
        return OriginalStepResult(
            failure=Failure(FailureKind.UNSUPPORTED_CASE,
                            detail="nonpositive v(k) in case 2 (stalled VCO)"))
    trial = case2_trial(p, st)
    if trial < -p.t_ref:
        # cycle slip (out of lock): recalculate through case 6
        return _case6(p, st, trial, history)
    if trial > 0.0:
        return OriginalStepResult(
            failure=Failure(FailureKind.UNSUPPORTED_CASE,
                            detail="case-2 result positive; the flowchart continues "
                                   "past the implemented formulas"),
            case_used=2, case2_trial=trial)
    return OriginalStepResult(
        state=PllState(tau=trial, v=st.v + rate * trial, k=st.k + 1),
        case_used=2, case2_trial=trial)
