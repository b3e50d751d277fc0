import pytest
from hypothesis import assume, given, settings, strategies as st

from cppll.core import LoopParameters, PllState
from cppll.corrected_map import StepKind, step
from cppll.paemel import FailureKind, HistorySeed, case2_trial, original_step

from conftest import (DEEP_SLIP, DEEP_SLIP_STATE, SHALLOW_SLIP, SHALLOW_SLIP_STATE,
                      SHORT_UP, SHORT_UP_STATE)


def test_short_up_fails_with_case1_discriminant():
    res = original_step(SHORT_UP, SHORT_UP_STATE)
    assert not res.ok
    assert res.case_used == 1
    assert res.failure.kind is FailureKind.NEGATIVE_DISCRIMINANT
    assert res.failure.case == 1
    assert res.failure.value == pytest.approx(-0.2096, rel=1e-12)


def test_deep_slip_case2_trial_and_undefined_history():
    res = original_step(DEEP_SLIP, DEEP_SLIP_STATE)
    assert res.case2_trial == pytest.approx(-0.21906, rel=1e-12)
    assert res.case2_trial < -DEEP_SLIP.t_ref  # the slip indicator
    assert res.failure.kind is FailureKind.UNDEFINED_HISTORY
    assert res.case_used == 6


def test_deep_slip_current_seed_hits_case6_discriminant():
    res = original_step(DEEP_SLIP, DEEP_SLIP_STATE, HistorySeed.CURRENT)
    assert res.failure.kind is FailureKind.NEGATIVE_DISCRIMINANT
    assert res.failure.case == 6
    assert res.failure.value == pytest.approx(-0.0396, rel=1e-10)
    assert res.case6.ts == ()  # failed before the first slip pulse


def test_deep_slip_backstep_seed_completes_then_stops():
    res = original_step(DEEP_SLIP, DEEP_SLIP_STATE, HistorySeed.BACKSTEP)
    assert res.failure.kind is FailureKind.UNSUPPORTED_CASE
    assert res.failure.case == 6
    trace = res.case6
    assert trace.vs[0] == pytest.approx(1.98, rel=1e-12)  # v(0) - (ip/c)*tau(0)
    assert trace.ts[0] == pytest.approx(0.0274295, abs=1e-6)
    assert trace.partial_sum > 0.098
    assert all(t > 0.0 for t in trace.ts)


def test_shallow_slip_trace():
    res = original_step(SHALLOW_SLIP, SHALLOW_SLIP_STATE, HistorySeed.BACKSTEP)
    assert res.case2_trial == pytest.approx(-0.224, abs=1e-3)
    assert res.failure.kind is FailureKind.NEGATIVE_DISCRIMINANT
    assert res.failure.case == 6
    assert res.failure.value == pytest.approx(-0.0719751, abs=1e-5)
    trace = res.case6
    assert trace.ts == pytest.approx((0.0463319, 0.0618209), abs=1e-6)
    assert trace.partial_sum == pytest.approx(0.1081528, abs=1e-6)
    assert trace.partial_sum < 0.123
    assert trace.vs[0] == pytest.approx(1.215, rel=1e-12)
    assert trace.vs[1] == pytest.approx(0.9833405, abs=1e-6)


def test_shallow_slip_strict_is_undefined_history():
    res = original_step(SHALLOW_SLIP, SHALLOW_SLIP_STATE, HistorySeed.STRICT)
    assert res.failure.kind is FailureKind.UNDEFINED_HISTORY


def test_case6_voltage_recursion_is_exact():
    res = original_step(DEEP_SLIP, DEEP_SLIP_STATE, HistorySeed.BACKSTEP)
    trace = res.case6
    rate = DEEP_SLIP.ip / DEEP_SLIP.c
    for i, t_n in enumerate(trace.ts):
        assert trace.vs[i + 1] == trace.vs[i] - rate * t_n  # bit for bit


def test_strict_seed_uses_reconstructed_predecessor_for_k_ge_1():
    st1 = PllState(tau=DEEP_SLIP_STATE.tau, v=DEEP_SLIP_STATE.v, k=3)
    strict = original_step(DEEP_SLIP, st1, HistorySeed.STRICT)
    backstep = original_step(DEEP_SLIP, st1, HistorySeed.BACKSTEP)
    assert strict == backstep


def test_rejects_free_running_term():
    p = LoopParameters(r2=0.2, c=0.01, kv=20.0, ip=0.1, t_ref=0.125, omega_free=1.0)
    with pytest.raises(ValueError):
        original_step(p, SHORT_UP_STATE)


def test_out_of_range_inputs_are_unsupported():
    res = original_step(SHORT_UP, PllState(tau=0.2, v=1.0))  # tau >= T
    assert res.failure.kind is FailureKind.UNSUPPORTED_CASE
    res = original_step(SHORT_UP, PllState(tau=-0.01, v=-1.0))  # stalled VCO
    assert res.failure.kind is FailureKind.UNSUPPORTED_CASE


def test_determinism():
    a = original_step(SHALLOW_SLIP, SHALLOW_SLIP_STATE, HistorySeed.BACKSTEP)
    b = original_step(SHALLOW_SLIP, SHALLOW_SLIP_STATE, HistorySeed.BACKSTEP)
    assert a == b


def loop_params_no_free_run():
    decade = st.floats(min_value=-1.5, max_value=1.5)
    return st.builds(
        lambda a, b, c, d, e: LoopParameters(
            r2=10.0 ** a, c=10.0 ** b, kv=10.0 ** c, ip=10.0 ** d, t_ref=10.0 ** e),
        decade, decade, decade, decade, decade)


@settings(max_examples=300)
@given(loop_params_no_free_run(),
       st.floats(min_value=-0.999, max_value=0.999),
       st.floats(min_value=0.001, max_value=10.0))
def test_agreement_with_exact_map_on_benign_steps(p, tau_frac, v):
    """Wherever case 1 or case 2 succeeds and the exact map picks the
    matching branch, the two models coincide."""
    st0 = PllState(tau=tau_frac * p.t_ref, v=v)
    if st0.tau < 0.0:
        # states below the sinking-pulse overload margin are post-overload
        # debris where neither model's assumptions hold
        assume(v >= p.ip * p.r2)
    res = original_step(p, st0)
    if not res.ok:
        return
    out = step(p, st0)
    matching = (st0.tau >= 0.0 and out.branch == 1) or (st0.tau < 0.0 and out.branch == 3)
    if not matching:
        return
    assert out.state is not None
    # the two routes round differently; scale the tolerance by the magnitudes
    # their intermediates actually carry
    tau_scale = max(abs(out.state.tau), p.t_ref, 1.0 / (p.kv * v))
    v_scale = max(abs(out.state.v), abs(v), (p.ip / p.c) * tau_scale)
    assert abs(res.state.tau - out.state.tau) <= 1e-12 * tau_scale
    assert abs(res.state.v - out.state.v) <= 1e-12 * v_scale


@settings(max_examples=200)
@given(loop_params_no_free_run(),
       st.floats(min_value=-0.999, max_value=-0.001),
       st.floats(min_value=0.01, max_value=10.0))
def test_case2_trial_matches_formula(p, tau_frac, v):
    st0 = PllState(tau=tau_frac * p.t_ref, v=v)
    expected = (1.0 / p.kv - p.ip * p.r2 * st0.tau
                - p.ip * st0.tau ** 2 / (2.0 * p.c)) / v - p.t_ref + st0.tau
    assert case2_trial(p, st0) == pytest.approx(expected, rel=1e-14, abs=1e-14 * p.t_ref)
