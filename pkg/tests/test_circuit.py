import pytest

from cppll.circuit import PfdState, SimTermination, init_from_discrete, simulate
from cppll.core import LoopParameters, PllState
from cppll.corrected_map import run_trajectory

from conftest import (DEEP_SLIP, DEEP_SLIP_STATE, LOCK_IN, LOCK_IN_STATE,
                      SHALLOW_SLIP, SHALLOW_SLIP_STATE, SHORT_UP, SHORT_UP_STATE)


def test_init_from_discrete_sourcing_start():
    cs = init_from_discrete(SHORT_UP, SHORT_UP_STATE)
    assert cs.pfd is PfdState.UP
    assert cs.v_cap == pytest.approx(0.875, rel=1e-12)  # v(0) - (ip/c)*tau(0)
    assert cs.next_ref_edge == SHORT_UP.t_ref
    assert 0.0 <= cs.theta_vco < 1.0


def test_init_from_discrete_sinking_start():
    cs = init_from_discrete(DEEP_SLIP, DEEP_SLIP_STATE)
    assert cs.pfd is PfdState.DOWN
    assert cs.v_cap == pytest.approx(1.98, rel=1e-12)  # v(0) + (ip/c)*|tau(0)|
    assert cs.next_ref_edge == pytest.approx(0.098, rel=1e-12)
    assert cs.theta_vco == 0.0


def test_init_from_discrete_coincident_edges():
    cs = init_from_discrete(SHORT_UP, PllState(tau=0.0, v=0.7))
    assert cs.pfd is PfdState.NULL
    assert cs.v_cap == 0.7


def test_zeroth_pulse_realizes_initial_state():
    sim = simulate(SHORT_UP, SHORT_UP_STATE, max_pulses=1)
    pulse = sim.train.pulses[0]
    assert pulse.width == pytest.approx(0.0125, rel=1e-9)
    assert pulse.v_end == pytest.approx(1.0, rel=1e-9)


def test_short_up_first_transition():
    sim = simulate(SHORT_UP, SHORT_UP_STATE, max_pulses=2)
    assert sim.termination is SimTermination.COMPLETED
    assert len(sim.train.pulses) == 2
    assert sim.train.pulses[1].width == pytest.approx(-0.0625, rel=1e-9)
    assert sim.train.pulses[1].v_end == pytest.approx(0.375, rel=1e-9)


def test_deep_slip_overloads_mid_pulse():
    sim = simulate(DEEP_SLIP, DEEP_SLIP_STATE, max_pulses=5)
    assert sim.termination is SimTermination.OVERLOADED
    # only the initial pulse completes; the next sinking pulse stalls the VCO
    assert len(sim.train.pulses) == 1
    assert sim.train.pulses[0].width == pytest.approx(-0.098, rel=1e-9)
    # stall time: pulse starts at 0.098 + l_b and f = 19.6 - 200*t thereafter
    assert sim.end_time == pytest.approx(0.20194, abs=1e-9)


def test_shallow_slip_adjudication():
    # The circuit confirms the substituted successor for this set, against
    # the circulating (0, 10) figure (see test_corrected_map for the
    # voltage-update contradiction).
    sim = simulate(SHALLOW_SLIP, SHALLOW_SLIP_STATE, max_pulses=2)
    assert sim.termination is SimTermination.COMPLETED
    assert sim.train.pulses[1].width == pytest.approx(-0.0569375, rel=1e-9)
    assert sim.train.pulses[1].v_end == pytest.approx(0.3153125, rel=1e-9)


def test_exact_lock_produces_no_pulses():
    # kv * v = 8 = 1/t_ref: the VCO period equals the reference period
    p = LoopParameters(r2=1.0, c=1.0, kv=16.0, ip=1.0, t_ref=0.125)
    sim = simulate(p, PllState(tau=0.0, v=0.5), max_time=10 * p.t_ref,
                   record_events=True)
    assert sim.termination is SimTermination.COMPLETED
    assert sim.train.pulses == ()
    assert all(ev.v_cap == 0.5 for ev in sim.events)


def test_max_time_horizon():
    sim = simulate(LOCK_IN, LOCK_IN_STATE, max_time=0.01)
    assert sim.termination is SimTermination.COMPLETED
    assert sim.end_time == 0.01


def test_requires_a_horizon():
    with pytest.raises(ValueError):
        simulate(LOCK_IN, LOCK_IN_STATE)


def test_matches_map_while_running():
    traj = run_trajectory(LOCK_IN, LOCK_IN_STATE, 10)
    sim = simulate(LOCK_IN, LOCK_IN_STATE, max_pulses=11)
    expected = [s for s in traj.states if s.tau != 0.0]
    assert len(sim.train.pulses) >= len(expected)
    for st, pulse in zip(expected, sim.train.pulses):
        assert pulse.width == pytest.approx(st.tau, rel=1e-9, abs=1e-15)
        assert pulse.v_end == pytest.approx(st.v, rel=1e-9)


def test_charge_conservation_between_pulses():
    # the capacitor only moves while the pump is on: v_end steps by
    # (ip/c) * width from one pulse to the next
    sim = simulate(LOCK_IN, LOCK_IN_STATE, max_pulses=20)
    rate = LOCK_IN.ip / LOCK_IN.c
    prev = LOCK_IN_STATE.v  # tau(0) = 0: capacitor starts at v(0)
    for pulse in sim.train.pulses:
        assert pulse.v_end - prev == pytest.approx(rate * pulse.width, rel=1e-10, abs=1e-12)
        prev = pulse.v_end


def test_vco_edges_land_on_integer_phase():
    sim = simulate(LOCK_IN, LOCK_IN_STATE, max_pulses=30, record_events=True)
    assert sim.max_phase_residual <= 1e-9
    for ev in sim.events:
        if ev.kind in ("vco", "ref+vco"):
            assert ev.theta_vco == round(ev.theta_vco)


def test_event_times_strictly_increase():
    sim = simulate(LOCK_IN, LOCK_IN_STATE, max_pulses=30, record_events=True)
    times = [ev.time for ev in sim.events]
    assert all(b > a for a, b in zip(times, times[1:]))
    starts = [q.start for q in sim.train.pulses]
    assert all(b > a for a, b in zip(starts, starts[1:]))
    assert all(q.width != 0.0 for q in sim.train.pulses)


def test_filter_output_jumps_with_pump():
    sim = simulate(SHORT_UP, SHORT_UP_STATE, max_pulses=3, record_events=True)
    for ev in sim.events:
        sign = {PfdState.UP: 1.0, PfdState.NULL: 0.0, PfdState.DOWN: -1.0}[ev.pfd]
        assert ev.v_f == pytest.approx(ev.v_cap + SHORT_UP.r2 * SHORT_UP.ip * sign, rel=1e-12)
