"""Parameter-plane sweeps, lock/slip/overload classification, and
cross-model comparison reports.

Sweep cells are pure functions of their coordinates, so grids are
deterministic and identical for any evaluation order or parallelism degree.
"""

from __future__ import annotations

import dataclasses
import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .circuit import SimTermination, SimulationResult, simulate
from .core import (LoopParameters, PllState, allowed_area, kn_tau2n_from_fn_zeta,
                   normalized_gains)
from .corrected_map import (FrequencyFaultError, StepKind, Termination, Trajectory,
                            auxiliaries, run_trajectory, step)
from .paemel import HistorySeed, original_step
from .reduced_map import ReducedParams, ReducedState, params_from_reduced, state_from_reduced

LOCK_CONFIRM_STEPS = 5


class Verdict(enum.Enum):
    LOCKED = "locked"
    SLIPPING = "slipping"
    OVERLOADED = "overloaded"
    FREQUENCY_FAULT = "frequency_fault"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class CellVerdict:
    verdict: Verdict
    steps_used: int


def _slipped(p: LoopParameters, st: PllState) -> bool:
    """Cycle-slip indicator at a sinking-pulse state: more than one full VCO
    cycle elapsed during the pulse (s_lk > 1), which is exactly where the
    original case-2 value falls below -T for a running VCO."""
    if st.tau >= 0.0:
        return False
    try:
        return auxiliaries(p, st).s_lk > 1.0
    except FrequencyFaultError:
        return False  # the step itself will report the fault


def classify(p: LoopParameters, st0: PllState, steps: int,
             eps_lock: float = 1e-6) -> CellVerdict:
    """Classify a trajectory of at most ``steps`` pulses.

    locked: |tau|/t_ref < eps_lock for LOCK_CONFIRM_STEPS consecutive states
    (iteration stops there); overload and frequency faults are terminal and
    take precedence; otherwise slipping if any step slipped, else undecided.
    A slip on the way to lock still counts as locked: the verdict describes
    where the trajectory ended up within the horizon.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not eps_lock > 0.0:
        raise ValueError("eps_lock must be positive")
    st = st0
    consecutive = 1 if abs(st.tau) / p.t_ref < eps_lock else 0
    if consecutive >= LOCK_CONFIRM_STEPS:
        return CellVerdict(Verdict.LOCKED, 0)
    slipped = False
    for k in range(1, steps + 1):
        slipped = slipped or _slipped(p, st)
        out = step(p, st)
        if out.kind is StepKind.FREQUENCY_FAULT:
            return CellVerdict(Verdict.FREQUENCY_FAULT, k)
        if out.kind is StepKind.OVERLOADED:
            return CellVerdict(Verdict.OVERLOADED, k)
        st = out.state
        if abs(st.tau) / p.t_ref < eps_lock:
            consecutive += 1
            if consecutive >= LOCK_CONFIRM_STEPS:
                return CellVerdict(Verdict.LOCKED, k)
        else:
            consecutive = 0
    return CellVerdict(Verdict.SLIPPING if slipped else Verdict.UNDECIDED, steps)


class Plane(enum.Enum):
    FN_ZETA = "fn_zeta"
    ALPHA_BETA = "alpha_beta"


@dataclass(frozen=True)
class AxisSpec:
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError("count must be >= 2")
        if not (self.lo > 0.0 and self.hi > self.lo):
            raise ValueError("need 0 < lo < hi")

    def values(self) -> list[float]:
        n = self.count
        if self.log:
            ratio = self.hi / self.lo
            return [self.lo * ratio ** (i / (n - 1)) for i in range(n)]
        return [self.lo + (self.hi - self.lo) * i / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class SweepSpec:
    """Grid specification: axis1 is f_n or alpha, axis2 is zeta or beta.

    Every cell starts from the reduced initial condition (s0, w0); the
    default w0 = 0.1 offsets the VCO by 10% so lock-in dynamics are
    exercised.
    """

    plane: Plane
    axis1: AxisSpec
    axis2: AxisSpec
    steps: int = 200
    eps_lock: float = 1e-6
    s0: float = 0.0
    w0: float = 0.1


@dataclass(frozen=True)
class SweepCell:
    x: float
    y: float
    verdict: Verdict
    steps_used: int


@dataclass(frozen=True)
class SweepGrid:
    spec: SweepSpec
    cells: tuple[SweepCell, ...]  # row-major: axis1 outer, axis2 inner


def cell_parameters(plane: Plane, x: float, y: float) -> LoopParameters:
    """Dimensional parameters for a grid cell, on the t_ref = r2 = ip = 1 section."""
    if plane is Plane.FN_ZETA:
        k_n, tau_2n = kn_tau2n_from_fn_zeta(x, y)
        return LoopParameters(r2=1.0, c=tau_2n, kv=k_n, ip=1.0, t_ref=1.0)
    return params_from_reduced(ReducedParams(alpha=x, beta=y))


def _evaluate_cell(args: tuple[Plane, float, float, int, float, float, float]) -> SweepCell:
    plane, x, y, steps, eps_lock, s0, w0 = args
    p = cell_parameters(plane, x, y)
    st0 = state_from_reduced(p, ReducedState(s=s0, w=w0))
    cv = classify(p, st0, steps, eps_lock)
    return SweepCell(x=x, y=y, verdict=cv.verdict, steps_used=cv.steps_used)


def sweep(spec: SweepSpec, max_workers: int = 1) -> SweepGrid:
    """Evaluate the grid; cells are independent, results are assembled in
    grid order regardless of max_workers."""
    tasks = [(spec.plane, x, y, spec.steps, spec.eps_lock, spec.s0, spec.w0)
             for x in spec.axis1.values() for y in spec.axis2.values()]
    if max_workers > 1:
        chunk = max(1, len(tasks) // (4 * max_workers))
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            cells = tuple(pool.map(_evaluate_cell, tasks, chunksize=chunk))
    else:
        cells = tuple(_evaluate_cell(t) for t in tasks)
    return SweepGrid(spec=spec, cells=cells)


def grid_to_csv(grid: SweepGrid) -> str:
    """Fixed grid serialization: header axis1,axis2,verdict,steps_used, LF
    line endings, full-precision floats."""
    lines = ["axis1,axis2,verdict,steps_used"]
    for cell in grid.cells:
        lines.append(f"{cell.x!r},{cell.y!r},{cell.verdict.value},{cell.steps_used}")
    return "\n".join(lines) + "\n"


def disagreement_cells(grid: SweepGrid) -> list[SweepCell]:
    """Locked cells lying outside the analytic design region.

    These are findings, not errors: the analytic region is a design guide and
    the map can lock outside it (and misbehave inside it).
    """
    out = []
    for cell in grid.cells:
        if cell.verdict is Verdict.LOCKED:
            gains = normalized_gains(cell_parameters(grid.spec.plane, cell.x, cell.y))
            if not allowed_area(gains).inside:
                out.append(cell)
    return out


@dataclass(frozen=True)
class ComparisonRow:
    k: int
    tau_corrected: float | None = None
    v_corrected: float | None = None
    tau_oracle: float | None = None
    v_oracle: float | None = None
    tau_original: float | None = None
    v_original: float | None = None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    corrected: Trajectory | None = None
    oracle: SimulationResult | None = None

    def max_abs_dtau(self) -> float:
        return max((abs(r.tau_corrected - r.tau_oracle) for r in self.rows
                    if r.tau_corrected is not None and r.tau_oracle is not None),
                   default=0.0)

    def max_abs_dv(self) -> float:
        return max((abs(r.v_corrected - r.v_oracle) for r in self.rows
                    if r.v_corrected is not None and r.v_oracle is not None),
                   default=0.0)


COMPARISON_HEADER = "k,tau_corrected,v_corrected,tau_oracle,v_oracle,tau_original,v_original,flags"


def compare_models(p: LoopParameters, st0: PllState, steps: int,
                   models: tuple[str, ...] = ("corrected", "oracle", "original")) -> ComparisonReport:
    """Per-step comparison of the exact map, the circuit simulation, and the
    original algorithm, over ``steps`` pulses from st0.

    The exact map's trajectory is the spine. Circuit pulses are aligned with
    the map's nonzero-tau states (an exactly zero pulse is invisible to the
    circuit's pulse record). The original algorithm is applied to each map
    state independently; its columns are filled only on steps where its
    implemented cases apply, otherwise the failure is flagged.
    """
    if steps == 0:
        return ComparisonReport(rows=())
    traj = run_trajectory(p, st0, steps) if "corrected" in models else None
    if traj is None:
        raise ValueError("comparison requires the corrected model")
    sim = simulate(p, st0, max_pulses=steps + 1) if "oracle" in models else None

    # map state index -> circuit pulse index (zero-tau states have no pulse)
    pulse_of: dict[int, int] = {}
    j = 0
    for idx, st in enumerate(traj.states):
        if st.tau != 0.0:
            pulse_of[idx] = j
            j += 1

    rows = []
    for k in range(1, len(traj.states)):
        st = traj.states[k]
        flags = [f"branch{traj.branches[k - 1]}"]
        tau_o = v_o = None
        if sim is not None:
            jp = pulse_of.get(k)
            if jp is None:
                flags.append("zero-width")
            elif jp < len(sim.train.pulses):
                pulse = sim.train.pulses[jp]
                tau_o, v_o = pulse.width, pulse.v_end
            else:
                flags.append("oracle_terminated")
        tau_p = v_p = None
        if "original" in models:
            prev = traj.states[k - 1]
            res = original_step(p, prev, HistorySeed.STRICT) if p.omega_free == 0.0 else None
            if res is None:
                flags.append("original:not_applicable")
            elif res.ok:
                tau_p, v_p = res.state.tau, res.state.v
            else:
                tag = res.failure.kind.value
                if res.failure.case is not None:
                    tag += f"_case{res.failure.case}"
                flags.append(f"original:{tag}")
        if k == len(traj.states) - 1 and traj.termination is not Termination.COMPLETED:
            flags.append(traj.termination.value)
        rows.append(ComparisonRow(k=k, tau_corrected=st.tau, v_corrected=st.v,
                                  tau_oracle=tau_o, v_oracle=v_o,
                                  tau_original=tau_p, v_original=v_p,
                                  flags=tuple(flags)))
    if sim is not None and sim.termination is SimTermination.OVERLOADED and rows:
        rows[-1] = dataclasses.replace(rows[-1], flags=rows[-1].flags + ("oracle_overloaded",))
    return ComparisonReport(rows=tuple(rows), corrected=traj, oracle=sim)


def comparison_to_csv(report: ComparisonReport) -> str:
    def fmt(x: float | None) -> str:
        return "" if x is None else repr(x)

    lines = [COMPARISON_HEADER]
    for r in report.rows:
        lines.append(",".join([str(r.k), fmt(r.tau_corrected), fmt(r.v_corrected),
                               fmt(r.tau_oracle), fmt(r.v_oracle),
                               fmt(r.tau_original), fmt(r.v_original),
                               ";".join(r.flags)]))
    return "\n".join(lines) + "\n"
