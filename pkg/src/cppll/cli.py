"""Command-line front end.

Subcommands: check (normalized gains and design-region verdict), simulate
(trajectory of any model to CSV/JSON), compare (cross-model CSV report), and
sweep (parameter-plane verdict grid). Configuration is a flat JSON document
whose keys are exactly the run-configuration fields; unknown keys are
rejected so runs stay reproducible.

Exit codes: 0 success (check: inside the design region); 1 check: outside;
2 simulation stopped on overload or a frequency fault; 3 the original
algorithm failed (the failure kind is printed); 64 malformed configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import analysis, circuit
from .core import LoopParameters, PllState, allowed_area, normalized_gains
from .corrected_map import StepKind, Termination, run_trajectory
from .paemel import HistorySeed, original_step
from .reduced_map import reduced_step, to_reduced

EXIT_OK = 0
EXIT_OUTSIDE = 1
EXIT_STOPPED = 2
EXIT_ORIGINAL_FAILURE = 3
EXIT_CONFIG = 64

MODELS = ("corrected", "original", "reduced", "oracle")
CONFIG_KEYS = {"r2", "c", "kv", "ip", "t", "omega_free", "tau0", "v0",
               "model", "steps", "out", "format"}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: LoopParameters
    tau0: float | None
    v0: float | None
    model: str | None
    steps: int | None
    out: str | None
    format: str

    def initial(self) -> PllState:
        if self.tau0 is None or self.v0 is None:
            raise ConfigError("tau0 and v0 are required for this command")
        return PllState(tau=self.tau0, v=self.v0, k=0)


def _number(cfg: dict, key: str, required: bool = True) -> float | None:
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required field {key!r}")
        return None
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r} must be a number, got {value!r}")
    return float(value)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    try:
        params = LoopParameters(
            r2=_number(cfg, "r2"), c=_number(cfg, "c"), kv=_number(cfg, "kv"),
            ip=_number(cfg, "ip"), t_ref=_number(cfg, "t"),
            omega_free=_number(cfg, "omega_free", required=False) or 0.0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    model = cfg.get("model")
    if model is not None and model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    steps = cfg.get("steps")
    if steps is not None and (isinstance(steps, bool) or not isinstance(steps, int) or steps < 1):
        raise ConfigError(f"steps must be a positive integer, got {steps!r}")
    fmt = cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    out = cfg.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"out must be a path string, got {out!r}")
    return RunConfig(params=params, tau0=_number(cfg, "tau0", required=False),
                     v0=_number(cfg, "v0", required=False), model=model,
                     steps=steps, out=out, format=fmt)


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _rows_csv(header: str, rows: list[tuple]) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _rows_json(model: str, termination: str, fields: tuple[str, ...],
               rows: list[tuple]) -> str:
    states = [dict(zip(fields, row)) for row in rows]
    return json.dumps({"model": model, "termination": termination, "states": states},
                      indent=2) + "\n"


def cmd_check(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    gains = normalized_gains(cfg.params)
    area = allowed_area(gains)
    print(f"K_N = {gains.k_n!r}")
    print(f"tau_2N = {gains.tau_2n!r}")
    print(f"F_N = {gains.f_n!r}")
    print(f"zeta = {gains.zeta!r}")
    print(f"curve_bound = {area.curve_bound!r}")
    print(f"hyperbola_bound = {area.hyperbola_bound!r}")
    print("inside" if area.inside else "outside")
    return EXIT_OK if area.inside else EXIT_OUTSIDE


def _simulate_corrected(cfg: RunConfig, steps: int) -> tuple[list[tuple], str, int]:
    traj = run_trajectory(cfg.params, cfg.initial(), steps)
    rows = [(st.k, st.tau, st.v) for st in traj.states]
    code = EXIT_OK if traj.termination is Termination.COMPLETED else EXIT_STOPPED
    return rows, traj.termination.value, code


def _simulate_reduced(cfg: RunConfig, steps: int) -> tuple[list[tuple], str, int]:
    rp, rs = to_reduced(cfg.params, cfg.initial())
    rows = [(rs.k, rs.s, rs.w)]
    termination = "completed"
    code = EXIT_OK
    for _ in range(steps):
        out = reduced_step(rp, rs)
        if out.kind is StepKind.FREQUENCY_FAULT:
            termination, code = "frequency_fault", EXIT_STOPPED
            break
        rs = out.state
        rows.append((rs.k, rs.s, rs.w))
        if out.kind is StepKind.OVERLOADED:
            termination, code = "overloaded", EXIT_STOPPED
            break
    return rows, termination, code


def _simulate_original(cfg: RunConfig, steps: int) -> tuple[list[tuple], str, int]:
    st = cfg.initial()
    rows = [(st.k, st.tau, st.v)]
    for _ in range(steps):
        res = original_step(cfg.params, st, HistorySeed.STRICT)
        if not res.ok:
            failure = res.failure
            msg = failure.kind.value
            if failure.case is not None:
                msg += f" case {failure.case}"
            if failure.value is not None:
                msg += f", {failure.value!r}"
            if failure.detail is not None:
                msg += f" ({failure.detail})"
            print(msg, file=sys.stderr)
            return rows, failure.kind.value, EXIT_ORIGINAL_FAILURE
        st = res.state
        rows.append((st.k, st.tau, st.v))
    return rows, "completed", EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    model = args.model or cfg.model
    if model is None:
        raise ConfigError("no model given (config field 'model' or --model)")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    steps = args.steps or cfg.steps
    if steps is None:
        raise ConfigError("no step count given (config field 'steps' or --steps)")
    out = args.out or cfg.out
    fmt = args.format or cfg.format

    if model == "oracle":
        sim = circuit.simulate(cfg.params, cfg.initial(), max_pulses=steps,
                               record_events=args.waveform is not None)
        rows = [(k, q.width, q.v_end) for k, q in enumerate(sim.train.pulses)]
        termination = sim.termination.value
        code = EXIT_OK if sim.termination is circuit.SimTermination.COMPLETED else EXIT_STOPPED
        if args.waveform is not None:
            lines = ["time,pfd_state,v_cap,v_F,theta_vco"]
            for ev in sim.events:
                lines.append(f"{ev.time!r},{ev.pfd.value},{ev.v_cap!r},{ev.v_f!r},{ev.theta_vco!r}")
            _write(args.waveform, "\n".join(lines) + "\n")
        fields = ("k", "tau", "v")
        header = "k,tau,v"
    elif model == "reduced":
        rows, termination, code = _simulate_reduced(cfg, steps)
        fields = ("k", "s", "w")
        header = "k,s,w"
    elif model == "original":
        rows, termination, code = _simulate_original(cfg, steps)
        fields = ("k", "tau", "v")
        header = "k,tau,v"
    else:
        rows, termination, code = _simulate_corrected(cfg, steps)
        fields = ("k", "tau", "v")
        header = "k,tau,v"

    if fmt == "json":
        _write(out, _rows_json(model, termination, fields, rows))
    else:
        _write(out, _rows_csv(header, rows))
    if code == EXIT_STOPPED:
        print(f"terminated: {termination}", file=sys.stderr)
    return code


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    steps = args.steps or cfg.steps
    if steps is None:
        raise ConfigError("no step count given (config field 'steps' or --steps)")
    models = tuple(m.strip() for m in args.models.split(","))
    for m in models:
        if m not in ("corrected", "oracle", "original"):
            raise ConfigError(f"compare supports corrected, oracle, original; got {m!r}")
    if "corrected" not in models:
        raise ConfigError("compare requires the corrected model in --models")
    report = analysis.compare_models(cfg.params, cfg.initial(), steps, models=models)
    out = args.out or cfg.out
    fmt = args.format or cfg.format
    if fmt == "json":
        rows = [{"k": r.k, "tau_corrected": r.tau_corrected, "v_corrected": r.v_corrected,
                 "tau_oracle": r.tau_oracle, "v_oracle": r.v_oracle,
                 "tau_original": r.tau_original, "v_original": r.v_original,
                 "flags": list(r.flags)} for r in report.rows]
        _write(out, json.dumps({"rows": rows}, indent=2) + "\n")
    else:
        _write(out, analysis.comparison_to_csv(report))
    return EXIT_OK


def _axis(text: str, name: str) -> analysis.AxisSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"--{name} must be MIN:MAX:COUNT[:log|lin], got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc
    log = False
    if len(parts) == 4:
        if parts[3] not in ("log", "lin"):
            raise ConfigError(f"--{name} scale must be log or lin, got {parts[3]!r}")
        log = parts[3] == "log"
    try:
        return analysis.AxisSpec(lo=lo, hi=hi, count=count, log=log)
    except ValueError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc


def _sweep_workers() -> int:
    raw = os.environ.get("CPPLL_THREADS")
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigError(f"CPPLL_THREADS must be an integer, got {raw!r}") from exc
    return max(1, workers)


def cmd_sweep(args: argparse.Namespace) -> int:
    have_fn = args.fn is not None and args.zeta is not None
    have_ab = args.alpha is not None and args.beta is not None
    if have_fn == have_ab:
        raise ConfigError("give exactly one axis pair: --fn with --zeta, or --alpha with --beta")
    if have_fn:
        plane = analysis.Plane.FN_ZETA
        axis1, axis2 = _axis(args.fn, "fn"), _axis(args.zeta, "zeta")
    else:
        plane = analysis.Plane.ALPHA_BETA
        axis1, axis2 = _axis(args.alpha, "alpha"), _axis(args.beta, "beta")
    try:
        spec = analysis.SweepSpec(plane=plane, axis1=axis1, axis2=axis2,
                                  steps=args.steps, eps_lock=args.eps_lock,
                                  s0=args.s0, w0=args.w0)
        grid = analysis.sweep(spec, max_workers=_sweep_workers())
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _write(args.out, analysis.grid_to_csv(grid))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cppll",
                                     description="Charge-pump PLL simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp: argparse.ArgumentParser, config: bool = True) -> None:
        if config:
            sp.add_argument("--config", required=True, help="flat JSON run configuration")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)

    sp = sub.add_parser("check", help="normalized gains and design-region verdict")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("simulate", help="run one model, write its trajectory")
    add_common(sp)
    sp.add_argument("--model", choices=MODELS, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--waveform", default=None,
                    help="oracle only: also write the time-stamped event list CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="cross-model comparison report")
    add_common(sp)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--models", default="corrected,oracle,original")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep", help="parameter-plane verdict grid")
    sp.add_argument("--fn", default=None, help="f_n axis, MIN:MAX:COUNT[:log|lin]")
    sp.add_argument("--zeta", default=None, help="zeta axis, MIN:MAX:COUNT[:log|lin]")
    sp.add_argument("--alpha", default=None, help="alpha axis, MIN:MAX:COUNT[:log|lin]")
    sp.add_argument("--beta", default=None, help="beta axis, MIN:MAX:COUNT[:log|lin]")
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--eps-lock", type=float, default=1e-6)
    sp.add_argument("--s0", type=float, default=0.0)
    sp.add_argument("--w0", type=float, default=0.1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
