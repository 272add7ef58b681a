"""Command-line front end.

Subcommands: ``solve`` (one breaching record), ``barrier`` (curve or level
dataset), ``classify`` (point label or polar raster), ``simulate`` (one game
trace plus summary), ``nash-check`` (saddle-ordering report), and ``sweep``
(parallel barrier datasets over parameter lists).

Conventions: angles are radians, either plain numbers or ``pi`` multiples
like ``0.3pi``; a ``--degrees`` flag converts plain numeric angles at the
boundary.  Single records print as JSON, datasets as CSV with LF endings,
both with 9-significant-digit floats; ``--format`` flips either.  Files are
written to a temporary name and renamed, so a crashed run never publishes a
partial file.  Exit status: 0 success (timeouts included), 1 usage error,
2 domain or solver error with a machine-readable code on stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence
from urllib.parse import quote

from .barrier import DEFAULT_BAND, RegionLabel, barrier_curve, classify, level_set
from .breach_solver import optimal_payoff, solve
from .dynamics import (
    Strategy,
    fixed_defender,
    fixed_intruder,
    optimal_defender,
    optimal_intruder,
    random_defender,
    random_intruder,
    stationary_defender,
    stationary_intruder,
)
from .errors import GameError
from .geometry import GameParams, GameState
from .simulation import DEFAULT_DT, ScenarioSpec, nash_check, run

USAGE_EXIT = 1
DOMAIN_EXIT = 2
JOBS_ENV = "HEMIGUARD_JOBS"


class UsageError(Exception):
    """Invalid flag values detected after parsing."""


@dataclass(frozen=True)
class RunConfig:
    """One validated invocation: the subcommand plus its flag values."""

    command: str
    options: dict[str, Any]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        options = {key: value for key, value in vars(args).items()
                   if key not in ("command", "func")}
        return cls(command=args.command, options=options)

    def __getattr__(self, name: str) -> Any:
        try:
            return self.options[name]
        except KeyError as exc:
            raise AttributeError(name) from exc


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _round9(value: float) -> float:
    return float(f"{value:.9g}")


def _angle(token: str, degrees: bool = False) -> float:
    """Angle token to radians: plain number or a ``pi`` multiple.

    ``pi``-suffixed tokens are always radian multiples; ``--degrees`` only
    converts plain numeric values.
    """
    text = token.strip().lower()
    if text.endswith("pi"):
        coefficient = text[:-2]
        if coefficient in ("", "+"):
            factor = 1.0
        elif coefficient == "-":
            factor = -1.0
        else:
            factor = float(coefficient)
        return factor * math.pi
    value = float(text)
    return math.radians(value) if degrees else value


def _parse_angle(token: str, degrees: bool) -> float:
    try:
        return _angle(token, degrees)
    except ValueError:
        raise UsageError(f"bad angle token {token!r}") from None


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hemiguard-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(value) for value in row])
    return buffer.getvalue()


def _label_for(p_star: float, band: float) -> RegionLabel:
    if p_star > band:
        return RegionLabel.INTRUDER_WINNING
    if p_star < -band:
        return RegionLabel.DEFENDER_WINNING
    return RegionLabel.ON_BARRIER


def _state_and_params(config: RunConfig) -> tuple[GameState, GameParams]:
    degrees = config.degrees
    state = GameState(psi=_parse_angle(config.psi, degrees),
                      phi_d=_parse_angle(config.phi_d, degrees),
                      r=config.r)
    return state, GameParams(nu=config.nu)


def cmd_solve(config: RunConfig) -> int:
    state, params = _state_and_params(config)
    solution = solve(state, params)
    label = classify(state, params)
    record = {
        "theta_star": _round9(solution.theta_star),
        "beta_star": _round9(solution.beta_star),
        "tau_d": _round9(solution.tau_d),
        "tau_a": _round9(solution.tau_a),
        "p_star": _round9(solution.p_star),
        "region": label.value,
    }
    if config.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(record.keys())
        writer.writerow([value if isinstance(value, str) else _fmt(value)
                         for value in record.values()])
        sys.stdout.write(buffer.getvalue())
    else:
        print(json.dumps(record))
    return 0


# dataset job: (phi_d, nu, level-or-None, samples, format, path-or-None)
_DatasetJob = tuple[float, float, float | None, int, str, str | None]


def _dataset_text(phi_d: float, nu: float, level: float | None,
                  samples: int, fmt: str) -> str:
    if level is None:
        curve = barrier_curve(phi_d, nu, samples)
    else:
        curve = level_set(phi_d, nu, level, samples)
    if fmt == "json":
        record = {
            "phi_d": _round9(phi_d),
            "nu": _round9(nu),
            "level": None if level is None else _round9(level),
            "samples": [
                {"theta": _round9(s.theta), "beta": _round9(s.beta),
                 "x": _round9(s.x), "r": _round9(s.r), "psi": _round9(s.psi)}
                for s in curve.samples
            ],
        }
        return json.dumps(record) + "\n"
    rows = [(s.theta, s.beta, s.x, s.r, s.psi) for s in curve.samples]
    return _csv_text(("theta", "beta", "x", "r", "psi"), rows)


def _render_dataset(job: _DatasetJob) -> None:
    phi_d, nu, level, samples, fmt, path = job
    text = _dataset_text(phi_d, nu, level, samples, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        _write_text(path, text)


def _dataset_name(phi_tok: str, nu_tok: str, level_tok: str | None,
                  fmt: str) -> str:
    name = f"phiD={phi_tok},nu={nu_tok}"
    if level_tok is not None:
        name += f",k={level_tok}"
    suffix = ".json" if fmt == "json" else ".csv"
    return quote(name, safe="=.,-+") + suffix


def _resolve_jobs(flag: int | None) -> int:
    if flag is not None:
        return max(flag, 1)
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return 1


def _emit_datasets(jobs: list[_DatasetJob], workers: int) -> None:
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            _render_dataset(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(_render_dataset, jobs):
            pass


def _dataset_jobs(config: RunConfig, require_dir: bool) -> list[_DatasetJob]:
    degrees = config.degrees
    phi_toks = [tok.strip() for tok in config.phi_d.split(",")]
    nu_toks = [tok.strip() for tok in str(config.nu).split(",")]
    level_toks: list[str | None]
    if config.level is None:
        level_toks = [None]
    else:
        level_toks = [tok.strip() for tok in config.level.split(",")]
    samples = config.samples
    fmt = config.format
    out = config.out

    combos = [(p, n, k) for p in phi_toks for n in nu_toks for k in level_toks]
    multi = len(combos) > 1
    if (multi or require_dir) and out is None:
        raise UsageError("--out DIRECTORY is required for multiple datasets")

    jobs: list[_DatasetJob] = []
    for phi_tok, nu_tok, level_tok in combos:
        phi_d = _parse_angle(phi_tok, degrees)
        try:
            nu = float(nu_tok)
            level = None if level_tok is None else float(level_tok)
        except ValueError:
            raise UsageError(
                f"bad numeric token in {nu_tok!r} / {level_tok!r}") from None
        if out is None:
            path = None
        elif multi or require_dir:
            os.makedirs(out, exist_ok=True)
            path = os.path.join(out, _dataset_name(phi_tok, nu_tok, level_tok, fmt))
        else:
            path = out
        jobs.append((phi_d, nu, level, samples, fmt, path))
    return jobs


def cmd_barrier(config: RunConfig) -> int:
    jobs = _dataset_jobs(config, require_dir=False)
    _emit_datasets(jobs, _resolve_jobs(config.jobs))
    return 0


def cmd_sweep(config: RunConfig) -> int:
    jobs = _dataset_jobs(config, require_dir=True)
    _emit_datasets(jobs, _resolve_jobs(config.jobs))
    print(f"wrote {len(jobs)} datasets to {config.out}")
    return 0


def cmd_classify(config: RunConfig) -> int:
    degrees = config.degrees
    params = GameParams(nu=config.nu)
    phi_d = _parse_angle(config.phi_d, degrees)
    band = config.band

    point_mode = config.psi is not None and config.r is not None
    grid_mode = config.grid is not None and config.r_max is not None
    if point_mode == grid_mode:
        raise UsageError("pass either --psi and --r, or --grid and --r-max")

    if point_mode:
        state = GameState(psi=_parse_angle(config.psi, degrees),
                          phi_d=phi_d, r=config.r)
        label = classify(state, params, band)
        p_star = optimal_payoff(state, params)[3]
        record = {"p_star": _round9(p_star), "label": label.value}
        if config.format == "csv":
            print("p_star,label\n" + _fmt(p_star) + "," + label.value)
        else:
            print(json.dumps(record))
        return 0

    n = config.grid
    r_max = config.r_max
    if n < 2:
        raise UsageError("--grid must be at least 2")
    if r_max <= 1.0:
        raise UsageError("--r-max must exceed 1")
    rows = []
    for i in range(n):
        psi = -math.pi + 2.0 * math.pi * i / (n - 1)
        for j in range(n):
            r = 1.0 + (r_max - 1.0) * j / (n - 1)
            p_star = optimal_payoff(GameState(psi, phi_d, r), params)[3]
            rows.append((psi, r, p_star, _label_for(p_star, band).value))
    if config.format == "json":
        text = json.dumps([{"psi": _round9(p), "r": _round9(r),
                            "p_star": _round9(v), "label": lab}
                           for p, r, v, lab in rows]) + "\n"
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("psi", "r", "p_star", "label"))
        for psi, r, p_star, lab in rows:
            writer.writerow((_fmt(psi), _fmt(r), _fmt(p_star), lab))
        text = buffer.getvalue()
    if config.out is None:
        sys.stdout.write(text)
    else:
        _write_text(config.out, text)
    return 0


def _strategy(side: str, token: str, degrees: bool, seed: int) -> Strategy:
    head, _, rest = token.partition(":")
    if head == "optimal":
        return optimal_defender() if side == "defender" else optimal_intruder()
    if head == "stationary":
        return stationary_defender() if side == "defender" else stationary_intruder()
    if head == "random":
        try:
            chosen = int(rest) if rest else seed
        except ValueError:
            raise UsageError(f"bad random seed in {token!r}") from None
        return (random_defender(chosen) if side == "defender"
                else random_intruder(chosen))
    if head == "fixed":
        if not rest:
            raise UsageError(f"fixed strategy needs a value: {token!r}")
        parts = rest.split(",")
        try:
            if side == "defender":
                omega = float(parts[0])
                sign = float(parts[1]) if len(parts) > 1 else 1.0
                return fixed_defender(omega, sign)
            gamma = _angle(parts[0], degrees)
            fraction = float(parts[1]) if len(parts) > 1 else 1.0
            return fixed_intruder(gamma, fraction)
        except ValueError:
            raise UsageError(f"bad fixed strategy token {token!r}") from None
    raise UsageError(f"unknown {side} strategy {token!r}")


_SCENARIOS = {
    "both-optimal": ("optimal", "optimal"),
    "defender-optimal": ("optimal", "fixed:0.3"),
    "intruder-optimal": ("stationary", "optimal"),
}


def cmd_simulate(config: RunConfig) -> int:
    state, params = _state_and_params(config)
    default_d, default_i = _SCENARIOS.get(config.scenario, ("optimal", "optimal"))
    d_token = config.defender or default_d
    i_token = config.intruder or default_i
    spec = ScenarioSpec(
        initial_state=state,
        params=params,
        defender_strategy=_strategy("defender", d_token, config.degrees, config.seed),
        intruder_strategy=_strategy("intruder", i_token, config.degrees, config.seed),
        dt=config.dt,
        timeout=config.timeout,
        seed=config.seed,
    )
    trajectory = run(spec)
    summary = {
        "outcome": trajectory.terminal.kind.value,
        "t_f": _round9(trajectory.terminal.t_f),
        "p_initial": _round9(trajectory.payoff_trace[0]),
        "p_terminal": _round9(trajectory.payoff_trace[-1]),
    }
    if config.out is not None:
        rows = [
            (t, d.psi_d, d.phi_d, a.psi_a, a.r, dc.omega_d, ic.gamma_a,
             tau_d, tau_a, p)
            for t, d, a, (dc, ic), tau_d, tau_a, p in zip(
                trajectory.times, trajectory.defender_states,
                trajectory.intruder_states, trajectory.controls,
                trajectory.tau_d_trace, trajectory.tau_a_trace,
                trajectory.payoff_trace)
        ]
        _write_text(config.out + ".csv", _csv_text(
            ("t", "psi_d", "phi_d", "psi_a", "r",
             "omega_d", "gamma_a", "tau_d", "tau_a", "p"), rows))
        _write_text(config.out + ".json", json.dumps(summary) + "\n")
    print(json.dumps(summary))
    return 0


def cmd_nash_check(config: RunConfig) -> int:
    state, params = _state_and_params(config)
    count = config.alt_count
    if count < 1:
        raise UsageError("--alt-count must be at least 1")
    seed = config.seed
    alt_intruders = [random_intruder(seed + 100 + i) for i in range(count)]
    alt_defenders = [random_defender(seed + 200 + i) for i in range(count)]
    report = nash_check(state, params, alt_defenders, alt_intruders,
                        dt=config.dt, timeout=config.timeout,
                        seed=seed, slack=config.slack)
    record = {
        "center_payoff": _round9(report.center_payoff),
        "alt_intruder_max": _round9(report.alt_intruder_max),
        "alt_defender_min": _round9(report.alt_defender_min),
        "slack": _round9(report.slack),
        "ordering_holds": report.ordering_holds,
        "runs": [
            {"role": row.role, "defender": row.defender,
             "intruder": row.intruder, "outcome": row.outcome.value,
             "t_f": _round9(row.t_f),
             "terminal_payoff": _round9(row.terminal_payoff)}
            for row in report.runs
        ],
    }
    text = json.dumps(record)
    if config.out is not None:
        _write_text(config.out, text + "\n")
    print(text)
    return 0


class _Parser(argparse.ArgumentParser):
    # argparse defaults to status 2 for usage errors; the contract here is 1
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--psi", required=True,
                        help="relative azimuth (radians or 'pi' token)")
    parser.add_argument("--phi-d", required=True,
                        help="defender elevation (radians or 'pi' token)")
    parser.add_argument("--r", type=float, required=True,
                        help="intruder radius, >= 1")
    parser.add_argument("--nu", type=float, required=True,
                        help="intruder speed ratio in (0, 1]")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--degrees", action="store_true",
                        help="interpret plain numeric angles as degrees")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hemiguard",
                     description="Hemisphere perimeter-defense game toolkit.")
    subparsers = parser.add_subparsers(dest="command", required=True,
                                       parser_class=_Parser)

    sp = subparsers.add_parser("solve", help="optimal breaching record")
    _add_state_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_solve)

    for name, handler, help_text in (
        ("barrier", cmd_barrier, "barrier or level-set dataset"),
        ("sweep", cmd_sweep, "barrier datasets over parameter lists"),
    ):
        sp = subparsers.add_parser(name, help=help_text)
        sp.add_argument("--phi-d", required=True,
                        help="defender elevation, comma list allowed")
        sp.add_argument("--nu", required=True,
                        help="speed ratio, comma list allowed")
        sp.add_argument("--samples", type=int, default=256)
        sp.add_argument("--level", default=None,
                        help="payoff offset k, comma list allowed")
        sp.add_argument("--out", default=None,
                        help="output file (single) or directory (lists)")
        sp.add_argument("--jobs", type=int, default=None,
                        help=f"parallel workers (default {JOBS_ENV} or 1)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        _add_common_flags(sp)
        sp.set_defaults(func=handler)

    sp = subparsers.add_parser("classify", help="winning-region label")
    sp.add_argument("--psi", default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--phi-d", required=True)
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--grid", type=int, default=None,
                    help="raster mode: points per axis")
    sp.add_argument("--r-max", type=float, default=None,
                    help="raster mode: outer radius")
    sp.add_argument("--band", type=float, default=DEFAULT_BAND)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("json", "csv"), default=None)
    _add_common_flags(sp)
    sp.set_defaults(func=cmd_classify)

    sp = subparsers.add_parser("simulate", help="integrate one game")
    _add_state_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--scenario",
                    choices=tuple(_SCENARIOS), default=None)
    sp.add_argument("--defender", default=None,
                    help="optimal | stationary | fixed:W[,S] | random[:SEED]")
    sp.add_argument("--intruder", default=None,
                    help="optimal | stationary | fixed:G[,F] | random[:SEED]")
    sp.add_argument("--dt", type=float, default=DEFAULT_DT)
    sp.add_argument("--timeout", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None,
                    help="write OUT.csv trace and OUT.json summary")
    sp.set_defaults(func=cmd_simulate)

    sp = subparsers.add_parser("nash-check", help="saddle-ordering report")
    _add_state_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--alt-count", type=int, default=20)
    sp.add_argument("--dt", type=float, default=DEFAULT_DT)
    sp.add_argument("--timeout", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--slack", type=float, default=1e-3)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_nash_check)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = RunConfig.from_args(args)
    try:
        return args.func(config)
    except UsageError as exc:
        print(f"hemiguard: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ValueError as exc:
        # domain-invariant violations from the library types
        print(f"hemiguard: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except GameError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}))
        return DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
