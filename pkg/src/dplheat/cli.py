"""Command line interface.

Four subcommands cover the workflows: ``solve`` writes temperature snapshots,
``convergence`` runs refinement ladders, ``compare`` checks the absorbing
boundary against a long-domain Dirichlet reference, and ``audit`` evaluates
the discrete energy bound along a run.

Configuration is a single JSON object (``--config file.json``) whose keys
match the long flag names; flags override file values.  CSV cells are written
with shortest round-trip float representation so reruns are byte-identical.
Exit codes: 0 success, 1 invalid configuration or problem data, 2 numerical
failure (non-finite values, singular system, or a failed audit).
"""

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from ._backend import backend_name
from .errors import NumericalError, ValidationError
from .grid import Grid
from .pade import PadeAbc, default_z0
from .problems import builtin_problem, homogenize, recover
from .stepping import AbcStepCoefficients, DirichletStepCoefficients, run
from .verification import (
    convergence_study,
    domain_truncation_compare,
    solve_trajectory,
    random_smooth_instance,
    stability_audit,
)

_PROBLEM_OVERRIDES = ("a", "b", "K", "x_r", "D")


@dataclass
class RunConfig:
    """Resolved configuration shared by all subcommands."""

    command: str
    problem: str = "example1"
    mode: str = "abc"
    h: Optional[float] = None
    dt: Optional[float] = None
    N: Optional[int] = None
    z0: Optional[object] = None          # float or "auto"
    times: Optional[List[float]] = None
    ladder: str = "ht"
    levels: int = 5
    coarsest: float = 1.0 / 8.0
    param_sets: Optional[List[List[float]]] = None
    abc_x_r: float = 1.0
    dir_x_r: float = 20.0
    saturation_x_r: Optional[float] = None
    random_instances: int = 0
    out: str = "."
    strict: bool = False
    seed: int = 0
    # problem-factory overrides
    a: Optional[float] = None
    b: Optional[float] = None
    K: Optional[float] = None
    x_r: Optional[float] = None
    D: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("abc", "dirichlet"):
            raise ValidationError(f"mode must be 'abc' or 'dirichlet', got {self.mode!r}")
        if self.mode == "dirichlet" and (self.N is not None or self.z0 is not None):
            raise ValidationError("mode 'dirichlet' does not take N or z0")
        if self.ladder not in ("ht", "t", "s"):
            raise ValidationError(f"ladder must be 'ht', 't', or 's', got {self.ladder!r}")
        if self.levels < 1:
            raise ValidationError(f"levels must be >= 1, got {self.levels}")

    @classmethod
    def from_sources(cls, command: str, config_path: Optional[str], flag_values: dict) -> "RunConfig":
        merged = {}
        if config_path is not None:
            try:
                with open(config_path) as fh:
                    data = json.load(fh)
            except OSError as exc:
                raise ValidationError(f"cannot read config {config_path!r}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config {config_path!r} is not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ValidationError("config file must hold a JSON object")
            known = {f.name for f in fields(cls)} - {"command"}
            for key, value in data.items():
                if key not in known:
                    raise ValidationError(f"unknown config key {key!r}")
                merged[key] = value
        for key, value in flag_values.items():
            if value is not None:
                merged[key] = value
        try:
            return cls(command=command, **merged)
        except TypeError as exc:
            raise ValidationError(str(exc)) from exc

    # --- resolution helpers -------------------------------------------------

    def overrides(self) -> dict:
        return {k: getattr(self, k) for k in _PROBLEM_OVERRIDES if getattr(self, k) is not None}

    def resolved_N(self) -> int:
        return 5 if self.N is None else int(self.N)

    def resolved_z0(self, problem) -> float:
        if self.z0 in (None, "auto"):
            return default_z0(problem.a, problem.b)
        z0 = float(self.z0)
        if z0 <= 0:
            raise ValidationError(f"z0 must be positive, got {z0}")
        return z0

    def grid_for(self, problem) -> Grid:
        if self.h is None or self.dt is None:
            raise ValidationError(f"command {self.command!r} needs both h and dt")
        return Grid.from_steps(problem.x_r, problem.D, float(self.h), float(self.dt))


def _fmt(value) -> str:
    """Shortest round-trip decimal form; CSV cells must not depend on numpy repr."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])


_META_FIELDS = {
    "solve": ("problem", "mode", "h", "dt", "N", "z0", "times"),
    "convergence": ("problem", "mode", "N", "z0", "ladder", "levels", "coarsest",
                    "param_sets"),
    "compare": ("problem", "mode", "h", "dt", "N", "z0", "times", "abc_x_r",
                "dir_x_r", "saturation_x_r"),
    "audit": ("problem", "mode", "h", "dt", "N", "z0", "random_instances"),
}


def _write_meta(out_dir: Path, cfg: RunConfig, started: float, extra: dict):
    keep = _META_FIELDS[cfg.command] + _PROBLEM_OVERRIDES + ("command", "out",
                                                             "strict", "seed")
    meta = {k: v for k, v in asdict(cfg).items() if k in keep and v is not None}
    meta.update(extra)
    meta["backend"] = backend_name()
    meta["wall_time_s"] = round(time.perf_counter() - started, 6)
    with open(out_dir / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _time_tag(t: float) -> str:
    return f"{t:g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(cfg: RunConfig) -> int:
    started = time.perf_counter()
    out = _out_dir(cfg)
    p = builtin_problem(cfg.problem, **cfg.overrides())
    grid = cfg.grid_for(p)
    times = [float(t) for t in (cfg.times if cfg.times is not None else [p.D])]
    if cfg.mode == "abc":
        pade = PadeAbc.make(cfg.resolved_N(), cfg.resolved_z0(p))
        hp = homogenize(p, pade, strict=cfg.strict)
        coeffs = AbcStepCoefficients.build(hp, grid, pade)
    else:
        pade = None
        hp = homogenize(p, None, strict=cfg.strict)
        coeffs = DirichletStepCoefficients.build(hp, grid)
    _, snapshots = run(hp, grid, pade, mode=cfg.mode, snapshot_times=times, coeffs=coeffs)

    x = grid.x_nodes()
    rows = []
    for t in sorted(snapshots):
        T_red = snapshots[t]
        T_phys = recover(T_red, p.phi, t)
        for i in range(grid.M_s + 1):
            rows.append((t, x[i], T_red[i], T_phys[i]))
    _write_csv(out / "solution.csv", ("t", "x", "T_reduced", "T_physical"), rows)
    extra = {
        "computed_z0": None if pade is None else pade.z0,
        "computed_N": None if pade is None else pade.N,
        "M_s": grid.M_s, "M_t": grid.M_t,
        "fallback_count": coeffs.fallback_count,
        "snapshot_times": sorted(snapshots),
    }
    _write_meta(out, cfg, started, {k: v for k, v in extra.items() if v is not None})
    print(f"wrote {out / 'solution.csv'} ({len(rows)} rows)")
    return 0


def cmd_convergence(cfg: RunConfig) -> int:
    started = time.perf_counter()
    out = _out_dir(cfg)
    sets = cfg.param_sets
    reports = {}
    if sets is None:
        jobs = [(None, cfg.overrides())]
    else:
        jobs = []
        for pair in sets:
            if len(pair) != 2:
                raise ValidationError(f"param_sets entries must be [a, b] pairs, got {pair!r}")
            ov = dict(cfg.overrides())
            ov["a"], ov["b"] = float(pair[0]), float(pair[1])
            jobs.append(((ov["a"], ov["b"]), ov))
    for tag, overrides in jobs:
        p = builtin_problem(cfg.problem, **overrides)
        report = convergence_study(
            p, mode=cfg.ladder, levels=cfg.levels, coarsest=cfg.coarsest,
            N=cfg.resolved_N(), z0=cfg.resolved_z0(p),
        )
        name = "convergence.csv" if tag is None else f"convergence_a{tag[0]:g}_b{tag[1]:g}.csv"
        refined = {"ht": 1, "t": 1, "s": 0}[cfg.ladder]  # index into (h, dt)
        rows = []
        for (steps, err, rate) in zip(report.steps, report.errors, report.rates):
            rows.append((steps[refined], err, "" if rate is None else _fmt(rate)))
        _write_csv(out / name, ("step", "E", "rate"), rows)
        reports[name] = report
        print(f"wrote {out / name}: errors "
              + " ".join(f"{e:.3e}" for e in report.errors))
    p0 = builtin_problem(cfg.problem, **jobs[0][1])
    _write_meta(out, cfg, started, {
        "computed_z0": cfg.resolved_z0(p0),
        "computed_N": cfg.resolved_N(),
        "files": sorted(reports),
    })
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    started = time.perf_counter()
    out = _out_dir(cfg)
    if cfg.mode != "abc":
        raise ValidationError("compare needs mode 'abc' (it provides its own reference)")
    if cfg.h is None or cfg.dt is None:
        raise ValidationError("compare needs both h and dt")
    times = [float(t) for t in (cfg.times if cfg.times is not None else [14.0, 16.0, 18.0, 20.0])]
    p_for_z0 = builtin_problem(cfg.problem, x_r=cfg.abc_x_r, **cfg.overrides())
    comparison = domain_truncation_compare(
        float(cfg.h), float(cfg.dt), times, problem=cfg.problem,
        abc_x_r=cfg.abc_x_r, dir_x_r=cfg.dir_x_r,
        saturation_x_r=cfg.saturation_x_r,
        N=cfg.resolved_N(), z0=cfg.resolved_z0(p_for_z0), **cfg.overrides(),
    )
    for t in comparison.times:
        rows = list(zip(comparison.x, comparison.T_dir[t], comparison.T_abc[t]))
        _write_csv(out / f"compare_t{_time_tag(t)}.csv",
                   ("x", "T_dirichlet", "T_abc"), rows)
    _write_csv(out / "discrepancy.csv", ("t", "max_abs", "max_rel"),
               [(t, comparison.max_abs[t], comparison.max_rel[t]) for t in comparison.times])
    _write_meta(out, cfg, started, {
        "computed_z0": cfg.resolved_z0(p_for_z0),
        "computed_N": cfg.resolved_N(),
        "fallback_count": 0,
        "saturation_rel": {str(t): v for t, v in comparison.saturation_rel.items()} or None,
    })
    worst = max(comparison.max_rel.values())
    print(f"wrote {out / 'discrepancy.csv'}: worst relative discrepancy {worst:.4f}")
    return 0


def cmd_audit(cfg: RunConfig) -> int:
    started = time.perf_counter()
    out = _out_dir(cfg)
    if cfg.mode != "abc":
        raise ValidationError("audit applies to the absorbing-boundary scheme (mode 'abc')")
    p = builtin_problem(cfg.problem, **cfg.overrides())
    grid = cfg.grid_for(p)
    pade = PadeAbc.make(cfg.resolved_N(), cfg.resolved_z0(p))
    hp = homogenize(p, pade, strict=cfg.strict)
    trajectory = solve_trajectory(hp, grid, pade)
    audit = stability_audit(trajectory, hp, grid, pade)
    rows = [(m + 1, audit.lhs[m], audit.rhs[m], bool(audit.ok[m]))
            for m in range(len(audit.lhs))]
    _write_csv(out / "stability.csv", ("m", "lhs", "rhs", "pass"), rows)

    rng = np.random.default_rng(cfg.seed)
    random_failures = 0
    random_min_margin = None
    for j in range(cfg.random_instances):
        hp_r, grid_r, pade_r = random_smooth_instance(rng, (0.1, 1.0, 10.0)[j % 3])
        audit_r = stability_audit(solve_trajectory(hp_r, grid_r, pade_r), hp_r, grid_r, pade_r)
        if not audit_r.passed:
            random_failures += 1
        margin = audit_r.margin
        if random_min_margin is None or margin < random_min_margin:
            random_min_margin = margin

    _write_meta(out, cfg, started, {
        "computed_z0": pade.z0,
        "computed_N": pade.N,
        "fallback_count": 0,
        "passed": audit.passed,
        "margin": audit.margin if np.isfinite(audit.margin) else None,
        "random_failures": random_failures if cfg.random_instances else None,
        "random_min_margin": random_min_margin,
    })
    status = "passed" if audit.passed else "FAILED"
    print(f"wrote {out / 'stability.csv'}: bound {status}, margin {audit.margin:.3e}")
    if not audit.passed or random_failures:
        print("energy bound violated", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dplheat",
        description="Dual-phase-lag heat conduction on a truncated half line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "march the scheme and write temperature snapshots"),
        ("convergence", "run a refinement ladder against the exact solution"),
        ("compare", "absorbing boundary vs long-domain Dirichlet reference"),
        ("audit", "evaluate the discrete energy bound along a run"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON config file; flags override it")
        sp.add_argument("--out", help="output directory (default: current)")
        sp.add_argument("--strict", action="store_true", default=None,
                        help="turn data-validation warnings into errors")
        sp.add_argument("--problem", help="registry key, e.g. example1")
        sp.add_argument("--mode", choices=("abc", "dirichlet"),
                        help="boundary treatment at x_r")
        sp.add_argument("--h", type=float, help="spatial step")
        sp.add_argument("--dt", type=float, help="time step")
        sp.add_argument("--N", type=int, help="boundary approximant terms (abc only)")
        sp.add_argument("--z0", help="expansion point, number or 'auto' (abc only)")
        sp.add_argument("--seed", type=int, help="seed for randomized auditing")
        for override in _PROBLEM_OVERRIDES:
            sp.add_argument(f"--{override}", type=float,
                            help=f"override the problem's {override}")
        if name == "solve":
            sp.add_argument("--times", type=float, nargs="+", help="snapshot times")
        if name == "convergence":
            sp.add_argument("--ladder", choices=("ht", "t", "s"),
                            help="refinement coupling: h=dt, temporal, spatial")
            sp.add_argument("--levels", type=int, help="ladder length")
            sp.add_argument("--coarsest", type=float, help="coarsest refined step")
        if name == "compare":
            sp.add_argument("--times", type=float, nargs="+", help="comparison times")
        if name == "audit":
            sp.add_argument("--random_instances", type=int,
                            help="additionally audit this many random problems")
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    flag_values = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    if flag_values.get("z0") not in (None, "auto"):
        try:
            flag_values["z0"] = float(flag_values["z0"])
        except ValueError:
            print(f"error: z0 must be a number or 'auto', got {flag_values['z0']!r}",
                  file=sys.stderr)
            return 1
    try:
        cfg = RunConfig.from_sources(ns.command, ns.config, flag_values)
        return _COMMANDS[ns.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
