"""Batch front end: one command per process, static artifacts per run.

Every command reads one JSON config (defaults filled in, individual keys
overridable with --set dotted.path=value), computes, and writes its
artifacts into --out with a write-then-rename so no partial file is ever
left behind.  Outputs are deterministic: reruns with the same config
produce byte-identical files, every artifact echoes the config it came
from, and exit codes are stable:

    0  success
    1  semantic failure (inadmissible, unsupported regime, bad values)
    2  config or argument parse failure
    3  convergence failure
    4  positivity violation
"""

import argparse
import copy
import json
import math
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .basis import Field, build_sine_basis
from .bootstrap import LINFINITY, holder_trigger, run_chain
from .domain import Domain
from .errors import (
    AdmissibilityFailure,
    DegenerateWeight,
    FleError,
    InvalidChain,
    NotConverged,
    SingularJacobian,
    TrivialCollapse,
)
from .exponents import (
    ExponentPair,
    ProblemParams,
    asymptotes,
    check_problem,
    critical_q_of_p,
    pq1_intersection,
)
from .figures import render_fields, render_region, render_sweep
from .operators import (
    assemble_restricted,
    build_spectral_operator,
    compare_first_eigenvalue,
    normalization_constant,
    pointwise_domination_check,
)
from .solver import (
    SolverConfig,
    default_fine_grid,
    evaluate_pair,
    resolve_t,
    solve_positive,
    sweep_to_critical,
)

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3
EXIT_POSITIVITY = 4

_CONVERGENCE_ERRORS = (NotConverged, TrivialCollapse, SingularJacobian)

DEFAULT_CONFIG = {
    "problem": {
        "N": 1, "s": 0.25, "alpha": 0.0, "beta": 0.0,
        "p": 2.0, "q": 2.0, "t": None,
    },
    "operator": {"kind": "spectral", "n": 256},
    "domain": "interval",
    "solver": {
        "M": 64, "panels": 10, "order": None,
        "tol_fix": 1e-13, "tol_res": 1e-10,
        "max_iter_power": 400, "max_iter_newton": 60,
        "fine_points": 2001,
    },
    "region": {"samples": 200, "p_min": 0.05, "p_max": 20.0},
    "sweep": {"ray": [2.0, 2.0], "theta_start": 1.0, "theta_stop": 1.45,
              "count": 10, "thetas": None},
    "ops_compare": {"s": 0.5, "n": 512, "fields": 20},
    "bootstrap": {"start_gamma": 2.0, "max_steps": 20},
    "const": {"N": 1, "s": 0.5},
    "output": {"pos_tol": 1e-10},
}


class ConfigError(Exception):
    """Anything wrong with the config document or the --set overrides."""


# ---------------------------------------------------------------- config


def _merge(base, override, trail=""):
    for key, value in override.items():
        where = f"{trail}.{key}" if trail else key
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be a table")
            _merge(base[key], value, where)
        else:
            base[key] = value


def _apply_set(config, assignment):
    if "=" not in assignment:
        raise ConfigError(f"--set needs key=value, got {assignment!r}")
    dotted, _, raw = assignment.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = config
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"unknown config table {part!r} in {dotted!r}")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(f"unknown config key {dotted!r}")
    node[parts[-1]] = value


def load_config(path, assignments):
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise ConfigError("config document must be a JSON object")
        _merge(config, document)
    for assignment in assignments:
        _apply_set(config, assignment)
    return config


def _as_int(value, name):
    # bad type in the config is a parse failure, not a semantic one
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from exc


def _as_float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {value!r}") from exc


def _problem(config):
    spec = config["problem"]
    params = ProblemParams(
        N=_as_int(spec["N"], "problem.N"), s=_as_float(spec["s"], "problem.s"),
        alpha=_as_float(spec["alpha"], "problem.alpha"),
        beta=_as_float(spec["beta"], "problem.beta"),
    )
    params.validate()
    pair = ExponentPair(p=_as_float(spec["p"], "problem.p"),
                        q=_as_float(spec["q"], "problem.q"))
    pair.validate()
    t = spec["t"]
    return params, pair, (None if t is None else _as_float(t, "problem.t"))


def _solver_config(config):
    spec = config["solver"]
    return SolverConfig(
        M=_as_int(spec["M"], "solver.M"),
        panels=_as_int(spec["panels"], "solver.panels"),
        order=(None if spec["order"] is None
               else _as_int(spec["order"], "solver.order")),
        tol_fix=_as_float(spec["tol_fix"], "solver.tol_fix"),
        tol_res=_as_float(spec["tol_res"], "solver.tol_res"),
        max_iter_power=_as_int(spec["max_iter_power"], "solver.max_iter_power"),
        max_iter_newton=_as_int(spec["max_iter_newton"], "solver.max_iter_newton"),
        fine_points=_as_int(spec["fine_points"], "solver.fine_points"),
    )


def _domain(config):
    kind = config["domain"]
    if kind == "interval":
        return Domain.interval()
    if kind == "square":
        return Domain.square()
    raise ConfigError(f"unknown domain {kind!r}")


def _operator(config, params):
    spec = config["operator"]
    kind = spec["kind"]
    if kind == "spectral":
        basis = build_sine_basis(_domain(config),
                                 _as_int(config["solver"]["M"], "solver.M"))
        return build_spectral_operator(basis, params.s)
    if kind == "restricted":
        return assemble_restricted(_domain(config),
                                   _as_int(spec["n"], "operator.n"), params.s)
    raise ConfigError(f"unknown operator kind {kind!r}")


# --------------------------------------------------------------- writers


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_text(path, text):
    tmp = Path(f"{path}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def json_document(command, config, payload):
    body = {"command": command, "version": __version__,
            "config": _clean(config), **_clean(payload)}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def csv_preamble(command, config):
    echo = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"))
    return [f"# fle {command} {__version__}", f"# config {echo}"]


def csv_document(command, config, header, rows):
    lines = csv_preamble(command, config)
    lines.append(header)
    lines.extend(",".join(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def _error_artifact(out_dir, command, config, exc):
    text = json_document(command, config, {
        "error": f"{type(exc).__name__}: {exc}",
    })
    write_text(out_dir / f"{command}_error.json", text)


# -------------------------------------------------------------- commands


def cmd_check(config, out_dir):
    params, pair, t = _problem(config)
    if t is None:
        try:
            t = resolve_t(params, pair)
        except AdmissibilityFailure:
            # the window is empty; report against a neutral interior value
            t = params.s
    report = check_problem(params, pair, t)
    write_text(out_dir / "check.json",
               json_document("check", config, {"report": report.to_dict()}))
    return EXIT_OK if report.admissible else EXIT_SEMANTIC


def cmd_region(config, out_dir):
    try:
        params, _, _ = _problem(config)
    except (ValueError, FleError) as exc:
        _error_artifact(out_dir, "region", config, exc)
        return EXIT_PARSE
    spec = config["region"]
    samples = _as_int(spec["samples"], "region.samples")
    if samples < 2:
        _error_artifact(out_dir, "region", config,
                        ValueError("need at least 2 samples"))
        return EXIT_PARSE
    p_grid = np.geomspace(_as_float(spec["p_min"], "region.p_min"),
                          _as_float(spec["p_max"], "region.p_max"), samples)
    q_critical = np.array(
        [float("nan") if (q := critical_q_of_p(params, p)) is None else q
         for p in p_grid]
    )
    q_reciprocal = 1.0 / p_grid
    try:
        marker = pq1_intersection(params)
    except DegenerateWeight:
        marker = None
    rows = [
        [repr(float(p)), repr(float(qc)), repr(float(qr))]
        for p, qc, qr in zip(p_grid, q_critical, q_reciprocal)
    ]
    payload = {
        "asymptotes": {"vertical": asymptotes(params)[0],
                       "horizontal": asymptotes(params)[1]},
        "marker": None if marker is None else list(marker),
        "samples": samples,
    }
    write_text(out_dir / "region.csv",
               csv_document("region", config, "p,q_critical,q_reciprocal", rows))
    write_text(out_dir / "region.json",
               json_document("region", config, payload))
    render_region(p_grid, q_critical, q_reciprocal, asymptotes(params),
                  marker, out_dir / "region.svg")
    return EXIT_OK


def cmd_solve(config, out_dir):
    params, pair, t = _problem(config)
    operator = _operator(config, params)
    solver_config = _solver_config(config)
    try:
        result = solve_positive(params, pair, operator, solver_config, t=t)
    except _CONVERGENCE_ERRORS as exc:
        _error_artifact(out_dir, "solve", config, exc)
        return EXIT_CONVERGENCE
    grid = default_fine_grid(_domain(config), solver_config.fine_points)
    u, v = evaluate_pair(result.pair, grid)
    if grid.ndim == 1:
        header = "x,u,v"
        rows = [[repr(float(x)), repr(float(a)), repr(float(b))]
                for x, a, b in zip(grid, u, v)]
    else:
        header = "x,y,u,v"
        rows = [[repr(float(x)), repr(float(y)), repr(float(a)), repr(float(b))]
                for (x, y), a, b in zip(grid, u, v)]
    write_text(out_dir / "fields.csv",
               csv_document("solve", config, header, rows))
    write_text(out_dir / "solve.json",
               json_document("solve", config, {"result": result.to_dict()}))
    summary = csv_preamble("solve", config) + [
        f"converged {str(result.converged).lower()}",
        f"residual_sup {result.energy.residual_sup!r}",
        f"iterations power={result.iterations[0]} newton={result.iterations[1]}",
        f"positivity_min {result.positivity_min!r}",
        f"J {result.energy.J!r}",
    ]
    write_text(out_dir / "summary.txt", "\n".join(summary) + "\n")
    render_fields(grid, u, v, out_dir / "fields.svg")
    if not result.converged:
        return EXIT_CONVERGENCE
    if result.positivity_min < -_as_float(config["output"]["pos_tol"],
                                          "output.pos_tol"):
        return EXIT_POSITIVITY
    return EXIT_OK


def cmd_sweep(config, out_dir):
    params, _, _ = _problem(config)
    spec = config["sweep"]
    if not isinstance(spec["ray"], (list, tuple)) or len(spec["ray"]) != 2:
        raise ConfigError(f"sweep.ray must be a two-element list, "
                          f"got {spec['ray']!r}")
    ray = (_as_float(spec["ray"][0], "sweep.ray"),
           _as_float(spec["ray"][1], "sweep.ray"))
    if spec["thetas"] is not None:
        if not isinstance(spec["thetas"], (list, tuple)):
            raise ConfigError(f"sweep.thetas must be a list, "
                              f"got {spec['thetas']!r}")
        thetas = [_as_float(theta, "sweep.thetas") for theta in spec["thetas"]]
    else:
        thetas = list(np.linspace(_as_float(spec["theta_start"],
                                            "sweep.theta_start"),
                                  _as_float(spec["theta_stop"],
                                            "sweep.theta_stop"),
                                  _as_int(spec["count"], "sweep.count")))
    operator = _operator(config, params)
    report = sweep_to_critical(params, ray, thetas, operator,
                               _solver_config(config))
    write_text(out_dir / "sweep.csv",
               "\n".join(csv_preamble("sweep", config)
                         + report.to_csv_lines()) + "\n")
    write_text(out_dir / "sweep.json",
               json_document("sweep", config, {"report": report.to_dict()}))
    render_sweep(report.rows, out_dir / "sweep.svg")
    failures = [row.error for row in report.rows if row.error is not None]
    if any("AdmissibilityFailure" in err for err in failures):
        return EXIT_SEMANTIC
    if not all(row.converged for row in report.rows):
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_ops_compare(config, out_dir):
    spec = config["ops_compare"]
    s = _as_float(spec["s"], "ops_compare.s")
    n = _as_int(spec["n"], "ops_compare.n")
    count = _as_int(spec["fields"], "ops_compare.fields")
    if n < 8 or count < 1:
        raise ConfigError("ops_compare needs n >= 8 and fields >= 1")
    comparison = compare_first_eigenvalue(Domain.interval(), s, n)
    basis = build_sine_basis(Domain.interval(), n - 1)
    grid = -1.0 + 2.0 / n * np.arange(1, n)
    modes = basis.evaluate_modes(grid)
    # nonnegative battery: clipped bumps interpolated exactly at the nodes
    centers = np.linspace(-0.6, 0.6, max(1, count // 4))
    widths = (0.15, 0.3, 0.5, 0.8)
    profiles = []
    for width in widths:
        for center in centers:
            profiles.append(np.exp(-(((grid - center) / width) ** 2))
                            * (1.0 - grid**2))
            if len(profiles) == count:
                break
        if len(profiles) == count:
            break
    values = np.clip(np.array(profiles).T, 0.0, None)
    coefficients = np.linalg.solve(modes, values)
    minima = []
    for k in range(values.shape[1]):
        report = pointwise_domination_check(Field(basis, coefficients[:, k]), s, n)
        minima.append(report.min_difference)
    payload = {
        "eigenvalue": comparison.to_dict(),
        "domination": {
            "fields": len(minima),
            "min": min(minima),
            "per_field_min": minima,
        },
    }
    write_text(out_dir / "ops_compare.json",
               json_document("ops-compare", config, payload))
    ok = comparison.strict and min(minima) >= -1e-6
    return EXIT_OK if ok else EXIT_SEMANTIC


def cmd_bootstrap(config, out_dir):
    params, pair, t = _problem(config)
    if t is None:
        t = resolve_t(params, pair)
    spec = config["bootstrap"]
    chain = run_chain(_as_float(spec["start_gamma"], "bootstrap.start_gamma"),
                      params, pair, t,
                      max_steps=_as_int(spec["max_steps"],
                                        "bootstrap.max_steps"))
    holder = holder_trigger(params, pair)
    write_text(out_dir / "bootstrap.json",
               json_document("bootstrap", config, {
                   "chain": chain.to_dict(),
                   "holder": holder.to_dict(),
               }))
    write_text(out_dir / "chain.csv",
               "\n".join(csv_preamble("bootstrap", config)
                         + chain.to_csv_lines()) + "\n")
    return EXIT_OK if chain.terminal == LINFINITY else EXIT_SEMANTIC


def cmd_const(config, out_dir):
    spec = config["const"]
    value = normalization_constant(_as_int(spec["N"], "const.N"),
                                   _as_float(spec["s"], "const.s"))
    write_text(out_dir / "const.txt", f"{value!r}\n")
    write_text(out_dir / "const.json",
               json_document("const", config, {"value": value}))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "region": cmd_region,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "ops-compare": cmd_ops_compare,
    "bootstrap": cmd_bootstrap,
    "const": cmd_const,
}


# ------------------------------------------------------------ entry point


def _thread_cap():
    raw = os.environ.get("FLE_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"FLE_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ConfigError(f"FLE_THREADS must be positive, got {cap}")
    return cap


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fle",
        description="Weighted fractional Lane-Emden toolbox",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", default=None, help="JSON config file")
        sub.add_argument("--set", action="append", default=[],
                         metavar="KEY=VALUE", dest="assignments",
                         help="override one config key (dotted path)")
        sub.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config, args.assignments)
        cap = _thread_cap()
    except ConfigError as exc:
        print(f"fle: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    command = COMMANDS[args.command]
    limiter = nullcontext() if cap is None else threadpool_limits(limits=cap)
    try:
        with limiter:
            return command(config, out_dir)
    except ConfigError as exc:
        print(f"fle: {exc}", file=sys.stderr)
        _error_artifact(out_dir, args.command, config, exc)
        return EXIT_PARSE
    except _CONVERGENCE_ERRORS as exc:
        print(f"fle: {exc}", file=sys.stderr)
        _error_artifact(out_dir, args.command, config, exc)
        return EXIT_CONVERGENCE
    except (FleError, ValueError) as exc:
        print(f"fle: {exc}", file=sys.stderr)
        _error_artifact(out_dir, args.command, config, exc)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
