"""Command-line interface.

Five subcommands drive the library: ``compute`` (spectral radius of one
preset at one degree, JSON), ``converge`` (error table over a degree
list, CSV), ``sweep`` (spectral radius over a 1-d/2-d parameter grid,
CSV), ``eigenfunction`` (eigenfunction samples on an equidistant grid,
CSV) and ``bound`` (closed-form upper bound, JSON; epidemic presets
only). Numbers are serialized with 17 significant digits so they
round-trip exactly; identical invocations produce identical bytes.

Exit status: 0 on success, 1 on invalid arguments, 2 on numerical
failure. Partial sweep failures still exit 0, with NaN rows.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (
    VarySpec,
    assemble_problem,
    converge,
    exact_eigenfunction,
    exact_r0,
    make_problem,
    sweep,
)
from .eigen import eigenfunction, spectral_radius
from .exceptions import NumericalError
from .model_b import ModelBProblem, upper_bound_b
from .spectral import barycentric_interpolate, barycentric_weights, collocation_mesh

__all__ = ["RunConfig", "main", "run"]

COMMANDS = ("compute", "converge", "sweep", "eigenfunction", "bound")
_METHOD_TAGS = {"ngo": "ngo-product", "left": "m-inverse-left"}
_DEFAULT_BOUND_DEGREE = 200


class UsageError(ValueError):
    """Invalid command line or config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved settings of one CLI invocation."""

    command: str
    preset: str | None = None
    overrides: dict = field(default_factory=dict)
    n: int | None = None
    nbar: int = 1000
    n_list: list[int] | None = None
    vary: list[VarySpec] = field(default_factory=list)
    method: str = "ngo-product"
    points: int = 1000
    fmt: str | None = None
    out: str | None = None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="r0cheb",
        description="Basic reproduction numbers of structured population models "
        "by Chebyshev collocation.",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    parser.add_argument("--preset", help="model preset name, e.g. A1 or B2.2 (case-insensitive)")
    parser.add_argument("--n", type=int, help="collocation degree")
    parser.add_argument("--nbar", type=int, help="reference degree for convergence errors")
    parser.add_argument("--n-list", dest="n_list", help="degree list LO:STEP:HI")
    parser.add_argument(
        "--set",
        dest="assign",
        action="append",
        metavar="KEY=VALUE",
        help="override a preset scalar (repeatable)",
    )
    parser.add_argument(
        "--vary",
        action="append",
        metavar="KEY=LO:HI:P[:log]",
        help="sweep a preset scalar over an inclusive grid (repeatable, max 2)",
    )
    parser.add_argument("--method", choices=sorted(_METHOD_TAGS), help="eigenproblem reduction path")
    parser.add_argument("--points", type=int, help="evaluation points for tables")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"))
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--config", help="JSON config file; flags win over file entries")
    return parser


def _parse_assignments(entries) -> dict:
    if isinstance(entries, dict):
        return {str(k): float(v) for k, v in entries.items()}
    overrides = {}
    for entry in entries or []:
        key, sep, value = str(entry).partition("=")
        if not sep or not key.strip():
            raise UsageError(f"bad --set entry {entry!r}; expected KEY=VALUE")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"bad --set value in {entry!r}; expected a number") from None
    return overrides


def _parse_n_list(raw) -> list[int]:
    if isinstance(raw, (list, tuple)):
        ns = [int(v) for v in raw]
    else:
        parts = str(raw).split(":")
        if len(parts) != 3:
            raise UsageError(f"bad --n-list {raw!r}; expected LO:STEP:HI")
        try:
            lo, step, hi = (int(p) for p in parts)
        except ValueError:
            raise UsageError(f"bad --n-list {raw!r}; expected integers") from None
        if step < 1 or lo > hi:
            raise UsageError("--n-list needs STEP >= 1 and LO <= HI")
        ns = list(range(lo, hi + 1, step))
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("degree list must be non-empty and strictly ascending")
    return ns


def _parse_vary(raw) -> VarySpec:
    text = str(raw)
    key, sep, rest = text.partition("=")
    parts = rest.split(":")
    if not sep or not key.strip() or len(parts) not in (3, 4):
        raise UsageError(f"bad --vary entry {text!r}; expected KEY=LO:HI:P[:log]")
    log = False
    if len(parts) == 4:
        if parts[3] != "log":
            raise UsageError(f"bad --vary suffix {parts[3]!r}; only 'log' is understood")
        log = True
    try:
        lo, hi = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError:
        raise UsageError(f"bad --vary entry {text!r}; expected numbers") from None
    if points < 2:
        raise UsageError("sweeps need at least 2 grid points")
    return VarySpec(name=key.strip(), lo=lo, hi=hi, points=points, log=log)


def _build_config(args) -> RunConfig:
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")

    def pick(flag, *keys, default=None):
        if flag is not None:
            return flag
        for key in keys:
            if key in file_cfg:
                return file_cfg[key]
        return default

    command = args.command or file_cfg.get("command")
    if command not in COMMANDS:
        raise UsageError(f"missing or unknown command; choose from {COMMANDS}")

    raw_method = pick(args.method, "method", default="ngo")
    if raw_method not in _METHOD_TAGS:
        raise UsageError(f"unknown method {raw_method!r}; choose from {sorted(_METHOD_TAGS)}")

    raw_n_list = pick(args.n_list, "n-list", "n_list")
    raw_vary = args.vary if args.vary is not None else file_cfg.get("vary")
    raw_set = args.assign if args.assign is not None else file_cfg.get("set")

    preset = pick(args.preset, "preset")
    return RunConfig(
        command=command,
        preset=str(preset).strip().upper() if preset is not None else None,
        overrides=_parse_assignments(raw_set),
        n=int(args.n) if args.n is not None else (int(file_cfg["n"]) if "n" in file_cfg else None),
        nbar=int(pick(args.nbar, "nbar", default=1000)),
        n_list=_parse_n_list(raw_n_list) if raw_n_list is not None else None,
        vary=[_parse_vary(v) for v in (raw_vary or [])],
        method=_METHOD_TAGS[raw_method],
        points=int(pick(args.points, "points", default=1000)),
        fmt=pick(args.fmt, "format"),
        out=pick(args.out, "out"),
    )


def _fmt(value) -> str:
    return format(float(value), ".17g")


def _json_document(items) -> str:
    parts = []
    for key, value in items:
        if value is None:
            enc = "null"
        elif isinstance(value, (bool, np.bool_)):
            enc = "true" if value else "false"
        elif isinstance(value, str):
            enc = json.dumps(value)
        elif isinstance(value, (int, np.integer)):
            enc = str(int(value))
        else:
            enc = _fmt(value)
        parts.append(f'"{key}": {enc}')
    return "{" + ", ".join(parts) + "}\n"


def _csv_document(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _tabular(config: RunConfig, header, rows) -> str:
    if config.fmt == "json":
        body = json.dumps(
            {"columns": list(header), "rows": [[_fmt(c) if not isinstance(c, str) else c for c in row] for row in rows]},
            separators=(", ", ": "),
        )
        return body + "\n"
    return _csv_document(header, rows)


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"this command requires {flag}")
    return value


def _cmd_compute(config: RunConfig) -> str:
    preset = _require(config.preset, "--preset")
    n = _require(config.n, "--n")
    problem = make_problem(preset, config.overrides)
    mesh = collocation_mesh(n, problem.length)
    pair = assemble_problem(problem, mesh)
    result = spectral_radius(pair, config.method)
    items = [
        ("preset", problem.preset),
        ("n", n),
        ("r0", result.r0),
        ("residual", result.residual),
        ("method", result.method),
        ("dominant_is_real", result.dominant_is_real),
    ]
    if isinstance(problem, ModelBProblem):
        items.append(("upper_bound", upper_bound_b(problem, mesh)))
    if config.fmt == "csv":
        header = [key for key, _ in items]
        row = ["" if v is None else (v if isinstance(v, str) else ("true" if v is True else "false" if v is False else v)) for _, v in items]
        return _csv_document(header, row and [row])
    return _json_document(items)


def _cmd_bound(config: RunConfig) -> str:
    preset = _require(config.preset, "--preset")
    problem = make_problem(preset, config.overrides)
    if not isinstance(problem, ModelBProblem):
        raise UsageError("the bound command applies to model-B presets only")
    mesh = collocation_mesh(config.n or _DEFAULT_BOUND_DEGREE, problem.length)
    items = [("preset", problem.preset), ("upper_bound", upper_bound_b(problem, mesh))]
    if config.fmt == "csv":
        return _csv_document([k for k, _ in items], [[v for _, v in items]])
    return _json_document(items)


def _cmd_converge(config: RunConfig) -> str:
    preset = _require(config.preset, "--preset")
    n_list = _require(config.n_list, "--n-list")
    problem = make_problem(preset, config.overrides)
    known = exact_eigenfunction(problem)
    phi, anchor = known if known is not None else (None, None)
    report = converge(
        problem,
        n_list,
        reference=exact_r0(problem),
        nbar=config.nbar,
        exact_phi=phi,
        anchor=anchor,
        eval_points=config.points,
        method=config.method,
    )
    rows = []
    for k, n in enumerate(report.n_values):
        err_r0 = report.r0_errors[k]
        cell_r0 = "nan" if not np.isfinite(err_r0) else err_r0
        if report.eigfun_errors is None or not np.isfinite(report.eigfun_errors[k]):
            cell_phi = ""
        else:
            cell_phi = report.eigfun_errors[k]
        rows.append([float(n), cell_r0, cell_phi])
    rows = [[str(int(r[0])), *r[1:]] for r in rows]
    return _tabular(config, ["N", "err_r0", "err_phi"], rows)


def _cmd_sweep(config: RunConfig) -> str:
    preset = _require(config.preset, "--preset")
    n = _require(config.n, "--n")
    if not config.vary:
        raise UsageError("this command requires --vary")
    result = sweep(preset, config.vary, n, overrides=config.overrides, method=config.method)
    if len(result.param_names) == 1:
        header = [result.param_names[0], "r0"]
        rows = [[g, v] for g, v in zip(result.grids[0], result.values)]
    else:
        header = [*result.param_names, "r0"]
        rows = [
            [g1, g2, result.values[i, j]]
            for i, g1 in enumerate(result.grids[0])
            for j, g2 in enumerate(result.grids[1])
        ]
    return _tabular(config, header, rows)


def _cmd_eigenfunction(config: RunConfig) -> str:
    preset = _require(config.preset, "--preset")
    n = _require(config.n, "--n")
    problem = make_problem(preset, config.overrides)
    mesh = collocation_mesh(n, problem.length)
    pair = assemble_problem(problem, mesh)
    result = spectral_radius(pair, config.method)
    if not result.dominant_is_real or result.eigvec is None:
        raise NumericalError("dominant eigenvalue is complex; no eigenfunction to emit")
    grid = np.linspace(0.0, problem.length, config.points)
    phi_vals = eigenfunction(result, mesh, grid)
    nodes = pair.active_nodes
    wbar = barycentric_weights(nodes)
    psi_vals = barycentric_interpolate(nodes, pair.M @ result.eigvec, grid, weights=wbar)
    rows = [[x, p, s] for x, p, s in zip(grid, phi_vals, psi_vals)]
    return _tabular(config, ["x", "phi", "psi"], rows)


_DISPATCH = {
    "compute": _cmd_compute,
    "bound": _cmd_bound,
    "converge": _cmd_converge,
    "sweep": _cmd_sweep,
    "eigenfunction": _cmd_eigenfunction,
}


def run(config: RunConfig) -> str:
    """Execute one resolved configuration and return the emitted document."""
    if config.command not in _DISPATCH:
        raise UsageError(f"unknown command {config.command!r}")
    return _DISPATCH[config.command](config)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = _build_config(args)
        document = run(config)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if config.out:
        Path(config.out).write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)
    return 0
