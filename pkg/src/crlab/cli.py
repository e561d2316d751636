"""Command line scenario runner.

Usage::

    crlab <command> [--config FILE] [--seed N] [--grid N] [--tol X]
                    [--jobs N] [--out DIR] [--param KEY=JSON ...]
    crlab run (--config FILE | --scenario NAME)
    crlab list

Config files are JSON with ``"schema": 1``::

    {
      "schema": 1,
      "name": "my-run",
      "seed": 0,
      "model": {"builtin": "quadratic-h"}            # or coefficient lists,
                                                      # e.g. {"h": [poly, poly]}
      "op": {"id": "bishop", "params": {"c": 0.05}},
      "output": {"dir": "out", "formats": ["json", "csv"], "tables": null}
    }

A polynomial is ``{"terms": [[coef, [e1, e2, ...]], ...]}`` with explicit
exponents.  Outputs are ``<name>.json``, ``<name>_checks.csv`` (header
``check,passed,value,relation,threshold``) and one ``<name>_<table>.csv``
per report table.  Exit codes: 0 all checks pass, 1 a check failed,
2 usage or config error, 3 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources
from typing import Optional

from . import __version__
from .errors import ConfigError, CRLabError, Diverged, NonConvergence, ParameterOutOfRange
from .scenarios import SCENARIOS, ScenarioReport, resolve_params, run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2, 3

COMMANDS = {
    "hilbert": "hilbert-identity",
    "bishop": "bishop",
    "disc-family": "disc-family",
    "foliation": "foliation",
    "check-condition": "check-condition",
    "special-point": "special-point",
    "envelope": "envelope",
    "gauss": "gauss",
    "torus": "torus",
    "torus-verify": "torus-verify",
}

# built-in model ids and the scenarios they feed
MODELS = {
    "unit-circle": ("hilbert-identity",),
    "quadratic-h": ("bishop",),
    "normalized-i1": ("disc-family",),
    "gamma-surface": ("foliation",),
    "condition-suite": ("check-condition",),
    "constant-fields": ("special-point",),
    "hartogs-shell": ("envelope",),
    "tilted-slice": ("gauss",),
    "reeb-torus": ("torus", "torus-verify"),
}

TOP_KEYS = {"schema", "name", "seed", "model", "op", "output"}
FORMATS = {"json", "csv"}


# ----------------------------------------------------------------------
# configuration


def parse_config_text(text: str, source: str = "<config>") -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from None
    return validate_config(cfg, source)


def validate_config(cfg, source: str = "<config>") -> dict:
    def bad(field, msg):
        raise ConfigError(f"{source}: field '{field}': {msg}")

    if not isinstance(cfg, dict):
        bad("<root>", "expected a JSON object")
    for k in cfg:
        if k not in TOP_KEYS:
            bad(k, "unknown top-level key")
    if cfg.get("schema") != 1:
        bad("schema", f"unsupported schema {cfg.get('schema')!r} (expected 1)")
    op = cfg.get("op")
    if not isinstance(op, dict) or not isinstance(op.get("id"), str):
        bad("op.id", "missing operation id")
    if op["id"] not in SCENARIOS:
        bad("op.id", f"unknown operation {op['id']!r}")
    params = op.get("params", {})
    if not isinstance(params, dict):
        bad("op.params", "expected an object")
    params = dict(params)
    model = cfg.get("model", {})
    if not isinstance(model, dict):
        bad("model", "expected an object")
    for k, v in model.items():
        if k == "builtin":
            if v not in MODELS:
                bad("model.builtin", f"unknown model id {v!r}")
            if op["id"] not in MODELS[v]:
                bad("model.builtin", f"model {v!r} cannot be used with operation {op['id']!r}")
        else:
            if k in params:
                bad(f"model.{k}", "also given in op.params")
            params[k] = v
    try:
        resolve_params(op["id"], params)
    except ConfigError as e:
        bad("op.params", str(e))
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        bad("seed", "expected an unsigned 64-bit integer")
    out = cfg.get("output", {})
    if not isinstance(out, dict):
        bad("output", "expected an object")
    formats = out.get("formats", ["json", "csv"])
    if not isinstance(formats, list) or not set(formats) <= FORMATS:
        bad("output.formats", f"expected a subset of {sorted(FORMATS)}")
    tables = out.get("tables")
    if tables is not None and not (isinstance(tables, list) and all(isinstance(t, str) for t in tables)):
        bad("output.tables", "expected a list of table names or null")
    name = cfg.get("name", op["id"])
    if not isinstance(name, str) or not name or os.sep in name:
        bad("name", "expected a plain file stem")
    return {
        "schema": 1,
        "name": name,
        "seed": seed,
        "scenario": op["id"],
        "params": params,
        "output": {"dir": out.get("dir"), "formats": list(formats), "tables": tables},
    }


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    return parse_config_text(text, path)


def builtin_names() -> list:
    return sorted(p.name[:-5] for p in resources.files("crlab.configs").iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> dict:
    ref = resources.files("crlab.configs") / f"{name}.json"
    if not ref.is_file():
        raise ConfigError(f"unknown built-in scenario {name!r}; known: {', '.join(builtin_names())}")
    return parse_config_text(ref.read_text(encoding="utf-8"), f"builtin:{name}")


# ----------------------------------------------------------------------
# emission


def _num(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) or hasattr(x, "dtype"):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(f"{x:.12g}")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if isinstance(obj, complex):
        return [_num(obj.real), _num(obj.imag)]
    return _num(obj)


def _cell(x) -> str:
    x = _num(x)
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def report_dict(report: ScenarioReport, name: str, files: list) -> dict:
    return _clean(
        {
            "name": name,
            "scenario": report.scenario,
            "version": __version__,
            "seed": report.seed,
            "params": report.params,
            "passed": report.passed,
            "checks": [{"name": c.name, "passed": c.passed, "value": c.value, "relation": c.relation, "threshold": c.threshold} for c in report.checks],
            "constants": report.constants,
            "tables": {t.name: {"header": t.header, "rows": len(t.rows)} for t in report.tables},
            "files": files,
        }
    )


def emit_report(report: ScenarioReport, out_dir: str, name: str, formats=("json", "csv"), tables: Optional[list] = None) -> list:
    """Write the report files; returns the written paths (JSON last)."""
    os.makedirs(out_dir, exist_ok=True)
    written, names = [], []

    def put(fname, text):
        path = os.path.join(out_dir, fname)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)
        names.append(fname)

    if "csv" in formats:
        put(f"{name}_checks.csv", csv_text(["check", "passed", "value", "relation", "threshold"], [[c.name, c.passed, c.value, c.relation, "" if c.threshold is None else c.threshold] for c in report.checks]))
        for t in report.tables:
            if tables is None or t.name in tables:
                put(f"{name}_{t.name}.csv", csv_text(t.header, t.rows))
    if "json" in formats:
        text = json.dumps(report_dict(report, name, sorted(names)), sort_keys=True, indent=2) + "\n"
        put(f"{name}.json", text)
    return written


# ----------------------------------------------------------------------
# entry point


def _parse_param(text: str):
    if "=" not in text:
        raise ConfigError(f"--param expects KEY=JSON, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (schema 1)")
    p.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    p.add_argument("--grid", type=int, help="grid size of the scenario's main discretization")
    p.add_argument("--tol", type=float, help="tolerance of the scenario's main check")
    p.add_argument("--jobs", type=int, default=1, help="parallel independent sub-computations")
    p.add_argument("--out", help="output directory (default: crlab-out)")
    p.add_argument("--param", action="append", default=[], metavar="KEY=JSON", help="override a scenario parameter")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crlab", description="Scenario runner for the CR analytic disc laboratory.")
    ap.add_argument("--version", action="version", version=f"crlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd, scen in COMMANDS.items():
        p = sub.add_parser(cmd, help=SCENARIOS[scen].description)
        _common(p)
        if cmd == "torus-verify":
            p.add_argument("--radius", type=float, help="radius of the sampled ball")
    p = sub.add_parser("run", help="run a config file or a built-in scenario")
    _common(p)
    p.add_argument("--scenario", help="built-in scenario name (see 'crlab list')")
    sub.add_parser("list", help="list built-in scenarios and operations")
    return ap


def _assemble(args) -> dict:
    if args.command == "run":
        if bool(args.config) == bool(args.scenario):
            raise ConfigError("run needs exactly one of --config or --scenario")
        cfg = load_config(args.config) if args.config else load_builtin(args.scenario)
    elif args.config:
        cfg = load_config(args.config)
        if cfg["scenario"] != COMMANDS[args.command]:
            raise ConfigError(f"config operation {cfg['scenario']!r} does not match command {args.command!r}")
    else:
        scen = COMMANDS[args.command]
        cfg = validate_config({"schema": 1, "op": {"id": scen}})
    scen = cfg["scenario"]
    spec = SCENARIOS[scen]
    params = dict(cfg["params"])
    for item in args.param:
        k, v = _parse_param(item)
        params[k] = v
    if args.grid is not None:
        if spec.grid_param is None:
            raise ConfigError(f"scenario {scen!r} has no grid parameter")
        params[spec.grid_param] = args.grid
    if args.tol is not None:
        if spec.tol_param is None:
            raise ConfigError(f"scenario {scen!r} has no tolerance parameter")
        params[spec.tol_param] = args.tol
    if getattr(args, "radius", None) is not None:
        params["radius"] = args.radius
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg["seed"] = args.seed
    if args.jobs < 1:
        raise ConfigError("--jobs must be positive")
    resolve_params(scen, params)
    cfg["params"] = params
    cfg["output"]["dir"] = args.out or cfg["output"]["dir"] or "crlab-out"
    return cfg


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "list":
        for name in builtin_names():
            print(f"scenario  {name}")
        for cmd, scen in COMMANDS.items():
            print(f"command   {cmd:16s} {SCENARIOS[scen].description}")
        return EXIT_PASS
    try:
        cfg = _assemble(args)
    except ConfigError as e:
        print(f"crlab: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg["scenario"].startswith("torus"):
        from .torus_example import enable_compile_cache

        enable_compile_cache()
    try:
        report = run(cfg["scenario"], cfg["params"], cfg["seed"], args.jobs)
    except (ConfigError, ParameterOutOfRange, ValueError) as e:
        print(f"crlab: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (Diverged, NonConvergence) as e:
        print(f"crlab: nonconvergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except CRLabError as e:
        print(f"crlab: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    out = cfg["output"]
    try:
        files = emit_report(report, out["dir"], cfg["name"], out["formats"], out["tables"])
    except OSError as e:
        print(f"crlab: {e}", file=sys.stderr)
        return EXIT_FAIL
    for c in report.checks:
        print(c.line())
    for f in files:
        print(f"wrote {f}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
