"""Command-line front end.

Every subcommand writes its artifacts into ``--out`` and finishes with a
``manifest.json`` listing them. Exit codes: 0 success, 1 I/O error,
2 invalid parameters or input, 3 failed certificate or statistical check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import comparative, kernels, oracle
from .closed_form import equilibrium, equilibrium_profits, expected_prices
from .distribution import sup_distance
from .market_model import FIGURE_PARAMS, MarketParams, Model, ParameterError, Role, figure_params, validate_params
from .market_sim import SimulationConfig, mean_price_check, simulate

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_CHECK = 0, 1, 2, 3
PARAM_NAMES = ("u", "c", "r_L", "r_H", "k", "n")


class InputError(ValueError):
    """Bad user input that is not a market-parameter violation."""


# ------------------------------------------------------------------- serialisation


def _encode(value, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return "null"
        text = "%.17g" % value
        if "." not in text and "e" not in text and "inf" not in text:
            text += ".0"
        return text
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (Model, Role)):
        return json.dumps(value.value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k.value if isinstance(k, (Model, Role)) else k))}: "
                 f"{_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps(value, indent: int = 2) -> str:
    """JSON text with floats written to 17 significant digits; non-finite floats become null."""
    return _encode(value, indent, 0) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value) if math.isfinite(value) else ""
    if value is None:
        return ""
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


class Artifacts:
    """Collects output files; the manifest is written last by :meth:`finish`."""

    def __init__(self, out: Path):
        self.out = out
        self.files: list[dict] = []
        out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str, fmt: str) -> Path:
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        self.files.append({"path": name, "format": fmt})
        return path

    def json(self, name: str, payload) -> Path:
        return self.write(name, dumps(payload), "json")

    def csv(self, name: str, header, rows) -> Path:
        return self.write(name, csv_text(header, rows), "csv")

    def finish(self, args, params: dict | None, started: float, status: int) -> Path:
        manifest = {
            "subcommand": args.command,
            "argv": list(args.argv),
            "parameters": params,
            "seed": args.seed,
            "tool_version": _version(),
            "backend": kernels.BACKEND,
            "exit_status": status,
            "outputs": self.files,
            "wall_clock_seconds": time.perf_counter() - started,
        }
        path = self.out / "manifest.json"
        path.write_text(dumps(manifest), encoding="utf-8")
        return path


def _version() -> str:
    try:
        return metadata.version("reppricing")
    except metadata.PackageNotFoundError:
        return "unknown"


# ----------------------------------------------------------------------- parameters


def resolve_params(args) -> tuple[Model, MarketParams]:
    raw: dict = {}
    model = None
    if args.figure:
        model, p = figure_params(args.figure)
        raw = p.as_dict()
    if args.params:
        text = Path(args.params).read_text(encoding="utf-8")
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.params}: invalid JSON ({exc})") from exc
        if not isinstance(loaded, dict):
            raise InputError(f"{args.params}: expected a JSON object")
        loaded = dict(loaded)
        if "model" in loaded:
            model = Model(loaded.pop("model"))
        unknown = set(loaded) - set(PARAM_NAMES)
        if unknown:
            raise InputError(f"{args.params}: unknown key(s) {sorted(unknown)}")
        raw.update(loaded)
    for name in PARAM_NAMES:
        value = getattr(args, name)
        if value is not None:
            raw[name] = value
    missing = [name for name in PARAM_NAMES if name not in raw]
    if missing:
        raise InputError(f"missing parameter(s): {', '.join(missing)} (use --params, --figure or inline flags)")
    if args.model:
        model = Model(args.model)
    return model or Model.BENCHMARK, validate_params(raw)


def _params_payload(model: Model, p: MarketParams) -> dict:
    return {"model": model.value, **p.as_dict()}


# ---------------------------------------------------------------------- subcommands


def _union_grid(supports, points: int) -> np.ndarray:
    parts = [np.linspace(lo, hi, points) if hi > lo else np.array([lo]) for lo, hi in supports]
    return np.unique(np.concatenate(parts))


def cmd_equilibrium(args, out: Artifacts):
    model, p = resolve_params(args)
    report = equilibrium(p, model)
    out.json("equilibrium.json", report.to_dict())
    if args.format == "csv":
        low, high = report.distributions[Role.LOW], report.distributions[Role.HIGH]
        grid = _union_grid([(low.lower, low.upper), (high.lower, high.upper)], args.grid)
        out.csv("equilibrium.csv", ("price", "cdf_low", "cdf_high"),
                zip(grid, low.cdf(grid), high.cdf(grid)))
    return _params_payload(model, p), EXIT_OK


def cmd_verify(args, out: Artifacts):
    model, p = resolve_params(args)
    dists = equilibrium(p, model).distributions
    reports = oracle.verify_equilibrium(p, model, dists, grid_size=args.grid)
    oracle_distance = {}
    for role in (Role.LOW, Role.HIGH):
        solved = oracle.solve_indifference_cdf(p, model, role)
        oracle_distance[role.value] = sup_distance(solved, dists[role])
    payload = {
        "model": model.value,
        "certificates": {label: r.to_dict() for label, r in reports.items()},
        "oracle_sup_distance": oracle_distance,
        "oracle_tolerance": args.oracle_tolerance,
    }
    ok = all(r.passed for r in reports.values())
    ok = ok and all(d <= args.oracle_tolerance for d in oracle_distance.values())
    if model is Model.BENCHMARK:
        no_pure = oracle.no_pure_equilibrium_check(p)
        payload["no_pure_equilibrium"] = no_pure.summary()
        ok = ok and no_pure.every_pair_deviates
    payload["passed"] = ok
    out.json("verify.json", payload)
    if args.format == "csv":
        out.csv("verify.csv", ("seller", "max_gain", "argmax_price", "tolerance", "equilibrium_profit", "passed"),
                [(r.seller, r.max_gain, r.argmax_price, r.tolerance, r.equilibrium_profit, r.passed)
                 for r in reports.values()])
    if not ok:
        print("equilibrium certificate failed", file=sys.stderr)
    return _params_payload(model, p), EXIT_OK if ok else EXIT_CHECK


def cmd_simulate(args, out: Artifacts):
    model, p = resolve_params(args)
    config = SimulationConfig(p, model, equilibrium(p, model).distributions, args.rounds, args.seed)
    report = simulate(config)
    profits = equilibrium_profits(p, model)
    e_low, e_high = expected_prices(p, model)
    expected = {Role.LOW: e_low, Role.HIGH: e_high}
    checks = {}
    for spec in oracle.sellers(model):
        stats = report.sellers[spec.label]
        target = profits[spec.role]
        z = 0.0 if stats.se_profit == 0 else (stats.mean_profit - target) / stats.se_profit
        checks[spec.label] = {
            "profit": {"expected": target, "mean": stats.mean_profit, "se": stats.se_profit, "z": z,
                       "passed": abs(z) <= 3.0},
        }
        if args.rounds >= 10_000:
            checks[spec.label]["price"] = mean_price_check(config, expected[spec.role], spec).to_dict()
    ok = all(c["passed"] for entry in checks.values() for c in entry.values())
    out.json("simulate.json", {"model": model.value, "seed": args.seed, "report": report.to_dict(),
                               "checks": checks, "passed": ok})
    if args.format == "csv":
        labels = [s.label for s in oracle.sellers(model)]
        header = ["round"] + [f"price_{x}" for x in labels] + [f"profit_{x}" for x in labels]
        rows = ([i] + list(pr) + list(pf) for i, (pr, pf) in enumerate(zip(report.prices, report.profits)))
        out.csv("rounds.csv", header, rows)
    if not ok:
        print("simulated means deviate from the closed form by more than 3 SE", file=sys.stderr)
    return _params_payload(model, p), EXIT_OK if ok else EXIT_CHECK


def _threshold(p: MarketParams, model: Model) -> comparative.ThresholdResult:
    if model is Model.BENCHMARK:
        return comparative.find_threshold_benchmark(p)
    return comparative.find_threshold_competition(p)


def cmd_threshold(args, out: Artifacts):
    model, p = resolve_params(args)
    result = _threshold(p, model)
    grid = comparative.default_k_grid(p, args.points)
    pmap = comparative.premium_map(p, model, grid)
    mono = comparative.monotonicity_check(p, model, grid)
    out.json("threshold.json", {
        "threshold": result.to_dict(),
        "sign_changes": pmap.sign_changes(),
        "monotonicity": {**mono.__dict__, "passed": mono.passed},
    })
    if args.format == "csv":
        out.csv("premium_map.csv", ("k", "E_L", "E_H", "sign"), pmap.rows())
    return _params_payload(model, p), EXIT_OK


def cmd_sweep(args, out: Artifacts):
    model, p = resolve_params(args)
    result = comparative.sweep(points=args.points, seed=args.seed)
    grid = comparative.default_k_grid(p, args.grid)
    maps = {m: comparative.premium_map(p, m, grid) for m in Model}
    thresholds = {m.value: _threshold(p, m).to_dict() for m in Model}
    out.json("sweep.json", {
        "seed": args.seed,
        "points": args.points,
        "rejected_draws": result.rejected,
        "all_ordered": result.all_ordered,
        "violations": result.violations,
        "thresholds_at_params": thresholds,
        "rows": [row.to_dict() for row in result.rows],
    })
    if args.format == "csv":
        for m, pmap in maps.items():
            out.csv(f"premium_{m.value}.csv", ("k", "E_L", "E_H", "sign"), pmap.rows())
        header = ("u", "c", "r_L", "r_H", "k1_star", "k2_star", "ordered")
        out.csv("sweep.csv", header, [
            (r.params.u, r.params.c, r.params.r_L, r.params.r_H, r.k1.k_star, r.k2.k_star, r.ordered)
            for r in result.rows
        ])
    if not result.all_ordered:
        print(f"k1* < k2* fails for sweep rows {result.violations}", file=sys.stderr)
    return {"model": model.value, **p.as_dict(), "sweep_points": args.points}, (
        EXIT_OK if result.all_ordered else EXIT_CHECK)


def cmd_analyze(args, out: Artifacts):
    from . import empirics
    from .empirics.tables import analysis_tables

    if not args.input:
        raise InputError("analyze needs --input <csv>")
    keywords = {}
    if args.keywords:
        keywords = json.loads(Path(args.keywords).read_text(encoding="utf-8"))
        if not isinstance(keywords, dict):
            raise InputError("--keywords must hold a JSON object mapping product to keyword")
    try:
        ingested = empirics.ingest(args.input)
    except empirics.MissingColumn as exc:
        raise InputError(str(exc)) from exc
    config = empirics.CleanConfig(outlier_sd=args.outlier_sd, variant_keywords=keywords)
    kept, audit = empirics.clean(ingested.records, config)
    payload, tables = analysis_tables(kept)
    payload = {
        "input_rows": len(ingested.records) + len({d.row for d in ingested.diagnostics}),
        "diagnostics": [d.__dict__ for d in ingested.diagnostics],
        "audit": [a.__dict__ for a in audit],
        "kept": len(kept),
        **payload,
    }
    out.json("analysis.json", payload)
    if args.format == "csv":
        out.csv("audit.csv", ("rule", "row", "reason"), [(a.rule, a.row, a.reason) for a in audit])
        for name, (header, rows) in tables.items():
            out.csv(f"{name}.csv", header, rows)
    return {"input": str(args.input), "outlier_sd": args.outlier_sd, "keywords": keywords}, EXIT_OK


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
}


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reppricing", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON file with u, c, r_L, r_H, k, n and optionally model")
    common.add_argument("--figure", choices=sorted(FIGURE_PARAMS), help="preset parameter set")
    common.add_argument("--model", choices=[m.value for m in Model])
    for name in PARAM_NAMES:
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, type=float, default=None)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv also writes tabular artifacts next to the JSON report")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("equilibrium", parents=[common], help="closed-form equilibrium and CDF grid")
    p.add_argument("--grid", type=int, default=512, help="points per support (default 512)")
    p = sub.add_parser("verify", parents=[common], help="deviation certificates and oracle comparison")
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--oracle-tolerance", type=float, default=1e-6)
    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo market simulation")
    p.add_argument("--rounds", type=int, default=100_000)
    p = sub.add_parser("threshold", parents=[common], help="search-cost threshold and premium map")
    p.add_argument("--points", type=int, default=512, help="k-grid size (default 512)")
    p = sub.add_parser("sweep", parents=[common], help="randomised threshold-ordering sweep")
    p.add_argument("--points", type=int, default=100, help="number of admissible draws")
    p.add_argument("--grid", type=int, default=512, help="k-grid size of the premium maps")
    p = sub.add_parser("analyze", parents=[common], help="empirical pipeline on an offerings CSV")
    p.add_argument("--input", help="offerings CSV")
    p.add_argument("--keywords", help="JSON object mapping product to a required title keyword")
    p.add_argument("--outlier-sd", type=float, default=5.0)
    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.command != "sweep" and args.command != "analyze" and not (
        args.params or args.figure or any(getattr(args, n) is not None for n in PARAM_NAMES)
    ):
        print("error: give --params, --figure or inline parameter flags", file=sys.stderr)
        return EXIT_INVALID
    if args.command == "sweep" and not (args.params or args.figure or args.u is not None):
        args.figure = "fig1a"
    args.argv = argv
    started = time.perf_counter()
    try:
        out = Artifacts(Path(args.out))
        params, status = COMMANDS[args.command](args, out)
        out.finish(args, params, started, status)
        return status
    except ParameterError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
