"""Command line driver.

Subcommands consume one JSON problem config and emit a JSON report
(and, for solve, a delimited trace).  Reports are byte-identical for
identical (config, seed): keys are sorted and no timestamps are
recorded.  Exit status: 0 for pass/converged, 1 for a checked failure
(report still written), 2 for config or evaluation errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import sys
from importlib import resources

from .extreal import as_extreal, parse_extreal
from .operators import EvaluationError, catalog_operator, estimate_contraction
from .oracle import FiniteInstance, OracleMismatch, cross_check, engineered_instance
from .product import lift_space, ordered_space
from .serialize import fmt_csv_value, jsonable
from .solver import (
    PreconditionFailed,
    SolveConfig,
    check_hypotheses,
    probe_component_equality,
    probe_uniqueness_bridged,
    probe_uniqueness_comparable,
    solve,
)
from .spaces import BadParams, builtin_d3_trials, check_d1, check_d2, check_d3

TRACE_COLUMNS = ("n", "x_n", "y_n", "step_dplus", "residual")


class ConfigError(ValueError):
    """Invalid config content; message names the offending key."""


def bundled_config_path() -> str:
    return str(resources.files("coupledfix.data") / "dislocated_mix.json")


def load_config(path: str, overrides: list[str]) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends through non-object {part!r}")
        node[parts[-1]] = value
    return cfg


def _point(cfg_value, key: str) -> float:
    try:
        if isinstance(cfg_value, str):
            return parse_extreal(cfg_value)
        return as_extreal(cfg_value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: {exc}")


def _pair(cfg_value, key: str) -> tuple:
    if not isinstance(cfg_value, (list, tuple)) or len(cfg_value) != 2:
        raise ConfigError(f"{key} must be a two-element list")
    return (_point(cfg_value[0], f"{key}[0]"), _point(cfg_value[1], f"{key}[1]"))


def _space_section(cfg: dict):
    section = cfg.get("space")
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigError("space: must be an object with a 'kind'")
    kind = section["kind"]
    params = section.get("params", {})
    try:
        return kind, ordered_space(kind, **params)
    except BadParams as exc:
        raise ConfigError(f"space: {exc}")


def _operator_section(cfg: dict, kind: str):
    section = cfg.get("operator")
    if not isinstance(section, dict) or "name" not in section:
        raise ConfigError("operator: must be an object with a 'name'")
    try:
        op = catalog_operator(section["name"], section.get("params", {}))
    except (BadParams, KeyError) as exc:
        raise ConfigError(f"operator: {exc}")
    if kind == "finite_discrete" and section["name"] != "table":
        raise ConfigError("operator: finite_discrete spaces take the 'table' operator")
    return op

def _start_section(cfg: dict, kind: str) -> tuple:
    section = cfg.get("start")
    if not isinstance(section, dict) or "x0" not in section or "y0" not in section:
        raise ConfigError("start: must be an object with x0 and y0")
    if kind == "finite_discrete":
        return int(section["x0"]), int(section["y0"])
    return _point(section["x0"], "start.x0"), _point(section["y0"], "start.y0")


def _solve_config(cfg: dict) -> SolveConfig:
    section = dict(cfg.get("solve", {}))
    section.setdefault("seed", cfg.get("seed", 0))
    try:
        return SolveConfig(**section)
    except TypeError as exc:
        raise ConfigError(f"solve: {exc}")
    except BadParams as exc:
        raise ConfigError(f"solve: {exc}")


def write_report(payload: dict, path: str | None) -> None:
    text = json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_trace(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in rows:
            writer.writerow([fmt_csv_value(row[c]) for c in TRACE_COLUMNS])


def read_trace(path: str) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                {
                    "n": int(rec["n"]),
                    "x_n": parse_extreal(rec["x_n"]),
                    "y_n": parse_extreal(rec["y_n"]),
                    "step_dplus": parse_extreal(rec["step_dplus"]) if rec["step_dplus"] else None,
                    "residual": parse_extreal(rec["residual"]) if rec["residual"] else None,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# Subcommands


def cmd_axioms(cfg: dict, args) -> tuple[dict, bool]:
    kind, ordered = _space_section(cfg)
    section = cfg.get("axioms", {})
    samples = int(section.get("samples", 2000))
    trial_count = int(section.get("d3_trials", 20))
    seed = int(cfg.get("seed", 0))
    space = ordered.base
    n = cfg.get("space", {}).get("params", {}).get("n")
    trials = builtin_d3_trials(kind, trial_count, seed + 2, n=n)
    checks = [
        check_d1(space, samples, seed),
        check_d2(space, samples, seed + 1),
        check_d3(space, trials, horizon=64),
    ]
    product = cfg.get("product")
    if product:
        lifted = lift_space(space, product)
        pair_trials = [
            ((list(zip(p1, p2))), (l1, l2), (y1, y2))
            for (p1, l1, y1), (p2, l2, y2) in zip(
                builtin_d3_trials(kind, trial_count, seed + 3, n=n),
                builtin_d3_trials(kind, trial_count, seed + 4, n=n),
            )
        ]
        checks += [
            check_d1(lifted, samples, seed + 5),
            check_d2(lifted, samples, seed + 6),
            check_d3(lifted, pair_trials, horizon=64),
        ]
    ok = all(c.passed for c in checks)
    return {"space": space.name, "checks": [c.to_json() for c in checks]}, ok


def cmd_hypotheses(cfg: dict, args) -> tuple[dict, bool]:
    kind, ordered = _space_section(cfg)
    op = _operator_section(cfg, kind)
    x0, y0 = _start_section(cfg, kind)
    scfg = _solve_config(cfg)
    rep = check_hypotheses(ordered, op, x0, y0, scfg)
    return {"hypotheses": rep.to_json(), "operator": op.description}, rep.all_ok


def cmd_solve(cfg: dict, args) -> tuple[dict, bool]:
    kind, ordered = _space_section(cfg)
    op = _operator_section(cfg, kind)
    x0, y0 = _start_section(cfg, kind)
    scfg = _solve_config(cfg)
    rep = solve(ordered, op, x0, y0, scfg)
    outputs = cfg.get("outputs", {})
    trace_path = args.out_trace or outputs.get("trace")
    if trace_path:
        write_trace(rep.trace_rows(), trace_path)
    payload = {"solve": rep.to_json(), "operator": op.description, "space": ordered.base.name}
    figures_dir = args.out_figures or outputs.get("figures")
    if figures_dir:
        from .figures import render_solve_figures

        paths = render_solve_figures(payload["solve"], rep.trace_rows(), figures_dir)
        payload["figures"] = paths
    if rep.status == "evaluation_error":
        raise EvaluationError(rep.detail or "operator evaluation failed")
    return payload, rep.status == "converged"


def cmd_probe(cfg: dict, args) -> tuple[dict, bool]:
    kind, ordered = _space_section(cfg)
    op = _operator_section(cfg, kind)
    scfg = _solve_config(cfg)
    section = cfg.get("probe")
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigError("probe: must be an object with a 'kind'")
    pkind = section["kind"]

    def pair_of(key: str) -> tuple:
        pr = _pair(section.get(key.split(".")[-1]), key)
        if kind == "finite_discrete":
            return (int(pr[0]), int(pr[1]))
        return pr

    try:
        if pkind == "uniqueness_comparable":
            rep = probe_uniqueness_comparable(ordered, op, pair_of("probe.p"), pair_of("probe.q"), scfg)
        elif pkind == "uniqueness_bridged":
            rep = probe_uniqueness_bridged(
                ordered, op, pair_of("probe.p"), pair_of("probe.q"), pair_of("probe.bridge"), scfg
            )
        elif pkind == "component_equality":
            start = section.get("start")
            rep = probe_component_equality(
                ordered,
                op,
                pair_of("probe.fp"),
                scfg,
                start=pair_of("probe.start") if start is not None else None,
            )
        else:
            raise ConfigError(f"probe.kind: unknown probe {pkind!r}")
    except PreconditionFailed as exc:
        return {"probe": {"kind": pkind, "verdict": "precondition_failed", "detail": {"reason": str(exc)}}}, False
    ok = rep.verdict in ("same", "equal")
    return {"probe": rep.to_json()}, ok


def cmd_oracle(cfg: dict, args) -> tuple[dict, bool]:
    section = cfg.get("oracle", {})
    scfg = _solve_config(cfg)
    instances = []
    if "instance_path" in section:
        try:
            instances.append(("file", FiniteInstance.load(section["instance_path"])))
        except OSError as exc:
            raise ConfigError(f"oracle.instance_path: {exc}")
    else:
        count = int(section.get("count", 25))
        seed0 = int(section.get("seed", cfg.get("seed", 0)))
        for s in range(seed0, seed0 + count):
            instances.append((f"seed {s}", engineered_instance(s)))
    results = []
    ok = True
    for label, inst in instances:
        try:
            rep = cross_check(inst, scfg)
            results.append({"instance": label, "report": rep.to_json()})
        except OracleMismatch as exc:
            ok = False
            results.append({"instance": label, "mismatch": str(exc)})
    return {"oracle": {"instances": len(instances), "results": results}}, ok


def cmd_report(cfg: dict, args) -> tuple[dict, bool]:
    if not args.report_path or not args.trace_path:
        raise ConfigError("report: needs --report and --trace paths from a previous solve")
    with open(args.report_path) as fh:
        solve_payload = json.load(fh)
    rows = read_trace(args.trace_path)
    from .figures import render_solve_figures

    outdir = args.out_figures or "figures"
    paths = render_solve_figures(solve_payload.get("solve", solve_payload), rows, outdir)
    return {"figures": paths, "rows": len(rows)}, True


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coupledfix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("axioms", True),
        ("hypotheses", True),
        ("solve", True),
        ("probe", True),
        ("oracle", True),
        ("report", False),
    ):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True, help="problem config JSON")
            p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="dotted-path override")
            p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out-report", default=None, help="report JSON path (default stdout)")
        p.add_argument("--out-trace", default=None, help="trace CSV path (solve only)")
        p.add_argument("--out-figures", default=None, help="directory for rendered figures")
        if name == "report":
            p.add_argument("--report", dest="report_path", help="solve report JSON to render")
            p.add_argument("--trace", dest="trace_path", help="solve trace CSV to render")
    return parser


HANDLERS = {
    "axioms": cmd_axioms,
    "hypotheses": cmd_hypotheses,
    "solve": cmd_solve,
    "probe": cmd_probe,
    "oracle": cmd_oracle,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg: dict = {}
    try:
        if getattr(args, "config", None):
            cfg = load_config(args.config, args.set)
            if args.seed is not None:
                cfg["seed"] = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result, ok = HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (BadParams, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "subcommand": args.command,
        "seed": cfg.get("seed", 0),
        "config": copy.deepcopy(cfg),
        "result": result,
        "pass": ok,
    }
    outputs = cfg.get("outputs")
    default_report = outputs.get("report") if isinstance(outputs, dict) else None
    write_report(payload, args.out_report or default_report)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
