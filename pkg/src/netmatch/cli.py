"""Command-line front end.

Exit codes: 0 affirmative, 1 negative verdict, 2 input or validation error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any

from . import analysis, capacity, codingdemo, routing
from .netmodel import DEFAULT_TOL, NetworkError, fmt_real, parse_network
from .setfn import (
    SetFunction,
    SetFunctionError,
    parse_pmf,
    subset_label,
)

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

NOTES = {
    "tau": "verdicts compare against the channel capacities themselves; the tau-margin "
    "of the operational definition is not modeled",
    "separability": "separability is tested as R_SW meeting every C_t (one common rate point)",
}


class InputError(Exception):
    pass


# -- report plumbing ---------------------------------------------------------


def normalize(obj: Any) -> Any:
    """Round floats to 12 significant digits and turn tuples into lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(fmt_real(obj)) + 0.0
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    return normalize(float(obj))


def render_json(report: dict) -> str:
    return json.dumps(normalize(report), indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> dict:
    return json.loads(text)


def _read(path: str) -> tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _table(f: SetFunction) -> list[dict]:
    return [{"subset": "{" + ",".join(S) + "}", "value": v} for S, v in f.table()]


def _region(r: analysis.Region, vertices: bool) -> dict:
    out: dict[str, Any] = {
        "rates": list(r.ground),
        "constraints": [
            {"subset": subset_label(r.ground, c.mask), "kind": c.kind, "value": c.value}
            for c in r.constraints
        ],
        "text": r.describe(),
    }
    if vertices and len(r.ground) == 2:
        out["vertices"] = [list(v) for v in analysis.region_vertices_2d(r)]
    return out


def _margins(v: analysis.Verdict) -> list[dict]:
    return [
        {
            "subset": subset_label(v.ground, m.subset),
            "entropy": m.lhs,
            "capacity": m.rhs,
            "slack": m.slack,
        }
        for m in v.margins
    ]


# -- text rendering ----------------------------------------------------------


def _num(x) -> str:
    return fmt_real(x) if isinstance(x, float) else str(x)


def render_text(report: dict) -> str:
    lines = []

    def emit(key, value, indent=0):
        pad = "  " * indent
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            for k, v in value.items():
                emit(k, v, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            cols = list(value[0].keys())
            lines.append(pad + "  " + " | ".join(cols))
            for row in value:
                lines.append(pad + "  " + " | ".join(_num(row.get(c, "")) for c in cols))
        elif isinstance(value, list) and not value:
            lines.append(f"{pad}{key}: (none)")
        elif isinstance(value, list):
            if all(isinstance(v, str) for v in value):
                lines.append(f"{pad}{key}:")
                lines.extend(f"{pad}  {v}" for v in value)
            else:
                lines.append(f"{pad}{key}: " + ", ".join(
                    "(" + ", ".join(map(_num, v)) + ")" if isinstance(v, list) else _num(v)
                    for v in value))
        else:
            lines.append(f"{pad}{key}: {_num(value)}")

    for k, v in report.items():
        emit(k, v)
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> tuple[dict, int]:
    text, digest = _read(args.network)
    report: dict[str, Any] = {"command": "validate", "inputs": {args.network: digest}}
    try:
        net = parse_network(text)
    except NetworkError as exc:
        report["valid"] = False
        report["error"] = str(exc)
        return report, EXIT_INPUT
    report["valid"] = True
    report["nodes"] = len(net.nodes)
    report["edges"] = len(net.edges)
    report["sources"] = list(net.sources)
    report["sinks"] = list(net.sinks)
    return report, EXIT_OK


def _load_net(path):
    text, digest = _read(path)
    try:
        return parse_network(text), digest
    except NetworkError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_pmf(path):
    text, digest = _read(path)
    try:
        return parse_pmf(text), digest
    except (SetFunctionError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_check(args) -> tuple[dict, int]:
    net, d1 = _load_net(args.network)
    pmf, d2 = _load_pmf(args.pmf)
    tol = args.tol
    try:
        main = analysis.check_transmissible(net, pmf, tol)
        cond2 = analysis.check_condition2(net, pmf, tol)
        sep = analysis.check_separable(net, pmf, tol)
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    sinks = {}
    for t, v in cond2.per_sink.items():
        sinks[t] = {
            "nonempty": v.decision,
            "violator": v.violator_label,
            "witness": list(v.witness.rates) if v.witness else None,
        }
    report = {
        "command": "check",
        "inputs": {args.network: d1, args.pmf: d2},
        "tolerance": tol,
        "transmissible": main.decision,
        "violator": main.violator_label,
        "margins": _margins(main),
        "per_sink_condition": {"decision": cond2.decision, "sinks": sinks},
        "separability": {
            "decision": sep.decision,
            "witness": list(sep.witness.rates) if sep.witness else None,
        },
        "notes": [NOTES["tau"], NOTES["separability"]],
    }
    return report, EXIT_OK if main.decision else EXIT_NO


def cmd_region(args) -> tuple[dict, int]:
    net, d1 = _load_net(args.network)
    inputs = {args.network: d1}
    try:
        if args.kind == "independent":
            r = analysis.independent_capacity_region(net)
        elif args.kind == "ct":
            if not args.arg:
                raise InputError("region ct needs a sink name")
            r = analysis.region_Ct(net, args.arg)
        else:
            if not args.arg:
                raise InputError("region sw needs a distribution file")
            pmf, d2 = _load_pmf(args.arg)
            inputs[args.arg] = d2
            if tuple(pmf.sources) != tuple(net.sources):
                raise InputError("distribution sources do not match the network")
            r = analysis.region_SW(pmf)
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    report = {
        "command": "region",
        "kind": args.kind if not args.arg else f"{args.kind} {args.arg}",
        "inputs": inputs,
        "tolerance": args.tol,
        "region": _region(r, args.vertices),
    }
    return report, EXIT_OK


def _rates(text: str | None):
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"bad --rates value {text!r}") from None
    if any(v < 0 for v in vals):
        raise InputError("rates must be nonnegative")
    return vals


def cmd_routing(args) -> tuple[dict, int]:
    net, d1 = _load_net(args.network)
    rates = _rates(args.rates)
    report: dict[str, Any] = {
        "command": "routing",
        "kind": args.kind,
        "inputs": {args.network: d1},
        "tolerance": args.tol,
    }
    code = EXIT_OK
    try:
        if args.kind in (routing.MA, routing.BC):
            reg = routing.ma_region(net) if args.kind == routing.MA else routing.bc_region(net)
            report["rho"] = _table(reg.rho)
            report["sigma"] = _table(reg.sigma)
            report["circulation_exists"] = bool(
                reg.base_feasible
                and all(
                    reg.sigma.values[m] <= reg.rho.values[m] + args.tol
                    for m in range(1, 1 << reg.rho.p)
                )
            )
            report["region"] = reg.describe()
            if rates is not None:
                if len(rates) != reg.rho.p:
                    raise InputError(f"expected {reg.rho.p} rates")
                inside = reg.contains(rates, args.tol)
                report["rates"] = rates
                report["routable"] = inside
                code = EXIT_OK if inside else EXIT_NO
        else:
            reg = routing.interference_necessary_region(net, None, args.tol)
            report["pairs"] = [list(p) for p in net.pairs]
            report["necessary_region"] = reg.render()
            report["note"] = "necessary condition only; exact test needs --rates"
            if rates is not None:
                verdict = routing.interference_routing_feasible(net, None, rates, args.tol)
                report["rates"] = rates
                report["in_necessary_region"] = reg.contains(rates, args.tol)
                report["routable"] = verdict.feasible
                report["witness"] = [
                    {"pair": i + 1, "path": "->".join(p), "flow": f} for i, p, f in verdict.paths
                ]
                code = EXIT_OK if verdict.feasible else EXIT_NO
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    return report, code


def cmd_simulate(args) -> tuple[dict, int]:
    if args.scheme == "butterfly":
        rows = []
        ok = True
        for x1 in (0, 1):
            for x2 in (0, 1):
                out = codingdemo.butterfly_run(x1, x2)
                good = all(v == (x1, x2) for v in out.values())
                ok &= good
                rows.append({
                    "x1": x1, "x2": x2,
                    "t1": "".join(map(str, out["t1"])),
                    "t2": "".join(map(str, out["t2"])),
                    "correct": good,
                })
        return {"command": "simulate", "scheme": "butterfly", "runs": rows}, EXIT_OK if ok else EXIT_NO
    try:
        m = args.m if args.m is not None else codingdemo.rate_rule(args.n, args.p, args.rate_offset)
        exp = codingdemo.km_experiment(args.n, args.p, m, args.trials, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = {
        "command": "simulate",
        "scheme": "km",
        "generator": exp.generator,
        "decoder": "minimum-weight coset member (maximum likelihood for p < 1/2)",
        "records": [{
            "n": exp.n, "p": exp.p, "m": exp.m, "trials": exp.trials, "seed": exp.seed,
            "error_rate": exp.error_rate,
            "failures": ", ".join(f"{k}={v}" for k, v in exp.failures_by_cause.items()) or "none",
        }],
    }
    return report, EXIT_OK


def cmd_dmc(args) -> tuple[dict, int]:
    text, digest = _read(args.channel)
    try:
        W = capacity.parse_channel(text)
    except ValueError as exc:
        raise InputError(f"{args.channel}: {exc}") from None
    res = capacity.dmc_capacity(W, args.tol)
    return {
        "command": "dmc",
        "inputs": {args.channel: digest},
        "tolerance": args.tol,
        "capacity_bits": res.capacity,
        "upper_bound": res.upper_bound,
        "iterations": res.iterations,
        "input_distribution": list(res.input_distribution),
    }, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--timing", action="store_true", help="append wall-clock time")

    ap = argparse.ArgumentParser(prog="netmatch", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a network file")
    p.add_argument("network")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", parents=[common], help="transmissibility of a source over a network")
    p.add_argument("network")
    p.add_argument("pmf")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", parents=[common], help="rate regions")
    p.add_argument("network")
    p.add_argument("kind", choices=["independent", "ct", "sw"])
    p.add_argument("arg", nargs="?", help="sink name for ct, distribution file for sw")
    p.add_argument("--vertices", action="store_true")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("routing", parents=[common], help="routing capacity regions")
    p.add_argument("network")
    p.add_argument("kind", choices=[routing.MA, routing.BC, routing.INTERFERENCE])
    p.add_argument("--rates", help="comma-separated rate point")
    p.set_defaults(func=cmd_routing)

    p = sub.add_parser("simulate", parents=[common], help="run a coding scheme")
    p.add_argument("scheme", choices=["butterfly", "km"])
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--m", type=int)
    p.add_argument("--rate-offset", type=float, default=0.15,
                   help="m = ceil(n (h(p) + offset)) when --m is not given")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dmc", parents=[common], help="capacity of a discrete memoryless channel")
    p.add_argument("channel")
    p.set_defaults(func=cmd_dmc)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        report["seconds"] = time.perf_counter() - start
    out = render_json(report) if args.json else render_text(normalize(report))
    sys.stdout.write(out)
    if code == EXIT_INPUT and "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
