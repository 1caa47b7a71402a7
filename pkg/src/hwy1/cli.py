"""Command-line entry point ``hwy1``.

Exit codes: 0 success, 1 infeasible input or negative decision, 2 usage or
input-format error, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import oracles
from .dpsolvers import Infeasible, WidthBudgetExceeded, steiner_exact_td, tsp_exact_td
from .fptas import NotCertified, fptas_steiner, fptas_tsp
from .graph import Graph, GraphFormatError, all_pairs, cost_str, format_graph, parse_graph
from .reductions import DecodeError, DimacsError, decide_stp, decide_tsp, gen_stp, gen_tsp, parse_dimacs
from .spcover import Hd1Certificate, check_witness, verify_hd1, verify_spc
from .structure import InternalInconsistency, build_hierarchy, compute_net, interface_points, net_invariants
from .treedecomp import build_decomposition, heuristic_decomposition, make_nice, validate_decomposition

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return value


def _terminal_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad terminal list {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _graph(args) -> Graph:
    g = parse_graph(_read(args.input))
    if g.n == 0:
        raise UsageError("graph has no vertices")
    return g


def _certified(g: Graph):
    d = all_pairs(g, allow_disconnected=True)
    if not d.connected():
        raise Infeasible("graph is disconnected")
    cert = verify_hd1(g, d)
    return cert, d


def _fs(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# --- commands ----------------------------------------------------------------

def cmd_verify_hd1(args, out):
    g = _graph(args)
    cert, d = _certified(g)
    if isinstance(cert, Hd1Certificate):
        payload = {"result": "certificate", "certificate": cert.to_json()}
        text = f"highway dimension 1: certified over {len(cert.scales)} critical scales"
        code = EXIT_OK
    else:
        payload = {"result": "witness", "witness": cert.to_json(), "witness_checked": check_witness(g, cert, d)}
        text = f"not highway dimension 1: no single hub at r = {cert.scale} for pairs {list(cert.pairs)}"
        code = EXIT_NEGATIVE
    return code, payload, text


def cmd_spc(args, out):
    g = _graph(args)
    if args.r is None or args.r <= 0:
        raise UsageError("spc needs a positive --r")
    cert, d = _certified(g)
    if not isinstance(cert, Hd1Certificate):
        return EXIT_NEGATIVE, {"r": _fs(args.r), "hubs": [], "valid": False}, "graph is not certified"
    r = args.r * g.unit
    hubs = sorted(cert.hub_set(r))
    valid = verify_spc(g, r, hubs, 1, d)
    return EXIT_OK, {"r": _fs(args.r), "hubs": hubs, "valid": valid}, f"hubs at r = {args.r}: {hubs}"


def _need_cert(g):
    cert, d = _certified(g)
    if not isinstance(cert, Hd1Certificate):
        raise NotCertified(f"graph is not highway dimension 1 (witness at r = {cert.scale})")
    return cert, d


def cmd_hierarchy(args, out):
    g = _graph(args)
    cert, d = _need_cert(g)
    h = build_hierarchy(g, cert, d)
    payload = h.to_json()
    for lvl in payload["levels"]:
        for comp in lvl["components"]:
            iface = interface_points(h, cert, lvl["level"], comp["id"])
            comp["interface"] = [
                {"level": j, "hub": u, "dist": cost_str(dc, g.unit)} for j, u, dc in iface.points
            ]
    text = f"{h.top + 1} levels, alpha = {h.alpha}"
    return EXIT_OK, payload, text


def cmd_net(args, out):
    g = _graph(args)
    if args.r is None or args.r <= 0:
        raise UsageError("net needs a positive --r")
    d = all_pairs(g)
    net = compute_net(g, args.r * g.unit, d)
    payload = net.to_json()
    payload["r"] = _fs(args.r)
    payload["invariants"] = net_invariants(g, net, d)
    return EXIT_OK, payload, f"{len(net.points)} net points: {list(net.points)}"


def cmd_treedecomp(args, out):
    g = _graph(args)
    cert, d = _need_cert(g)
    td = build_decomposition(build_hierarchy(g, cert, d), cert)
    ok, problems = validate_decomposition(g, td)
    payload = td.to_json()
    payload["valid"] = ok
    if args.nice:
        nice = make_nice(td)
        payload["nice_nodes"] = len(nice)
    return EXIT_OK, payload, f"{len(td)} bags, width {td.width}, valid={ok}"


def _decomposition(g: Graph):
    d = all_pairs(g, allow_disconnected=True)
    if d.connected():
        cert = verify_hd1(g, d)
        if isinstance(cert, Hd1Certificate):
            return build_decomposition(build_hierarchy(g, cert, d), cert), "level-components"
    return heuristic_decomposition(g), "min-fill-in"


def _terminals(args, g: Graph) -> list[int]:
    R = args.terminals if args.terminals is not None else sorted(g.terminals)
    if not R:
        raise UsageError("no terminals: pass --terminals or add 't' lines")
    if any(not 0 <= t < g.n for t in R):
        raise UsageError("terminal out of range")
    return R


def _solution(solver, cost, unit, width=None, tour=None, edges=None):
    payload = {"solver": solver, "cost": cost_str(cost, unit), "width": width}
    if tour is not None:
        payload["tour"] = list(tour)
    if edges is not None:
        payload["edges"] = [list(e) for e in edges]
    return payload


def cmd_solve_tsp(args, out):
    g = _graph(args)
    td, how = _decomposition(g)
    sol = tsp_exact_td(g, td, args.max_bag)
    payload = _solution(f"tree-decomposition DP ({how})", sol.cost, g.unit, td.width, tour=sol.walk)
    return EXIT_OK, payload, f"cost {payload['cost']}: {' '.join(map(str, sol.walk))}"


def cmd_solve_steiner(args, out):
    g = _graph(args)
    R = _terminals(args, g)
    td, how = _decomposition(g)
    sol = steiner_exact_td(g, R, td, args.max_bag)
    payload = _solution(f"tree-decomposition DP ({how})", sol.cost, g.unit, td.width, edges=sol.edges)
    return EXIT_OK, payload, f"cost {payload['cost']}: {list(sol.edges)}"


def _write_trace(args, report):
    if args.trace:
        Path(args.trace).write_text(json.dumps(report.to_json(), indent=2) + "\n")


def cmd_fptas_tsp(args, out):
    g = _graph(args)
    sol, rep = fptas_tsp(g, args.eps, args.max_bag)
    _write_trace(args, rep)
    payload = {
        "solution": _solution("fptas", sol.cost, g.unit, rep.projected_width, tour=sol.walk),
        "report": rep.to_json(),
    }
    return EXIT_OK, payload, f"cost {cost_str(sol.cost, g.unit)} (bootstrap {cost_str(rep.bootstrap_cost, g.unit)})"


def cmd_fptas_steiner(args, out):
    g = _graph(args)
    R = _terminals(args, g)
    sol, rep = fptas_steiner(g, R, args.eps, args.max_bag)
    _write_trace(args, rep)
    payload = {
        "solution": _solution("fptas", sol.cost, g.unit, rep.projected_width, edges=sol.edges),
        "report": rep.to_json(),
    }
    return EXIT_OK, payload, f"cost {cost_str(sol.cost, g.unit)} (bootstrap {cost_str(rep.bootstrap_cost, g.unit)})"


def _emit_reduction(args, red, kind):
    text = format_graph(red.graph, f"{kind} reduction, threshold {red.threshold}")
    side = red.sidecar()
    side["n"] = red.graph.n
    side["m"] = red.graph.m
    if args.out:
        Path(args.out).write_text(text)
        Path(args.sidecar or args.out + ".json").write_text(json.dumps(side, indent=2) + "\n")
        msg = f"wrote {args.out} ({red.graph.n} vertices), threshold {red.threshold}"
    else:
        msg = text.rstrip("\n")
    return EXIT_OK, side, msg


def cmd_gen_stp(args, out):
    return _emit_reduction(args, gen_stp(parse_dimacs(_read(args.input))), "steiner")


def cmd_gen_tsp(args, out):
    f = parse_dimacs(_read(args.input))
    try:
        red = gen_tsp(f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _emit_reduction(args, red, "tsp")


def _decision(dec, cost, threshold, unit=1):
    payload = {
        "satisfiable": dec.satisfiable,
        "cost": cost_str(cost, unit),
        "threshold": cost_str(threshold, unit),
        "assignment": list(dec.assignment) if dec.assignment is not None else None,
        "undetermined": list(dec.undetermined),
    }
    if dec.satisfiable:
        model = " ".join(str(i) if v else str(-i) for i, v in enumerate(dec.assignment, 1))
        text = f"SAT (optimum {cost} <= {threshold}): {model}"
    else:
        text = f"UNSAT (optimum {cost} > {threshold})"
    return (EXIT_OK if dec.satisfiable else EXIT_NEGATIVE), payload, text


def cmd_decide_stp(args, out):
    red = gen_stp(parse_dimacs(_read(args.input)))
    g = red.graph
    if args.solver == "oracle":
        sol = oracles.dreyfus_wagner_steiner(g, g.terminals)
    else:
        td, _ = _decomposition(g)
        sol = steiner_exact_td(g, g.terminals, td, args.max_bag)
    return _decision(decide_stp(red, sol), sol.cost, red.threshold)


def cmd_decide_tsp(args, out):
    f = parse_dimacs(_read(args.input))
    try:
        red = gen_tsp(f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.solver == "oracle":
        sol = oracles.exact_tsp(red.graph)
    else:
        sol = tsp_exact_td(red.graph, heuristic_decomposition(red.graph), args.max_bag)
    return _decision(decide_tsp(red, sol), sol.cost, red.threshold)


def cmd_oracle_tsp(args, out):
    g = _graph(args)
    sol = oracles.exact_tsp(g)
    solver = "held-karp" if g.n <= oracles._cap("held_karp") else "milp"
    payload = _solution(solver, sol.cost, g.unit, tour=sol.walk)
    return EXIT_OK, payload, f"cost {payload['cost']}: {' '.join(map(str, sol.walk))}"


def cmd_oracle_steiner(args, out):
    g = _graph(args)
    R = _terminals(args, g)
    sol = oracles.dreyfus_wagner_steiner(g, R)
    payload = _solution("dreyfus-wagner", sol.cost, g.unit, edges=sol.edges)
    return EXIT_OK, payload, f"cost {payload['cost']}: {list(sol.edges)}"


def cmd_oracle_hd(args, out):
    g = _graph(args)
    h = oracles.exact_highway_dimension(g, args.h_max)
    payload = {"highway_dimension": h, "h_max": args.h_max, "exceeds": h is None}
    text = f"highway dimension {h}" if h is not None else f"highway dimension exceeds {args.h_max}"
    return EXIT_OK, payload, text


def cmd_gen_corpus(args, out):
    seed = args.seed if args.seed is not None else 0
    items, manifest = oracles.gen_corpus(args.count, seed, args.max_n)
    if args.out:
        root = Path(args.out)
        root.mkdir(parents=True, exist_ok=True)
        for (params, g, _), entry in zip(items, manifest):
            name = f"hd1_{params.seed:05d}.graph"
            (root / name).write_text(format_graph(g, f"seed {params.seed}"))
            entry["file"] = name
        (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK, manifest, f"{len(manifest)} certified instances"


COMMANDS = {
    "verify-hd1": (cmd_verify_hd1, "certify highway dimension 1 or print a witness"),
    "spc": (cmd_spc, "hubs of the certified cover at scale --r"),
    "hierarchy": (cmd_hierarchy, "level components and interface points"),
    "net": (cmd_net, "net at radius --r and its invariants"),
    "treedecomp": (cmd_treedecomp, "level-component tree decomposition"),
    "solve-tsp": (cmd_solve_tsp, "exact TSP by tree-decomposition DP"),
    "solve-steiner": (cmd_solve_steiner, "exact Steiner tree by tree-decomposition DP"),
    "fptas-tsp": (cmd_fptas_tsp, "(1+eps)-approximate TSP"),
    "fptas-steiner": (cmd_fptas_steiner, "(1+eps)-approximate Steiner tree"),
    "gen-stp": (cmd_gen_stp, "Steiner instance from a DIMACS CNF"),
    "gen-tsp": (cmd_gen_tsp, "TSP instance from a (<=3,3) DIMACS CNF"),
    "decide-stp": (cmd_decide_stp, "decide a CNF through the Steiner reduction"),
    "decide-tsp": (cmd_decide_tsp, "decide a CNF through the TSP reduction"),
    "oracle-tsp": (cmd_oracle_tsp, "brute-force TSP (Held-Karp, MILP above its cap)"),
    "oracle-steiner": (cmd_oracle_steiner, "brute-force Steiner tree (Dreyfus-Wagner)"),
    "oracle-hd": (cmd_oracle_hd, "exact highway dimension by branch and bound"),
    "gen-corpus": (cmd_gen_corpus, "certified random instances plus manifest"),
}

_NO_INPUT = {"gen-corpus"}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--json", action="store_true", help="print machine-readable JSON")
    shared.add_argument("--seed", type=int, default=None)
    shared.add_argument("--eps", type=_fraction, default=Fraction(1, 10), help="rational, e.g. 1/10")
    shared.add_argument("--out", default=None, help="output path")
    shared.add_argument("--threads", type=int, default=1, help="accepted for scripting; results never depend on it")
    parser = argparse.ArgumentParser(prog="hwy1", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[shared], help=help_text)
        if name not in _NO_INPUT:
            p.add_argument("input", help="graph file, or DIMACS CNF for gen-/decide- commands")
        if name in ("spc", "net"):
            p.add_argument("--r", type=_fraction, default=None, help="scale, rational")
        if name in ("solve-steiner", "fptas-steiner", "oracle-steiner"):
            p.add_argument("--terminals", type=_terminal_list, default=None, help="comma-separated ids")
        if name.startswith(("solve-", "fptas-", "decide-")):
            p.add_argument("--max-bag", type=int, default=12, help="abort when a DP bag exceeds this size")
        if name.startswith("fptas-"):
            p.add_argument("--trace", default=None, help="write the run report JSON here")
        if name.startswith("decide-"):
            p.add_argument("--solver", choices=("dp", "oracle"), default="oracle")
        if name.startswith("gen-") and name != "gen-corpus":
            p.add_argument("--sidecar", default=None, help="sidecar JSON path (default: OUT.json)")
        if name == "treedecomp":
            p.add_argument("--nice", action="store_true")
        if name == "oracle-hd":
            p.add_argument("--h-max", type=int, default=4)
        if name == "gen-corpus":
            p.add_argument("--count", type=int, default=100)
            p.add_argument("--max-n", type=int, default=40)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "eps", None) is not None and args.eps <= 0:
        print("error: --eps must be positive", file=stderr)
        return EXIT_USAGE
    handler = COMMANDS[args.command][0]
    try:
        code, payload, text = handler(args, stdout)
    except (UsageError, GraphFormatError, DimacsError, oracles.OracleCapExceeded) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except (Infeasible, NotCertified) as exc:
        print(f"negative: {exc}", file=stderr)
        return EXIT_NEGATIVE
    except (InternalInconsistency, DecodeError, WidthBudgetExceeded) as exc:
        print(f"internal: {exc}", file=stderr)
        return EXIT_INTERNAL
    if args.json:
        print(json.dumps(payload, indent=2), file=stdout)
    else:
        print(text, file=stdout)
    return code


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
