"""``auctionmatch`` command line: gen, solve, verify, oracle, bench.

Exit codes: 0 success, 1 infeasible instance or violations found,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence, TextIO

from . import audit
from .auction import SolverConfig, solve
from .bench import ExperimentSpec, run_experiment, write_csv
from .formats import format_result, format_trace, parse_matching
from .graph import GeneratorSpec, InvalidSpecError, ParseError, format_weight, generate, parse, serialize
from .oracle import BRUTE_FORCE_LIMIT, InfeasibleError, brute_force, exact, hungarian

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Largest instance the --audit epsilon check hands to the Hungarian oracle.
AUDIT_ORACLE_LIMIT = 300

KINDS = {"k-regular": "k_left_regular", "complete": "complete"}


class UsageError(Exception):
    pass


def _weights(text: str) -> tuple[float, float, bool]:
    parts = text.split(":")
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != "int"):
        raise argparse.ArgumentTypeError("expected lo:hi or lo:hi:int")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight range {text!r}") from None
    return lo, hi, len(parts) == 3


def _u64(text: str) -> int:
    x = int(text)
    if not 0 <= x < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return x


def _positive(text: str) -> float:
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return x


def _list(conv):
    def parse_list(text: str):
        return tuple(conv(t) for t in text.split(",") if t)
    return parse_list


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="auctionmatch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random graph")
    g.add_argument("--kind", choices=sorted(KINDS), default="k-regular")
    g.add_argument("--n", type=int, required=True, help="number of right vertices")
    g.add_argument("--ratio", type=float, default=None,
                   help="n_left / n_right (default 0.9 for k-regular, 1 for complete)")
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--weights", type=_weights, default=(0.0, 1.0, False), metavar="LO:HI[:int]")
    g.add_argument("--seed", type=_u64, default=0)
    g.add_argument("--out")

    s = sub.add_parser("solve", help="run the auction on a graph file")
    s.add_argument("graph", nargs="?", default="-")
    s.add_argument("--epsilon", type=_positive, required=True)
    s.add_argument("--order", choices=["input", "shuffle"], default="input")
    s.add_argument("--seed", type=_u64, default=0, help="seed for --order shuffle")
    s.add_argument("--trace", metavar="PATH", help="write the move trace here")
    s.add_argument("--audit", action="store_true", help="append invariant verdicts")
    s.add_argument("--max-label", type=float, default=None,
                   help="replace the default label cap (experiments only; "
                        "drops the built-in termination bound)")
    s.add_argument("--out")

    v = sub.add_parser("verify", help="check a matching file against a graph")
    v.add_argument("graph")
    v.add_argument("matching")

    o = sub.add_parser("oracle", help="exact minimum-weight matching")
    o.add_argument("graph", nargs="?", default="-")
    o.add_argument("--method", choices=["auto", "brute", "hungarian"], default="auto")
    o.add_argument("--out")

    b = sub.add_parser("bench", help="scaling experiments as CSV")
    b.add_argument("--config", help="JSON file with ExperimentSpec fields")
    b.add_argument("--kind", choices=sorted(KINDS), default=None)
    b.add_argument("--n", type=_list(int), default=None, help="comma-separated n_right values")
    b.add_argument("--ratio", type=float, default=None)
    b.add_argument("--k", type=int, default=None)
    b.add_argument("--epsilon", type=_list(_positive), default=None, help="comma-separated")
    b.add_argument("--weights", type=_weights, default=None, metavar="LO:HI[:int]")
    b.add_argument("--trials", type=int, default=None)
    b.add_argument("--seed", type=_u64, default=None)
    b.add_argument("--timing", action="store_true",
                   help="fill wall_time_ns; off by default so output is reproducible")
    b.add_argument("--out")
    return p


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out_path: Optional[str], stdout: TextIO) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_gen(args, stdin, stdout) -> int:
    kind = KINDS[args.kind]
    ratio = args.ratio if args.ratio is not None else (1.0 if kind == "complete" else 0.9)
    lo, hi, integer = args.weights
    spec = GeneratorSpec(
        kind, args.n, int(round(ratio * args.n)), k=args.k,
        weight_low=lo, weight_high=hi, integer_weights=integer, seed=args.seed,
    )
    _emit(serialize(generate(spec)), args.out, stdout)
    return EXIT_OK


def run_audits(graph, result) -> list[audit.AuditReport | str]:
    eps = result.epsilon
    trace = result.trace
    out: list[audit.AuditReport | str] = [
        audit.check_monotone(trace, eps),
        audit.check_matched_inequality(graph, trace, eps),
        audit.check_distance_bound(graph, trace, eps),
    ]
    if graph.n_right > audit.MAX_PATH_RIGHT:
        out.append(f"skip path_inequality n_right>{audit.MAX_PATH_RIGHT}")
    else:
        try:
            out.append(audit.check_path_inequality(graph, result.labels, result.matching, eps))
        except ValueError as exc:
            out.append(f"skip path_inequality {exc}")
    if result.discarded:
        out.append("skip epsilon_optimal discarded vertices present")
    elif graph.n_right > AUDIT_ORACLE_LIMIT:
        out.append(f"skip epsilon_optimal n_right>{AUDIT_ORACLE_LIMIT}")
    else:
        try:
            oracle_result = exact(graph)
        except InfeasibleError:
            out.append("skip epsilon_optimal oracle found no left-perfect matching")
        else:
            out.append(audit.check_epsilon_optimal(graph, result, oracle_result, eps))
    return out


def cmd_solve(args, stdin, stdout) -> int:
    graph = parse(_read(args.graph, stdin))
    config = SolverConfig(
        epsilon=args.epsilon,
        cap_override=args.max_label,
        order="shuffled" if args.order == "shuffle" else "input",
        seed=args.seed,
        record_trace=bool(args.trace or args.audit),
    )
    try:
        result = solve(graph, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = format_result(result, graph)
    status = EXIT_OK
    if args.audit:
        for rep in run_audits(graph, result):
            if isinstance(rep, str):
                text += f"a {rep}\n"
            else:
                text += f"a {rep.verdict()}\n"
                if not rep.passed and not rep.incomparable:
                    status = EXIT_FAIL
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(format_trace(result.trace))
    _emit(text, args.out, stdout)
    return status


def cmd_verify(args, stdin, stdout) -> int:
    graph = parse(_read(args.graph, stdin))
    mf = parse_matching(_read(args.matching, stdin))
    problems = []
    left_seen: set[int] = set()
    right_seen: set[int] = set()
    weights = []
    for u, v, w, line in mf.pairs:
        if not (0 <= u < graph.n_left and 0 <= v < graph.n_right):
            problems.append(f"line {line}: vertex out of range")
            continue
        if not graph.has_edge(u, v):
            problems.append(f"line {line}: ({u + 1},{v + 1}) is not an edge")
            continue
        if u in left_seen or v in right_seen:
            problems.append(f"line {line}: vertex matched twice")
        left_seen.add(u)
        right_seen.add(v)
        gw = graph.weight(u, v)
        if w != gw:
            problems.append(f"line {line}: weight {format_weight(w)} != graph weight {format_weight(gw)}")
        weights.append(gw)
    for u, line in mf.discarded:
        if not 0 <= u < graph.n_left:
            problems.append(f"line {line}: left vertex out of range")
        elif u in left_seen:
            problems.append(f"line {line}: left {u + 1} both matched and discarded")
    total = math.fsum(weights)
    if mf.summary is not None:
        line = mf.summary_line
        claims = {"weight": format_weight(total), "matched": str(len(mf.pairs)),
                  "discarded": str(len(mf.discarded))}
        for key, expected in claims.items():
            got = mf.summary.get(key)
            if got is None:
                continue
            same = float(got) == total if key == "weight" else got == expected
            if not same:
                problems.append(f"line {line}: summary {key} {got} != recomputed {expected}")
    for msg in problems:
        stdout.write(f"violation verify {msg}\n")
    if problems:
        return EXIT_FAIL
    stdout.write(f"ok verify weight {format_weight(total)} matched {len(mf.pairs)}\n")
    return EXIT_OK


def cmd_oracle(args, stdin, stdout) -> int:
    graph = parse(_read(args.graph, stdin))
    method = args.method
    if method == "brute" and graph.n_left > BRUTE_FORCE_LIMIT:
        raise UsageError(f"brute force needs n_left <= {BRUTE_FORCE_LIMIT}")
    try:
        if method == "brute":
            res = brute_force(graph)
        elif method == "hungarian":
            res = hungarian(graph)
        else:
            res = exact(graph)
    except InfeasibleError as exc:
        _emit(f"s infeasible {exc}\n", args.out, stdout)
        return EXIT_FAIL
    lines = [f"m {u + 1} {v + 1} {format_weight(graph.weight(u, v))}\n" for u, v in res.matching.pairs()]
    lines.append(f"s optimum {format_weight(res.optimum_weight)} cardinality {res.cardinality}\n")
    _emit("".join(lines), args.out, stdout)
    return EXIT_OK if res.cardinality == graph.n_left else EXIT_FAIL


def cmd_bench(args, stdin, stdout) -> int:
    data: dict = {}
    if args.config:
        try:
            data = ExperimentSpec.from_json(args.config).__dict__.copy()
        except (OSError, ValueError) as exc:
            raise UsageError(f"config: {exc}") from None
    if args.kind is not None:
        data["family"] = KINDS[args.kind]
    for flag, key in (("n", "n_values"), ("ratio", "density"), ("k", "k"),
                      ("epsilon", "epsilons"), ("trials", "trials"), ("seed", "base_seed")):
        val = getattr(args, flag)
        if val is not None:
            data[key] = val
    if args.weights is not None:
        data["weight_low"], data["weight_high"], data["integer_weights"] = args.weights
    data["timing"] = args.timing
    if "density" not in data and data.get("family") == "complete":
        data["density"] = 1.0
    spec = ExperimentSpec.from_mapping(data)
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = run_experiment(spec)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, stdout)
    return EXIT_FAIL if any(r.error for r in rows) else EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify,
            "oracle": cmd_oracle, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None,
         stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, stdin, stdout)
    except (ParseError, InvalidSpecError, UsageError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
