"""Command-line front end.

    treesolver solve FILE [--trace] [--stats] [--json] [--max-nodes N] [--timeout-ms N]
    treesolver bench winning K [--json]
    treesolver bench random --depth D --count N --seed S [--json]
    treesolver oracle sat FILE
    treesolver oracle game K BOUND

Exit codes: 0 done, 1 parse error, 2 resource limit, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .answer import InvalidSolvedForm, ground_value
from .engine import EngineLimits, EngineStats, InvariantViolation, NodeLimitExceeded, ResourceLimit
from .generators import RandomSpec, gen_random, gen_winning
from .normalizer import flat_atom, flatten
from .oracle import decide_exists, decode_position, k_winning_positions
from .parsing import ArityError, ParseError, parse
from .solver import solve
from .syntax import And, Exists, Variable

SCHEMA = 1

EXIT_OK, EXIT_PARSE, EXIT_LIMIT, EXIT_INVARIANT = 0, 1, 2, 3


def stats_json(stats: EngineStats) -> dict:
    return {
        "rules_fired": {str(k): v for k, v in sorted(stats.rules_fired.items(), key=lambda kv: str(kv[0]))},
        "total_rules": stats.total_rules(),
        "peak_nodes": stats.peak_nodes,
        "wall_ms": round(stats.wall_ms, 3),
        "forest_size": stats.forest_size,
    }


def stats_text(stats: EngineStats) -> str:
    fired = " ".join(f"{k}:{v}" for k, v in sorted(stats.rules_fired.items(), key=lambda kv: str(kv[0])))
    return (
        f"rules {stats.total_rules()} ({fired})\n"
        f"peak nodes {stats.peak_nodes}\n"
        f"forest size {stats.forest_size}\n"
        f"wall ms {stats.wall_ms:.1f}"
    )


def _limits(args) -> EngineLimits:
    return EngineLimits(max_nodes=args.max_nodes, timeout_ms=args.timeout_ms)


def _limit_status(e: ResourceLimit) -> str:
    return "node_limit" if isinstance(e, NodeLimitExceeded) else "timeout"


def _emit(obj: dict, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps({"schema": SCHEMA, **obj}, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------- solve


def cmd_solve(args) -> int:
    with open(args.file) as fh:
        p = parse(fh.read())
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    try:
        res = solve(p, limits=_limits(args), check=args.check, trace=trace)
    except ResourceLimit as e:
        _emit(
            {"status": _limit_status(e), "message": str(e), "stats": stats_json(e.stats)},
            args.json,
            f"resource limit: {e}\n{stats_text(e.stats)}",
        )
        return EXIT_LIMIT
    text = res.answer.text()
    if args.stats:
        text += "\n" + stats_text(res.stats)
    _emit({"status": "completed", "answer": res.answer.to_json(), "stats": stats_json(res.stats)}, args.json, text)
    return EXIT_OK


# ---------------------------------------------------------------- bench


def winning_positions(answer, x: Variable) -> set | None:
    """Decode each disjunct to a game position; None if one does not decode."""
    if answer.kind == "false":
        return set()
    if answer.kind == "true":
        return None
    out = set()
    for d in answer.disjuncts:
        t = ground_value(d, x)
        pos = None if t is None else decode_position(t)
        if pos is None:
            return None
        out.add(pos)
    return out


def cmd_bench_winning(args) -> int:
    p = gen_winning(args.k)
    try:
        res = solve(p, limits=_limits(args))
    except ResourceLimit as e:
        _emit(
            {"status": _limit_status(e), "k": args.k, "stats": stats_json(e.stats)},
            args.json,
            f"winning_{args.k}: resource limit: {e}\n{stats_text(e.stats)}",
        )
        return EXIT_LIMIT
    positions = winning_positions(res.answer, _the_free_var(p))
    report = {
        "status": "completed",
        "k": args.k,
        "answer": res.answer.to_json(),
        "positions": None if positions is None else sorted(list(p) for p in positions),
        "stats": stats_json(res.stats),
    }
    pos_text = "undecoded" if positions is None else ", ".join(f"({i},{j})" for i, j in sorted(positions))
    _emit(report, args.json, f"{res.answer.text()}\npositions {pos_text}\n{stats_text(res.stats)}")
    return EXIT_OK


def _the_free_var(p) -> Variable:
    from .syntax import free_vars

    (x,) = free_vars(p)
    return x


def cmd_bench_random(args) -> int:
    rows = []
    status = EXIT_OK
    for i in range(args.count):
        seed = args.seed + i
        nf = gen_random(RandomSpec(depth=args.depth, seed=seed, closed=args.closed))
        t0 = time.perf_counter()
        try:
            res = solve(nf.to_formula(), limits=_limits(args))
        except ResourceLimit as e:
            rows.append({"seed": seed, "status": _limit_status(e), "stats": stats_json(e.stats)})
            status = EXIT_LIMIT
            continue
        rows.append(
            {
                "seed": seed,
                "status": "completed",
                "size": nf.size(),
                "kind": res.answer.kind,
                "disjuncts": len(res.answer.disjuncts),
                "ms": round((time.perf_counter() - t0) * 1000, 3),
                "stats": stats_json(res.stats),
            }
        )
    lines = [
        f"seed {r['seed']}: " + (f"{r['kind']} size {r['size']} rules {r['stats']['total_rules']} {r['ms']} ms"
                                 if r["status"] == "completed" else r["status"])
        for r in rows
    ]
    _emit({"depth": args.depth, "results": rows}, args.json, "\n".join(lines))
    return status


# ---------------------------------------------------------------- oracle


class NotAConjunction(ValueError):
    pass


def existential_conjunction(f) -> tuple[tuple, list]:
    """Split ``ex xs. a_1 & ... & a_n`` (nested terms allowed) into its
    quantified variables and flat atoms."""
    quant, atoms = [], []

    def walk(g):
        match g:
            case Exists(vs, body):
                quant.extend(vs)
                walk(body)
            case And(l, r):
                walk(l)
                walk(r)
            case _:
                a = flat_atom(g)
                if a is None:
                    raise NotAConjunction("expected an existential conjunction of atoms")
                atoms.append(a)

    walk(flatten(f))
    return tuple(quant), atoms


def cmd_oracle_sat(args) -> int:
    with open(args.file) as fh:
        quant, atoms = existential_conjunction(parse(fh.read()))
    print("sat" if decide_exists(quant, atoms) else "unsat")
    return EXIT_OK


def cmd_oracle_game(args) -> int:
    for i, j in sorted(k_winning_positions(args.k, args.bound)):
        print(f"({i},{j})")
    return EXIT_OK


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treesolver", description="First-order constraints over finite or infinite trees.")
    sub = ap.add_subparsers(dest="command", required=True)

    def positive(text: str) -> int:
        n = int(text)
        if n <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return n

    def limits(p):
        p.add_argument("--max-nodes", type=positive, default=EngineLimits.max_nodes)
        p.add_argument("--timeout-ms", type=positive, default=EngineLimits.timeout_ms)

    s = sub.add_parser("solve", help="solve the formula in FILE")
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="one line per rule application on stderr")
    s.add_argument("--stats", action="store_true")
    s.add_argument("--json", action="store_true")
    s.add_argument("--check", action="store_true", help="verify the measure and invariants after every rule")
    limits(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="benchmark formulas")
    bsub = b.add_subparsers(dest="bench", required=True)
    w = bsub.add_parser("winning", help="the k-winning positions of the game")
    w.add_argument("k", type=int)
    w.add_argument("--json", action="store_true")
    limits(w)
    w.set_defaults(func=cmd_bench_winning)
    r = bsub.add_parser("random", help="random normalized formulas")
    r.add_argument("--depth", type=int, required=True)
    r.add_argument("--count", type=int, required=True)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--closed", action="store_true", help="quantify every variable")
    r.add_argument("--json", action="store_true")
    limits(r)
    r.set_defaults(func=cmd_bench_random)

    o = sub.add_parser("oracle", help="independent reference procedures")
    osub = o.add_subparsers(dest="oracle", required=True)
    sat = osub.add_parser("sat", help="satisfiability of an existential conjunction")
    sat.add_argument("file")
    sat.set_defaults(func=cmd_oracle_sat)
    g = osub.add_parser("game", help="k-winning positions by search on the game graph")
    g.add_argument("k", type=int)
    g.add_argument("bound", type=int)
    g.set_defaults(func=cmd_oracle_game)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ArityError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NotAConjunction as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InvariantViolation, InvalidSolvedForm) as e:
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
