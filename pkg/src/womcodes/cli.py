"""Command-line front end.

Exit status: 0 success, 1 verification failure or table mismatch,
2 input error, 3 solver budget exhausted (table still written).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

from . import harness, tablefile
from .codec import FAIL, FailAt, InvalidMessage, Unlabeled, build_code_table, decode, encode, write_sequence
from .generators import FlashSpec, InvalidSpec, ParseError, graph_for, load_dag
from .graph import GraphError
from .labeling import DEFAULT_BUDGET
from .published import TABLES
from .verifier import verify

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3

log = logging.getLogger("womcodes")


class InputError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(v)


def _kv(pairs) -> None:
    for key, value in pairs:
        print(f"{key} = {_fmt(value)}")


def _parse_state(table, text: str) -> int:
    g = table.graph
    if "," in text or text.startswith("("):
        try:
            levels = tuple(int(v) for v in text.strip("()").split(","))
        except ValueError:
            raise InputError(f"bad state {text!r}") from None
        return g.node_of(levels)
    try:
        x = int(text)
    except ValueError:
        raise InputError(f"bad state {text!r}") from None
    g.check(x)
    return x


def _read_messages(path: str) -> list[int]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected a message number, got {line!r}") from None
    return out


def cmd_construct(args) -> int:
    if args.flash:
        spec = FlashSpec(*args.flash)
        graph, instance = graph_for(spec), spec.describe()
    elif args.ici:
        spec = FlashSpec(*args.ici)
        graph, instance = graph_for(spec), spec.describe()
    else:
        spec, graph, instance = None, load_dag(args.dag), f"custom {args.dag}"
    if args.k is None and args.messages is None:
        raise InputError("give --messages M or --k K")
    k = args.k if args.k is not None else args.messages
    wanted = args.messages if args.messages is not None else k
    start = time.perf_counter()
    table = build_code_table(graph, k, args.budget, args.seed, spec)
    log.info("constructed in %.3fs", time.perf_counter() - start)
    tablefile.save(table, args.out)
    rf = table.regions
    _kv([
        ("instance", instance),
        ("nodes", graph.node_count),
        ("edges", len(graph.edges)),
        ("k", k),
        ("messages_requested", wanted),
        ("M", table.M),
        ("meets_request", table.M >= wanted),
        ("t_star", table.t_star),
        ("start_points", len(rf.start_points)),
        ("nonempty_regions", len(rf.nonempty_starts())),
        ("layers", len(rf.layers)),
        ("gamma", len(rf.gamma)),
        ("solver", "optimal" if table.labeling.optimal else "timeout"),
        ("seed", "-" if args.seed is None else args.seed),
        ("table", args.out),
    ])
    return EXIT_OK if table.labeling.optimal else EXIT_TIMEOUT


def cmd_encode(args) -> int:
    table = tablefile.load(args.table)
    if args.sequence is None:
        if args.state is None or args.message is None:
            raise InputError("give --state and --message, or --sequence FILE")
        nxt = encode(table, _parse_state(table, args.state), args.message)
        print("FAIL 1" if nxt is FAIL else nxt)
        return EXIT_OK
    if args.message is not None:
        raise InputError("--message and --sequence are exclusive")
    start = None if args.state is None else _parse_state(table, args.state)
    res = write_sequence(table, _read_messages(args.sequence), start)
    if isinstance(res, FailAt):
        print(" ".join(map(str, res.states + ("FAIL",))).strip())
        print(f"FAIL {res.index}")
    else:
        print(" ".join(map(str, res)))
    return EXIT_OK


def cmd_decode(args) -> int:
    table = tablefile.load(args.table)
    print(decode(table, _parse_state(table, args.state)))
    return EXIT_OK


def cmd_verify(args) -> int:
    table = tablefile.load(args.table)
    report = verify(table, args.bound, args.limit)
    for line in report.lines(with_time=not args.no_time):
        print(line)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_tables(args) -> int:
    results = harness.run_table(
        args.which, args.budget, args.seeds, args.jobs, keep_text=args.save is not None, max_q=args.max_q
    )
    sys.stdout.write(harness.render(args.which, results, args.budget, args.seeds))
    if args.save is not None:
        harness.save_tables(args.which, results, args.save)
    return harness.exit_status(results)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="womcode", description="Construct and check fixed-rate WOM codes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a code table")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--flash", nargs=2, type=int, metavar=("N", "Q"), help="n cells with q levels")
    src.add_argument("--ici", nargs=3, type=int, metavar=("N", "Q", "D"), help="flash grid with imbalance d")
    src.add_argument("--dag", metavar="PATH", help="custom DAG file")
    c.add_argument("--messages", type=int, metavar="M", help="message alphabet size (default k)")
    c.add_argument("--k", type=int, help="encoding region size (default M)")
    c.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="labeling solver seconds")
    c.add_argument("--seed", type=int, help="seeded tie-break for regions")
    c.add_argument("--out", required=True, help="code table file to write")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("encode", help="write messages")
    e.add_argument("--table", required=True)
    e.add_argument("--state", help="node id or levels like 0,1 (default root for sequences)")
    e.add_argument("--message", type=int)
    e.add_argument("--sequence", metavar="FILE", help="one message per line")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="read the message stored in a state")
    d.add_argument("--table", required=True)
    d.add_argument("--state", required=True)
    d.set_defaults(func=cmd_decode)

    v = sub.add_parser("verify", help="simulate and check a code table")
    v.add_argument("--table", required=True)
    v.add_argument("--bound", choices=["flash", "ici"])
    v.add_argument("--limit", type=int, help="simulation depth cap (default t* + 1)")
    v.add_argument("--no-time", action="store_true", help="omit the elapsed line")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tables", help="rebuild a published table")
    t.add_argument("--which", required=True, choices=list(TABLES))
    t.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="solver seconds per cell")
    t.add_argument("--seeds", type=int, default=0, help="tie-break seeds to try on a missed cell")
    t.add_argument("--jobs", type=int, default=1, help="cells built in parallel")
    t.add_argument("--max-q", type=int, help="skip columns with more levels")
    t.add_argument("--save", metavar="DIR", help="write each cell's code table here")
    t.set_defaults(func=cmd_tables)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, GraphError, InvalidSpec, ParseError, tablefile.TableFormatError,
            InvalidMessage, Unlabeled, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
