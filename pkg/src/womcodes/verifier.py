"""Independent checks on a code table.

The adversarial simulation never looks at layers or frontiers: it only calls
``encode`` and explores every message at every state it reaches.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Union

from .codec import FAIL, CodeTable, FailAt, encode, write_sequence
from .graph import iter_bits


def _survival(table: CodeTable, limit: int) -> tuple[dict, dict]:
    """For each explored state: guaranteed writes left (capped) and the
    adversary's best next message."""
    survive: dict[int, int] = {}
    worst: dict[int, int] = {}
    M = table.M

    def visit(s: int) -> int:
        if s in survive:
            return survive[s]
        best, best_m = limit, 1
        for m in range(1, M + 1):
            nxt = encode(table, s, m)
            if nxt is FAIL:
                best, best_m = 0, m
                break
            # rewriting in place (nxt == s) can repeat forever
            if nxt != s:
                v = min(limit, 1 + visit(nxt))
                if v < best:
                    best, best_m = v, m
        survive[s] = best
        worst[s] = best_m
        return best

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * table.graph.node_count + 1000))
    try:
        visit(table.root)
    finally:
        sys.setrecursionlimit(old)
    return survive, worst


def simulate_worst_writes(table: CodeTable, limit: int) -> int:
    """Largest t <= limit such that every length-t message sequence succeeds."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if table.M == 0:
        return 0
    survive, _ = _survival(table, limit)
    return survive[table.root]


def failing_witness(table: CodeTable, limit: int) -> Optional[list[int]]:
    """A shortest failing message sequence, or ``None`` if none fails within
    ``limit`` writes."""
    if table.M == 0:
        return None
    survive, worst = _survival(table, limit)
    if survive[table.root] >= limit:
        return None
    seq = []
    s = table.root
    while True:
        m = worst[s]
        seq.append(m)
        nxt = encode(table, s, m)
        if nxt is FAIL:
            return seq
        s = nxt


@dataclass
class ConsistencyCheck:
    consistent: bool = True
    monotonic: bool = True
    message_function: bool = True
    counterexample: Optional[str] = None
    encodes: int = 0

    def __bool__(self) -> bool:
        return self.consistent and self.monotonic and self.message_function

    def _fail(self, what: str, text: str) -> None:
        setattr(self, what, False)
        if self.counterexample is None:
            self.counterexample = text


def check_consistency(table: CodeTable) -> ConsistencyCheck:
    """Sweep every state reachable from the root and every message.

    Also checks that every nonempty region offers every message, since that
    is what makes ``encode`` succeed; a corrupted label shows up there.
    """
    g = table.graph
    msg = table.labeling.message_of
    out = ConsistencyCheck()
    for x in table.regions.nonempty_starts():
        have = {msg.get(y) for y in table.regions.region(x)}
        missing = sorted(set(range(1, table.M + 1)) - have)
        if missing:
            out._fail("message_function", f"region of {x} lacks message {missing[0]}")
    for s in iter_bits(g.reach[g.root]):
        for m in range(1, table.M + 1):
            nxt = encode(table, s, m)
            out.encodes += 1
            if nxt is FAIL:
                continue
            if not g.reach[s] >> nxt & 1:
                out._fail("monotonic", f"encode({s}, {m}) = {nxt} is not reachable from {s}")
            if msg.get(nxt) != m:
                out._fail("consistent", f"encode({s}, {m}) = {nxt} decodes to {msg.get(nxt)}")
    return out


def upper_bound_flash(q: int) -> int:
    """ceil(2(q-1)/3) - 1; stated for two cells and at least eight messages."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return -(-2 * (q - 1) // 3) - 1


def upper_bound_ici(q: int) -> int:
    """floor(3(q-1)/5); stated for two cells, eight messages, imbalance 3."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return 3 * (q - 1) // 5


def bound_for(kind: str, table: CodeTable) -> tuple[int, Optional[str]]:
    """The requested bound for the table's levels, plus a note when the
    table lies outside the regime the bound is stated for."""
    spec = table.spec
    if spec is None:
        raise ValueError("bounds need a generated flash table (levels q unknown)")
    if kind == "flash":
        value = upper_bound_flash(spec.q)
        ok = spec.n == 2 and table.M >= 8 and spec.d is None
        regime = "n=2, M>=8, unconstrained"
    elif kind == "ici":
        value = upper_bound_ici(spec.q)
        ok = spec.n == 2 and table.M == 8 and spec.d == 3
        regime = "n=2, M=8, d=3"
    else:
        raise ValueError(f"unknown bound {kind!r}")
    return value, None if ok else f"out of range: bound stated for {regime}"


@dataclass
class VerificationReport:
    t_star_formula: Union[int, float]
    t_star_simulated: int
    consistency_ok: bool
    monotonic_ok: bool
    message_function_ok: bool
    instance: str
    M: int
    k: int
    optimal: bool
    bound: Optional[int] = None
    meets_bound: Optional[bool] = None
    bound_note: Optional[str] = None
    witness: Optional[list] = None
    witness_fails: Optional[bool] = None
    counterexample: Optional[str] = None
    elapsed: float = field(default=0.0)

    @property
    def ok(self) -> bool:
        agree = self.t_star_formula == self.t_star_simulated or (
            self.t_star_formula == float("inf") and self.witness is None
        )
        return (
            agree
            and self.consistency_ok
            and self.monotonic_ok
            and self.message_function_ok
            and self.witness_fails is not False
            and self.meets_bound is not False
        )

    def lines(self, with_time: bool = True) -> list[str]:
        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, list):
                return " ".join(map(str, v)) if v else "(empty)"
            if v == float("inf"):
                return "inf"
            return str(v)

        rows = [
            ("instance", self.instance),
            ("k", self.k),
            ("M", self.M),
            ("labeling", "optimal" if self.optimal else "unproven"),
            ("t_star_formula", self.t_star_formula),
            ("t_star_simulated", self.t_star_simulated),
            ("witness", self.witness),
            ("witness_fails", self.witness_fails),
            ("consistency_ok", self.consistency_ok),
            ("monotonic_ok", self.monotonic_ok),
            ("message_function_ok", self.message_function_ok),
            ("counterexample", self.counterexample),
            ("bound", self.bound),
            ("meets_bound", self.meets_bound),
            ("bound_note", self.bound_note),
            ("ok", self.ok),
        ]
        if with_time:
            rows.append(("elapsed", f"{self.elapsed:.3f}s"))
        return [f"{key} = {fmt(val)}" for key, val in rows]


def verify(table: CodeTable, bound: Optional[str] = None, limit: Optional[int] = None) -> VerificationReport:
    start = time.perf_counter()
    formula = table.t_star
    if limit is None:
        limit = int(formula) + 1 if formula != float("inf") else 4 * table.graph.node_count
    simulated = simulate_worst_writes(table, limit)
    witness = failing_witness(table, limit) if table.M else None
    witness_fails = None
    if witness is not None:
        res = write_sequence(table, witness)
        witness_fails = isinstance(res, FailAt) and res.index == len(witness)
    check = check_consistency(table)
    report = VerificationReport(
        t_star_formula=formula,
        t_star_simulated=simulated,
        consistency_ok=check.consistent,
        monotonic_ok=check.monotonic,
        message_function_ok=check.message_function,
        instance=table.spec.describe() if table.spec else "custom",
        M=table.M,
        k=table.k,
        optimal=table.labeling.optimal,
        witness=witness,
        witness_fails=witness_fails,
        counterexample=check.counterexample,
    )
    if bound is not None:
        value, note = bound_for(bound, table)
        report.bound = value
        report.meets_bound = formula <= value
        report.bound_note = note
    report.elapsed = time.perf_counter() - start
    return report
