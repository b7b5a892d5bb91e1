"""Encoder and decoder built from a region family and a message labeling."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .generators import FlashSpec
from .graph import TransitionGraph
from .labeling import (
    DEFAULT_BUDGET,
    EmptyProblem,
    Labeling,
    SolverTimeout,
    build_problem,
    solve_exact,
)
from .regions import RegionFamily, build_regions, worst_writes


class Fail(enum.Enum):
    """The encoder's ``fail`` outcome: the device cannot take this write."""

    FAIL = "fail"

    def __repr__(self) -> str:
        return "FAIL"


FAIL = Fail.FAIL


class InvalidMessage(ValueError):
    pass


class Unlabeled(LookupError):
    pass


class EncoderError(RuntimeError):
    """The encoding window kept moving; the region family is malformed."""


def _empty_labeling() -> Labeling:
    return Labeling(0, {}, frozenset(), {}, True)


@dataclass(eq=False)
class CodeTable:
    graph: TransitionGraph
    regions: RegionFamily
    labeling: Labeling
    spec: Optional[FlashSpec] = None

    # lookup tables for encoding, filled in __post_init__
    window_of: dict = field(init=False, repr=False)
    first_layer: dict = field(init=False, repr=False)
    candidates: dict = field(init=False, repr=False)

    def __post_init__(self):
        rf = self.regions
        self.window_of = {}
        for x in sorted(rf.omega):
            for s in rf.omega[x]:
                self.window_of.setdefault(s, x)
        self.first_layer = {x: idx[0] for x, idx in rf.layer_index().items()}
        msg = self.labeling.message_of
        self.candidates = {}
        for x, region in rf.omega.items():
            for y in sorted(region):
                if y in msg:
                    self.candidates.setdefault((x, msg[y]), y)

    @property
    def M(self) -> int:
        return self.labeling.m_star

    @property
    def k(self) -> int:
        return self.regions.k

    @property
    def t_star(self):
        return worst_writes(self.regions)

    @property
    def root(self) -> int:
        return self.graph.root


def build_code_table(
    graph: TransitionGraph,
    k: int,
    budget: Optional[float] = DEFAULT_BUDGET,
    seed: Optional[int] = None,
    spec: Optional[FlashSpec] = None,
) -> CodeTable:
    """Regions, then labels, then the table.

    A solver timeout does not raise: the table carries the incumbent labeling
    with ``labeling.optimal`` False.
    """
    rf = build_regions(graph, k, seed)
    try:
        lab = solve_exact(build_problem(rf), budget)
    except EmptyProblem:
        lab = _empty_labeling()
    except SolverTimeout as exc:
        lab = exc.incumbent
    return CodeTable(graph, rf, lab, spec)


def encode_steps(table: CodeTable, s: int, m: int) -> tuple[Union[int, Fail], int]:
    """Encode and also report how many times the encoding window moved."""
    if not (isinstance(m, int) and 1 <= m <= table.M):
        raise InvalidMessage(f"message {m!r} outside 1..{table.M}")
    g = table.graph
    g.check(s)
    rf = table.regions
    d = table.window_of.get(s)
    moves = 0
    for _ in range(g.node_count + 1):
        if d is None or not rf.region(d):
            return FAIL, moves
        y = table.candidates.get((d, m))
        if y is not None and g.reach[s] >> y & 1:
            return y, moves
        if y is None and moves:
            return FAIL, moves
        i = table.first_layer.get(s)
        if i is None:
            return FAIL, moves
        d = next((x for x in sorted(rf.frontiers[i]) if g.reach[s] >> x & 1), None)
        moves += 1
    raise EncoderError(f"window moved more than {g.node_count} times from state {s}")


def encode(table: CodeTable, s: int, m: int) -> Union[int, Fail]:
    """Next state for writing message ``m`` at state ``s``, or ``FAIL``."""
    return encode_steps(table, s, m)[0]


def decode(table: CodeTable, s: int) -> int:
    table.graph.check(s)
    try:
        return table.labeling.message_of[s]
    except KeyError:
        raise Unlabeled(f"state {s} carries no message") from None


@dataclass(frozen=True)
class FailAt:
    """Write number ``index`` (1-based) failed; ``states`` are the earlier results."""

    index: int
    states: tuple[int, ...]


def write_sequence(
    table: CodeTable, messages: Sequence[int], start: Optional[int] = None
) -> Union[list[int], FailAt]:
    for m in messages:
        if not (isinstance(m, int) and 1 <= m <= table.M):
            raise InvalidMessage(f"message {m!r} outside 1..{table.M}")
    s = table.root if start is None else start
    states: list[int] = []
    for i, m in enumerate(messages, start=1):
        nxt = encode(table, s, m)
        if nxt is FAIL:
            return FailAt(i, tuple(states))
        states.append(nxt)
        s = nxt
    return states


class WriteSession:
    """A device being written: starts at the root, moves forward per write."""

    def __init__(self, table: CodeTable, start: Optional[int] = None):
        self.table = table
        self.current = table.root if start is None else start
        table.graph.check(self.current)
        self.writes_done = 0

    def write(self, m: int) -> Union[int, Fail]:
        nxt = encode(self.table, self.current, m)
        if nxt is not FAIL:
            self.current = nxt
            self.writes_done += 1
        return nxt

    def read(self) -> int:
        return decode(self.table, self.current)

