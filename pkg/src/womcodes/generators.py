"""Device models: multilevel flash grids, imbalance-constrained grids, and
custom DAGs loaded from text."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .graph import InvalidNode, TransitionGraph, build_graph


class InvalidSpec(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class FlashSpec:
    n: int
    q: int
    d: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpec(f"need at least one cell, got n={self.n}")
        if self.q < 2:
            raise InvalidSpec(f"need at least two levels, got q={self.q}")
        if self.d is not None and not 1 <= self.d <= self.q - 1:
            raise InvalidSpec(f"imbalance bound d={self.d} outside 1..{self.q - 1}")

    @property
    def kind(self) -> str:
        return "flash" if self.d is None else "ici"

    def describe(self) -> str:
        if self.d is None:
            return f"flash n={self.n} q={self.q}"
        return f"ici n={self.n} q={self.q} d={self.d}"


def _grid_graph(n: int, q: int, valid) -> TransitionGraph:
    # product() yields vectors in lexicographic order, which is also a
    # topological order for unit increments.
    states = [v for v in itertools.product(range(q), repeat=n) if valid(v)]
    index = {v: i + 1 for i, v in enumerate(states)}
    edges = []
    for v in states:
        for c in range(n):
            if v[c] + 1 < q:
                w = v[:c] + (v[c] + 1,) + v[c + 1:]
                if w in index:
                    edges.append((index[v], index[w]))
    return build_graph(len(states), edges, 1, coords=states)


def flash_graph(spec: FlashSpec) -> TransitionGraph:
    """All level vectors in {0..q-1}^n, edges raise one cell by one level."""
    if spec.d is not None:
        raise InvalidSpec("flash_graph takes an unconstrained spec; use ici_graph")
    return _grid_graph(spec.n, spec.q, lambda v: True)


def ici_graph(spec: FlashSpec) -> TransitionGraph:
    """Flash grid restricted to states whose levels pairwise differ by <= d.

    Every pair of cells is constrained, not only neighbouring ones.
    """
    if spec.d is None:
        raise InvalidSpec("ici_graph needs an imbalance bound d")
    d = spec.d
    return _grid_graph(spec.n, spec.q, lambda v: max(v) - min(v) <= d)


def graph_for(spec: FlashSpec) -> TransitionGraph:
    return flash_graph(spec) if spec.d is None else ici_graph(spec)


def parse_dag(text: str) -> TransitionGraph:
    """Parse the ``dag <count> <root>`` / ``edge <u> <v>`` text format."""
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise ParseError(f"expected decimal ids in {line!r}", lineno) from None
        if parts[0] == "dag":
            if header is not None:
                raise ParseError("duplicate dag header", lineno)
            if len(nums) != 2:
                raise ParseError("header must be 'dag <node_count> <root_id>'", lineno)
            header = (nums[0], nums[1], lineno)
            if nums[0] < 1 or not 1 <= nums[1] <= nums[0]:
                raise InvalidNode("bad node count or root", lineno)
        elif parts[0] == "edge":
            if header is None:
                raise ParseError("edge before dag header", lineno)
            if len(nums) != 2:
                raise ParseError("edge must be 'edge <from> <to>'", lineno)
            for x in nums:
                if not 1 <= x <= header[0]:
                    raise InvalidNode(f"node {x} is not in 1..{header[0]}", lineno)
            edges.append((nums[0], nums[1], lineno))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    if header is None:
        raise ParseError("missing dag header", 1)
    return build_graph(header[0], [(u, v) for u, v, _ in edges], header[1])


def load_dag(path: Union[str, Path]) -> TransitionGraph:
    return parse_dag(Path(path).read_text(encoding="utf-8"))
