"""Directed acyclic state-transition graphs with bitset reachability.

Nodes are integers ``1..node_count``.  Reachability is precomputed once as
one Python ``int`` per node, where bit ``x`` is set iff ``x`` is reachable
from the node (the relation is reflexive).  Node ids double as the canonical
total order used by every tie-break in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Iterator, Optional, Sequence


class GraphError(ValueError):
    pass


class CyclicGraph(GraphError):
    pass


class InvalidNode(GraphError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the positions of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(nodes: Iterable[int]) -> int:
    mask = 0
    for x in nodes:
        mask |= 1 << x
    return mask


@dataclass(frozen=True, eq=False)
class TransitionGraph:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    root: int
    reach: tuple[int, ...]  # reach[s] bitset; index 0 unused
    coords: Optional[tuple[tuple[int, ...], ...]] = None  # coords[id - 1]
    _coord_index: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def check(self, s: int) -> None:
        if not (isinstance(s, int) and 1 <= s <= self.node_count):
            raise InvalidNode(f"node {s!r} is not in 1..{self.node_count}")

    def reach_size(self, s: int) -> int:
        return self.reach[s].bit_count()

    def node_of(self, coord: Sequence[int]) -> int:
        """Node id of a cell-level vector (generated graphs only)."""
        if self.coords is None:
            raise InvalidNode("graph has no coordinates")
        try:
            return self._coord_index[tuple(coord)]
        except KeyError:
            raise InvalidNode(f"no node with levels {tuple(coord)}") from None

    def coord_of(self, s: int) -> tuple[int, ...]:
        if self.coords is None:
            raise InvalidNode("graph has no coordinates")
        self.check(s)
        return self.coords[s - 1]

    def label(self, s: int) -> str:
        """Human-readable name: the level vector if known, else the id."""
        if self.coords is None:
            return str(s)
        return "(" + ",".join(map(str, self.coords[s - 1])) + ")"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionGraph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.root == other.root
            and set(self.edges) == set(other.edges)
            and self.coords == other.coords
        )

    __hash__ = None  # type: ignore[assignment]


def build_graph(
    node_count: int,
    edges: Iterable[tuple[int, int]],
    root: int,
    coords: Optional[Sequence[Sequence[int]]] = None,
) -> TransitionGraph:
    """Validate a DAG and precompute its reflexive transitive closure."""
    if node_count < 1:
        raise InvalidNode("a graph needs at least one node")
    if not 1 <= root <= node_count:
        raise InvalidNode(f"root {root} is not in 1..{node_count}")
    edge_list = []
    seen = set()
    for u, v in edges:
        for x in (u, v):
            if not 1 <= x <= node_count:
                raise InvalidNode(f"edge ({u},{v}): node {x} is not in 1..{node_count}")
        if u == v:
            raise CyclicGraph(f"self-loop at node {u}")
        if (u, v) not in seen:
            seen.add((u, v))
            edge_list.append((u, v))
    edge_list.sort()

    succ: list[list[int]] = [[] for _ in range(node_count + 1)]
    sorter: TopologicalSorter = TopologicalSorter()
    for s in range(1, node_count + 1):
        sorter.add(s)
    for u, v in edge_list:
        succ[u].append(v)
        sorter.add(u, v)  # u depends on v: successors are emitted first
    try:
        order = list(sorter.static_order())
    except CycleError as exc:
        raise CyclicGraph(f"directed cycle through nodes {exc.args[1]}") from None

    reach = [0] * (node_count + 1)
    for s in order:
        mask = 1 << s
        for v in succ[s]:
            mask |= reach[v]
        reach[s] = mask

    coord_t = None
    index = {}
    if coords is not None:
        coord_t = tuple(tuple(c) for c in coords)
        if len(coord_t) != node_count:
            raise InvalidNode("one coordinate vector per node is required")
        index = {c: i + 1 for i, c in enumerate(coord_t)}
    return TransitionGraph(node_count, tuple(edge_list), root, tuple(reach), coord_t, index)


def reachable_region(g: TransitionGraph, s: int) -> set[int]:
    g.check(s)
    return set(iter_bits(g.reach[s]))


def precedes(g: TransitionGraph, s: int, t: int) -> bool:
    """True iff ``t`` can be reached from ``s`` (reflexive)."""
    g.check(s)
    g.check(t)
    return bool(g.reach[s] >> t & 1)


def frontier_mask(g: TransitionGraph, mask: int) -> int:
    out = 0
    for x in iter_bits(mask):
        if g.reach[x] & mask == 1 << x:
            out |= 1 << x
    return out


def frontier(g: TransitionGraph, xs: Iterable[int]) -> set[int]:
    """Maximal elements of ``xs``: members that reach no other member."""
    xs = list(xs)
    for x in xs:
        g.check(x)
    return set(iter_bits(frontier_mask(g, to_mask(xs))))


def format_dag(g: TransitionGraph) -> str:
    lines = [f"dag {g.node_count} {g.root}"]
    lines += [f"edge {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
