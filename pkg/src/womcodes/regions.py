"""Greedy encoding regions, layers, start points and the worst number of writes."""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .graph import TransitionGraph, frontier_mask, iter_bits, to_mask

UNBOUNDED = math.inf


def tie_priorities(g: TransitionGraph, seed: Optional[int]) -> Optional[list[int]]:
    """Per-node tie-break rank; ``None`` means plain node-id order."""
    if seed is None:
        return None
    order = list(g.nodes)
    random.Random(seed).shuffle(order)
    prio = [0] * (g.node_count + 1)
    for rank, x in enumerate(order):
        prio[x] = rank
    return prio


def greedy_region(
    g: TransitionGraph, s: int, k: int, priority: Optional[Sequence[int]] = None
) -> frozenset[int]:
    """The ``k`` nodes of R(s) with the largest reachable sets.

    Ties go to the smaller node id, or to the smaller ``priority[x]`` when a
    priority table is given.  Returns an empty set when ``|R(s)| < k``.
    """
    g.check(s)
    if k < 1:
        raise ValueError("region size k must be >= 1")
    members = list(iter_bits(g.reach[s]))
    if len(members) < k:
        return frozenset()
    if priority is None:
        key = lambda x: (-g.reach_size(x), x)
    else:
        key = lambda x: (-g.reach_size(x), priority[x], x)
    return frozenset(heapq.nsmallest(k, members, key=key))


@dataclass(frozen=True)
class RegionFamily:
    graph: TransitionGraph
    k: int
    omega: dict  # start point -> frozenset (possibly empty); absent means empty
    layers: tuple[frozenset, ...]
    frontiers: tuple[frozenset, ...]  # frontiers[i] == F(layers[i])
    start_points: frozenset
    gamma: frozenset
    seed: Optional[int] = None

    def region(self, s: int) -> frozenset:
        return self.omega.get(s, frozenset())

    def nonempty_starts(self) -> list[int]:
        return sorted(s for s, w in self.omega.items() if w)

    def layer_index(self) -> dict:
        """Node -> sorted tuple of layer indices containing it."""
        out: dict = {}
        for i, layer in enumerate(self.layers):
            for x in layer:
                out.setdefault(x, []).append(i)
        return {x: tuple(v) for x, v in out.items()}


def _layered(g: TransitionGraph, k: int, region_of, seed: Optional[int]) -> RegionFamily:
    """Grow layers from the root, giving each frontier node the region
    ``region_of(x)`` (computed once per node).

    Iteration stops at an empty layer or when a layer repeats an earlier one.
    """
    cache: dict[int, frozenset] = {}
    layer = 1 << g.root
    layers = [layer]
    frontiers = []
    seen = {layer}
    while True:
        front = frontier_mask(g, layer)
        frontiers.append(front)
        nxt = 0
        for x in iter_bits(front):
            if x not in cache:
                cache[x] = frozenset(region_of(x))
            nxt |= to_mask(cache[x])
        if nxt in seen:
            break
        layers.append(nxt)
        seen.add(nxt)
        if not nxt:
            frontiers.append(0)
            break
        layer = nxt

    gamma = 0
    for m in layers:
        gamma |= m
    return RegionFamily(
        graph=g,
        k=k,
        omega=dict(sorted(cache.items())),
        layers=tuple(frozenset(iter_bits(m)) for m in layers),
        frontiers=tuple(frozenset(iter_bits(m)) for m in frontiers),
        start_points=frozenset(cache),
        gamma=frozenset(iter_bits(gamma)),
        seed=seed,
    )


def build_regions(g: TransitionGraph, k: int, seed: Optional[int] = None) -> RegionFamily:
    """Greedy region family; ``seed`` switches ties to a seeded random order."""
    if k < 1:
        raise ValueError("region size k must be >= 1")
    priority = tie_priorities(g, seed)
    return _layered(g, k, lambda x: greedy_region(g, x, k, priority), seed)


def family_from_regions(
    g: TransitionGraph, k: int, omega: Mapping[int, Iterable[int]], seed: Optional[int] = None
) -> RegionFamily:
    """Layer a given region assignment (missing entries are empty).

    Raises ``ValueError`` if a region is not a k-subset of its reachable set,
    or if a nonempty region belongs to a node that never becomes a start point.
    """
    regions = {}
    for s, members in omega.items():
        g.check(s)
        members = frozenset(members)
        for x in members:
            g.check(x)
        if members and len(members) != k:
            raise ValueError(f"region of {s} has {len(members)} nodes, expected {k} or 0")
        if to_mask(members) & ~g.reach[s]:
            raise ValueError(f"region of {s} leaves the reachable region of {s}")
        regions[s] = members
    rf = _layered(g, k, lambda x: regions.get(x, frozenset()), seed)
    stray = sorted(s for s, w in regions.items() if w and s not in rf.start_points)
    if stray:
        raise ValueError(f"nonempty regions at non-start points {stray}")
    return rf


def worst_writes(rf: RegionFamily) -> Union[int, float]:
    """Smallest i > 0 whose layer frontier holds a node with an empty region.

    0 when the root itself has no region; ``UNBOUNDED`` if no layer ever
    reaches such a node (only possible when regions cycle, e.g. k = 1).
    """
    if not rf.region(rf.graph.root):
        return 0
    for i in range(1, len(rf.frontiers)):
        if any(not rf.region(x) for x in rf.frontiers[i]):
            return i
    return UNBOUNDED
