"""Message labeling: the covering integer program over encoding regions.

Every node of Gamma gets one label in 1..k; a label is *active* if some node
carries it, and every active label must appear in every nonempty region.
The objective is the number of active labels (M*).  The exact solver tries
targets T = k, k-1, ... and returns the first feasible one.  For a target T
the search assigns labels 1..T by backtracking with propagation:

* a region may not miss more labels than it has unassigned members;
* if it misses exactly as many, its free members may only take missing labels;
* a missing label supported by a single member is forced onto that member;
* when T equals the region size, labels inside the region are all distinct.

Unused labels are interchangeable, so a branch only ever tries one of them.
The search restarts with growing node limits, alternating between two
variable orderings and seeded tie-breaks.
"""

from __future__ import annotations

import functools
import itertools
import logging
import operator
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .regions import RegionFamily

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 60.0


class EmptyProblem(ValueError):
    """No nonempty encoding region: nothing to label (M* = 0)."""


class TooLarge(ValueError):
    pass


class SolverTimeout(RuntimeError):
    """Budget exhausted before optimality was proven.

    ``incumbent`` is the best labeling found; its ``optimal`` flag is False.
    """

    def __init__(self, budget: float, incumbent: "Labeling"):
        super().__init__(
            f"labeling not proven optimal within {budget:g}s (best M = {incumbent.m_star})"
        )
        self.budget = budget
        self.incumbent = incumbent


@dataclass(frozen=True)
class LabelingProblem:
    gamma: tuple[int, ...]
    k: int
    coverage_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        members = set(self.gamma)
        for s in self.coverage_sets:
            if len(set(s)) != self.k:
                raise ValueError(f"coverage set {s} does not have {self.k} members")
            if not members.issuperset(s):
                raise ValueError(f"coverage set {s} leaves Gamma")


@dataclass(frozen=True)
class Labeling:
    m_star: int
    label: dict  # node -> label in 1..k
    active_labels: frozenset
    message_of: dict  # node -> message in 1..m_star
    optimal: bool = True
    search_nodes: int = field(default=0, compare=False)

    def with_optimal(self, optimal: bool) -> "Labeling":
        return Labeling(self.m_star, self.label, self.active_labels, self.message_of,
                        optimal, self.search_nodes)


def labeling_from_labels(label: Mapping[int, int], optimal: bool = True,
                         search_nodes: int = 0) -> Labeling:
    """Wrap a node -> label map; messages number the active labels by rank."""
    active = sorted(set(label.values()))
    alpha = {lab: i + 1 for i, lab in enumerate(active)}
    label = dict(sorted(label.items()))
    return Labeling(
        m_star=len(active),
        label=label,
        active_labels=frozenset(active),
        message_of={j: alpha[lab] for j, lab in label.items()},
        optimal=optimal,
        search_nodes=search_nodes,
    )


def build_problem(rf: RegionFamily) -> LabelingProblem:
    sets = tuple(tuple(sorted(rf.omega[s])) for s in rf.nonempty_starts())
    if not sets:
        raise EmptyProblem("no start point has a nonempty encoding region")
    return LabelingProblem(gamma=tuple(sorted(rf.gamma)), k=rf.k, coverage_sets=sets)


def check_labeling(p: LabelingProblem, lab: Labeling) -> None:
    """Raise ``ValueError`` unless ``lab`` satisfies every constraint of ``p``."""
    if set(lab.label) != set(p.gamma):
        raise ValueError("labeling must cover exactly Gamma")
    if any(not 1 <= v <= p.k for v in lab.label.values()):
        raise ValueError("label outside 1..k")
    used = set(lab.label.values())
    if used != set(lab.active_labels) or lab.m_star != len(used):
        raise ValueError("active labels disagree with the labels in use")
    for s in p.coverage_sets:
        missing = used - {lab.label[j] for j in s}
        if missing:
            raise ValueError(f"coverage set {s} misses labels {sorted(missing)}")
    ranks = {v: i + 1 for i, v in enumerate(sorted(used))}
    if any(lab.message_of[j] != ranks[v] for j, v in lab.label.items()):
        raise ValueError("message map is not the rank bijection of the labels")


class _Cutoff(Exception):
    pass


class _Search:
    """Feasibility of target T: label Gamma with 0..T-1, every set sees all."""

    def __init__(self, p: LabelingProblem, target: int):
        self.T = target
        self.full = (1 << target) - 1
        self.rainbow = target == p.k
        covered = sorted({j for s in p.coverage_sets for j in s})
        self.ids = covered
        index = {j: i for i, j in enumerate(covered)}
        self.sets = [[index[j] for j in s] for s in p.coverage_sets]
        n = len(covered)
        self.n = n
        self.member_of: list[list[int]] = [[] for _ in range(n)]
        for r, s in enumerate(self.sets):
            for v in s:
                self.member_of[v].append(r)
        nbrs = [set() for _ in range(n)]
        for s in self.sets:
            for v in s:
                nbrs[v].update(s)
        self.nbrs = [sorted(x - {v}) for v, x in enumerate(nbrs)]

    def run(self, strategy: int, seed: int, node_limit: float, deadline: float):
        """Return a label list, ``None`` if infeasible; raise ``_Cutoff`` on limits."""
        n, T, full = self.n, self.T, self.full
        sets, member_of, nbrs = self.sets, self.member_of, self.nbrs
        rainbow = self.rainbow
        dom = [full] * n
        val = [-1] * n
        used_count = [0] * T
        trail: list = []
        tie = list(range(n))
        if seed:
            random.Random(seed).shuffle(tie)
        self.nodes = 0

        def assign(v, lab, queue):
            trail.append((~v, 0))
            val[v] = lab
            used_count[lab] += 1
            queue.extend(member_of[v])

        def restrict(v, nd):
            trail.append((v, dom[v]))
            dom[v] = nd

        def undo(mark):
            while len(trail) > mark:
                v, old = trail.pop()
                if v < 0:
                    used_count[val[~v]] -= 1
                    val[~v] = -1
                else:
                    dom[v] = old

        def propagate(queue):
            while queue:
                s = sets[queue.pop()]
                present = 0
                free = []
                for v in s:
                    if val[v] >= 0:
                        bit = 1 << val[v]
                        if rainbow and present & bit:
                            return False
                        present |= bit
                    else:
                        free.append(v)
                missing = full & ~present
                n_missing = missing.bit_count()
                if n_missing > len(free):
                    return False
                if not free:
                    continue
                tight = n_missing == len(free)
                for v in free:
                    nd = dom[v]
                    if tight:
                        nd &= missing
                    if rainbow:
                        nd &= ~present
                    if nd != dom[v]:
                        if not nd:
                            return False
                        restrict(v, nd)
                m = missing
                while m:
                    bit = m & -m
                    m ^= bit
                    support = -1
                    count = 0
                    for v in free:
                        if dom[v] & bit:
                            count += 1
                            support = v
                            if count > 1:
                                break
                    if count == 0:
                        return False
                    if count == 1 and dom[support] != bit:
                        restrict(support, bit)
                for v in free:
                    if val[v] < 0 and dom[v].bit_count() == 1:
                        assign(v, dom[v].bit_length() - 1, queue)
            return True

        def pick():
            best = -1
            best_key = None
            for v in range(n):
                if val[v] >= 0:
                    continue
                size = dom[v].bit_count()
                if strategy == 0:
                    key = (size, tie[v])
                else:
                    key = (size, -sum(1 for u in nbrs[v] if val[u] < 0), tie[v])
                if best_key is None or key < best_key:
                    best_key, best = key, v
                    if size <= 1 and strategy == 0:
                        break
            return best

        def search():
            self.nodes += 1
            if self.nodes > node_limit or (self.nodes & 255 == 0 and time.monotonic() > deadline):
                raise _Cutoff
            v = pick()
            if v < 0:
                return True
            dv = dom[v]
            choices = [lab for lab in range(T) if dv >> lab & 1 and used_count[lab]]
            fresh = [lab for lab in range(T) if dv >> lab & 1 and not used_count[lab]]
            if fresh:
                choices.append(fresh[0])
            for lab in choices:
                mark = len(trail)
                queue: list = []
                restrict(v, 1 << lab)
                assign(v, lab, queue)
                if propagate(queue) and search():
                    return True
                undo(mark)
            return False

        if not propagate(list(range(len(sets)))):
            return None
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 4 * n + 1000))
        try:
            ok = search()
        finally:
            sys.setrecursionlimit(old_limit)
        return list(val) if ok else None


def _attempt(p: LabelingProblem, target: int, deadline: float, base_limit: int = 200):
    """Restart schedule for one target.

    Returns ``(labels or None, proven, nodes)``; ``proven`` is False when the
    deadline cut the search short.
    """
    search = _Search(p, target)
    limit = float(base_limit)
    total = 0
    for run in itertools.count():
        if time.monotonic() > deadline:
            return None, False, total
        try:
            labels = search.run(run % 2, run // 2, limit, deadline)
        except _Cutoff:
            total += search.nodes
            limit *= 1.2
            continue
        total += search.nodes
        if labels is None:
            return None, True, total
        out = {j: labels[i] + 1 for i, j in enumerate(search.ids)}
        return out, True, total
    raise AssertionError("unreachable")


def _complete(p: LabelingProblem, partial: dict) -> dict:
    # nodes of Gamma outside every coverage set take label 1
    return {j: partial.get(j, 1) for j in p.gamma}


def solve_exact(p: LabelingProblem, budget: Optional[float] = DEFAULT_BUDGET) -> Labeling:
    """Maximize the number of active labels; proven optimal or ``SolverTimeout``."""
    start = time.monotonic()
    deadline = start + (budget if budget is not None else float("inf"))
    total = 0
    proven = True
    for target in range(p.k, 0, -1):
        labels, complete, nodes = _attempt(p, target, deadline)
        total += nodes
        if labels is not None:
            lab = labeling_from_labels(_complete(p, labels), proven, total)
            log.debug("target %d feasible after %d nodes", target, total)
            if not proven:
                raise SolverTimeout(budget, lab)
            return lab
        if not complete:
            proven = False
            # out of time: settle for a cheaply found smaller target
            deadline = time.monotonic() + min(5.0, (budget or 5.0) / 10)
        else:
            log.debug("target %d infeasible after %d nodes", target, total)
    # target 1 is always feasible, so this is only reached on timeouts
    lab = labeling_from_labels({j: 1 for j in p.gamma}, False, total)
    raise SolverTimeout(budget, lab)


def brute_force_oracle(p: LabelingProblem, max_gamma: int = 12, max_k: int = 4) -> int:
    """Optimum by exhaustive enumeration of all label and y assignments.

    Independent of the search above; only usable on tiny instances.  The
    k^|Gamma| assignments are split into a prefix loop over the first nodes
    and a vectorized block over the remaining ones.
    """
    n, k = len(p.gamma), p.k
    if n > max_gamma or k > max_k:
        raise TooLarge(f"|Gamma|={n}, k={k} exceeds enumeration bound ({max_gamma}, {max_k})")
    if not p.coverage_sets:
        raise EmptyProblem("no coverage sets")
    pos = {j: i for i, j in enumerate(p.gamma)}
    cols = [[pos[j] for j in s] for s in p.coverage_sets]
    n_pre = max(0, n - 8)
    n_suf = n - n_pre
    idx = np.arange(k**n_suf, dtype=np.int64)
    digits = (idx[:, None] // k ** np.arange(n_suf, dtype=np.int64)) % k
    suf_hot = (1 << digits).astype(np.uint8)  # suf_hot[row, j] = bit of node n_pre + j
    zero = np.zeros(len(idx), dtype=np.uint8)
    suf_used = np.bitwise_or.reduce(suf_hot, axis=1) if n_suf else zero
    suf_cover = []
    for c in cols:
        suf = [j - n_pre for j in c if j >= n_pre]
        suf_cover.append(np.bitwise_or.reduce(suf_hot[:, suf], axis=1) if suf else zero)
    ys = range(1 << k)  # every y-vector as a bitmask
    feasible = [False] * (1 << k)
    for prefix in itertools.product(range(k), repeat=n_pre):
        hot = [1 << v for v in prefix]
        used = suf_used | np.uint8(functools.reduce(operator.or_, hot, 0))
        cover = np.full(len(idx), (1 << k) - 1, dtype=np.uint8)
        for c, sc in zip(cols, suf_cover):
            pre = functools.reduce(operator.or_, (hot[j] for j in c if j < n_pre), 0)
            cover &= sc | np.uint8(pre)
        for y in ys:
            # y feasible iff every used label is active (x <= y) and every
            # active label occurs in every coverage set
            if not feasible[y] and np.any(((used & ~np.uint8(y)) == 0) & ((cover & y) == y)):
                feasible[y] = True
    return max(bin(y).count("1") for y in ys if feasible[y])
