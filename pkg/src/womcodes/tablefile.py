"""Versioned text persistence for code tables.

Layout, one record per line::

    wom-code-table 1
    graph flash n=2 q=4          # or "graph ici n=.. q=.. d=.." / "graph custom"
    nodes 16
    root 1
    k 5
    messages 5
    t_star 2
    labeling optimal             # or "unproven"
    seed -                       # region tie-break seed, "-" for id order
    node <id> <levels|-> <label|-> <message|->
    edge <from> <to>
    region <start> <members...|->
    layer <index> <members...|->
    end

Loading rebuilds the graph, re-derives layers from the stored regions and
re-checks the labeling; any disagreement is rejected.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Union

from .codec import CodeTable
from .generators import FlashSpec, InvalidSpec, graph_for
from .graph import GraphError, build_graph
from .labeling import Labeling, build_problem, check_labeling, labeling_from_labels
from .regions import family_from_regions, worst_writes

MAGIC = "wom-code-table"
VERSION = 1


class TableFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _ids(values) -> str:
    values = sorted(values)
    return " ".join(map(str, values)) if values else "-"


def dumps(table: CodeTable) -> str:
    g, rf, lab = table.graph, table.regions, table.labeling
    spec = table.spec
    if spec is None:
        graph_line = "graph custom"
    elif spec.d is None:
        graph_line = f"graph flash n={spec.n} q={spec.q}"
    else:
        graph_line = f"graph ici n={spec.n} q={spec.q} d={spec.d}"
    t_star = table.t_star
    out = [
        f"{MAGIC} {VERSION}",
        graph_line,
        f"nodes {g.node_count}",
        f"root {g.root}",
        f"k {rf.k}",
        f"messages {table.M}",
        f"t_star {'inf' if t_star == math.inf else t_star}",
        f"labeling {'optimal' if lab.optimal else 'unproven'}",
        f"seed {'-' if rf.seed is None else rf.seed}",
    ]
    for x in g.nodes:
        levels = ",".join(map(str, g.coords[x - 1])) if g.coords is not None else "-"
        label = lab.label.get(x, "-")
        message = lab.message_of.get(x, "-")
        out.append(f"node {x} {levels} {label} {message}")
    out += [f"edge {u} {v}" for u, v in g.edges]
    out += [f"region {s} {_ids(rf.omega[s])}" for s in sorted(rf.omega)]
    out += [f"layer {i} {_ids(layer)}" for i, layer in enumerate(rf.layers)]
    out.append("end")
    return "\n".join(out) + "\n"


def save(table: CodeTable, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(table), encoding="utf-8")


def _int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise TableFormatError(f"expected an integer, got {text!r}", lineno) from None


def _parse_params(parts: list[str], lineno: int) -> dict:
    params = {}
    for p in parts:
        key, sep, value = p.partition("=")
        if not sep:
            raise TableFormatError(f"expected key=value, got {p!r}", lineno)
        params[key] = _int(value, lineno)
    return params


def loads(text: str) -> CodeTable:
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines or lines[0][1] != [MAGIC, str(VERSION)]:
        raise TableFormatError(f"not a version {VERSION} code table", 1)
    header: dict = {}
    nodes: dict[int, tuple] = {}
    edges: list[tuple[int, int]] = []
    omega: dict[int, list[int]] = {}
    layers: dict[int, list[int]] = {}
    spec: Optional[FlashSpec] = None
    ended = False
    for lineno, parts in lines[1:]:
        if ended:
            raise TableFormatError("content after 'end'", lineno)
        tag, rest = parts[0], parts[1:]
        if tag == "graph":
            if not rest:
                raise TableFormatError("graph kind missing", lineno)
            if rest[0] != "custom":
                p = _parse_params(rest[1:], lineno)
                try:
                    if rest[0] == "flash" and set(p) == {"n", "q"}:
                        spec = FlashSpec(p["n"], p["q"])
                    elif rest[0] == "ici" and set(p) == {"n", "q", "d"}:
                        spec = FlashSpec(p["n"], p["q"], p["d"])
                    else:
                        raise TableFormatError(f"unknown graph description {' '.join(rest)!r}", lineno)
                except InvalidSpec as exc:
                    raise TableFormatError(str(exc), lineno) from None
            header["graph"] = rest[0]
        elif tag in ("nodes", "root", "k", "messages"):
            if len(rest) != 1:
                raise TableFormatError(f"{tag} takes one value", lineno)
            header[tag] = _int(rest[0], lineno)
        elif tag in ("t_star", "labeling", "seed"):
            if len(rest) != 1:
                raise TableFormatError(f"{tag} takes one value", lineno)
            header[tag] = rest[0]
        elif tag == "node":
            if len(rest) != 4:
                raise TableFormatError("node needs: id levels label message", lineno)
            x = _int(rest[0], lineno)
            levels = None if rest[1] == "-" else tuple(_int(v, lineno) for v in rest[1].split(","))
            label = None if rest[2] == "-" else _int(rest[2], lineno)
            message = None if rest[3] == "-" else _int(rest[3], lineno)
            if x in nodes:
                raise TableFormatError(f"node {x} listed twice", lineno)
            nodes[x] = (levels, label, message)
        elif tag == "edge":
            if len(rest) != 2:
                raise TableFormatError("edge needs two ids", lineno)
            edges.append((_int(rest[0], lineno), _int(rest[1], lineno)))
        elif tag in ("region", "layer"):
            if len(rest) < 2:
                raise TableFormatError(f"{tag} needs an index and members", lineno)
            key = _int(rest[0], lineno)
            members = [] if rest[1:] == ["-"] else [_int(v, lineno) for v in rest[1:]]
            target = omega if tag == "region" else layers
            if key in target:
                raise TableFormatError(f"{tag} {key} listed twice", lineno)
            target[key] = members
        elif tag == "end":
            ended = True
        else:
            raise TableFormatError(f"unknown record {tag!r}", lineno)
    if not ended:
        raise TableFormatError("missing 'end' (truncated file?)")
    missing = {"graph", "nodes", "root", "k", "messages", "t_star", "labeling", "seed"} - set(header)
    if missing:
        raise TableFormatError(f"missing header fields {sorted(missing)}")
    return _assemble(header, spec, nodes, edges, omega, layers)


def _assemble(header, spec, nodes, edges, omega, layers) -> CodeTable:
    count = header["nodes"]
    if sorted(nodes) != list(range(1, count + 1)):
        raise TableFormatError(f"node records must be exactly 1..{count}")
    coords = [nodes[x][0] for x in range(1, count + 1)]
    if any(c is None for c in coords):
        if any(c is not None for c in coords):
            raise TableFormatError("levels given for some nodes but not all")
        coords = None
    try:
        g = build_graph(count, edges, header["root"], coords)
    except GraphError as exc:
        raise TableFormatError(f"bad graph: {exc}") from None
    if spec is not None:
        try:
            expected = graph_for(spec)
        except InvalidSpec as exc:
            raise TableFormatError(str(exc)) from None
        if expected != g:
            raise TableFormatError(f"stored graph differs from the generated {spec.describe()} graph")

    seed = None if header["seed"] == "-" else _int(header["seed"], 0)
    try:
        rf = family_from_regions(g, header["k"], omega, seed)
    except (ValueError, GraphError) as exc:
        raise TableFormatError(f"bad regions: {exc}") from None
    if set(omega) != set(rf.start_points):
        raise TableFormatError("region records do not match the start-point set")
    stored_layers = [sorted(layers[i]) for i in sorted(layers)]
    if sorted(layers) != list(range(len(layers))) or stored_layers != [sorted(L) for L in rf.layers]:
        raise TableFormatError("layer records disagree with layers derived from the regions")

    labels = {x: rec[1] for x, rec in nodes.items() if rec[1] is not None}
    messages = {x: rec[2] for x, rec in nodes.items() if rec[2] is not None}
    optimal = {"optimal": True, "unproven": False}.get(header["labeling"])
    if optimal is None:
        raise TableFormatError(f"labeling must be 'optimal' or 'unproven', got {header['labeling']!r}")
    if rf.nonempty_starts():
        lab = labeling_from_labels(labels, optimal)
        try:
            check_labeling(build_problem(rf), lab)
        except ValueError as exc:
            raise TableFormatError(f"bad labeling: {exc}") from None
    else:
        if labels:
            raise TableFormatError("labels present but no nonempty region exists")
        lab = Labeling(0, {}, frozenset(), {}, optimal)
    if messages != lab.message_of:
        raise TableFormatError("message column disagrees with the labels")
    if header["messages"] != lab.m_star:
        raise TableFormatError(f"header says {header['messages']} messages, labels give {lab.m_star}")
    t_star = worst_writes(rf)
    if header["t_star"] != ("inf" if t_star == math.inf else str(t_star)):
        raise TableFormatError(f"header t_star {header['t_star']} but regions give {t_star}")
    return CodeTable(g, rf, lab, spec)


def load(path: Union[str, Path]) -> CodeTable:
    return loads(Path(path).read_text(encoding="utf-8"))


__all__ = ["dumps", "loads", "save", "load", "TableFormatError"]
