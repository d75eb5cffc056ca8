"""Acyclic directed mixed graphs (ADMGs) and their graph-theoretic primitives.

An ADMG carries directed edges (cause-effect arrows) and bidirected edges
(latent confounding between two observed vertices).  The directed part is
always a DAG.  Instances are immutable; every operation returns a new graph.

A topological ordering of the directed part is computed once at construction
with deterministic tie-breaking and is inherited, restricted, by induced
subgraphs, so the ordering never has to be recomputed during recursion.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import CyclicGraph, NameCollision, ParseError, SelfLoop, UnknownVertex

__all__ = [
    "Admg",
    "parse_graph",
    "parse_graph_text",
    "graphs_equal",
    "is_subgraph",
    "previous_in_order",
    "to_dot",
]

_EDGE = re.compile(r"^([A-Za-z0-9_]+)\s*(<->|->)\s*([A-Za-z0-9_]+)$")


def _pair(a: str, b: str) -> frozenset[str]:
    return frozenset((a, b))


@dataclass(frozen=True)
class Admg:
    """An acyclic directed mixed graph.

    Attributes:
        vertices: the vertex names.
        directed: ordered pairs ``(tail, head)``.
        bidirected: unordered pairs ``{a, b}``.
        topo: a topological ordering of the directed part; for every
            directed edge the tail precedes the head.
    """

    vertices: frozenset[str]
    directed: frozenset[tuple[str, str]]
    bidirected: frozenset[frozenset[str]]
    topo: tuple[str, ...]

    @classmethod
    def create(
        cls,
        vertices: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[Iterable[str]] = (),
    ) -> "Admg":
        """Build a validated graph, computing a deterministic topological order.

        Among vertices of in-degree zero the lexicographically smallest name is
        emitted first, so the ordering is reproducible across runs.
        """
        vs = frozenset(vertices)
        if not vs or any(not v for v in vs):
            raise ParseError("graph needs a non-empty set of non-empty vertex names")
        dir_edges = set()
        for tail, head in directed:
            if tail == head:
                raise SelfLoop(f"self loop {tail}->{head}")
            if tail not in vs or head not in vs:
                raise UnknownVertex(f"edge {tail}->{head} mentions unknown vertex")
            dir_edges.add((tail, head))
        bi_edges = set()
        for edge in bidirected:
            pair = frozenset(edge)
            if len(pair) != 2:
                raise SelfLoop(f"bidirected edge must join two distinct vertices: {set(edge)}")
            if not pair <= vs:
                raise UnknownVertex(f"bidirected edge {set(pair)} mentions unknown vertex")
            bi_edges.add(pair)
        topo = _topological_sort(vs, dir_edges)
        return cls(vs, frozenset(dir_edges), frozenset(bi_edges), topo)

    @cached_property
    def _parents(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for tail, head in self.directed:
            out[head].add(tail)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def _children(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for tail, head in self.directed:
            out[tail].add(head)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def _topo_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.topo)}

    def parents(self, v: str) -> frozenset[str]:
        self._check(frozenset((v,)))
        return self._parents[v]

    def children(self, v: str) -> frozenset[str]:
        self._check(frozenset((v,)))
        return self._children[v]

    def _check(self, s: frozenset[str]) -> None:
        if not s <= self.vertices:
            raise UnknownVertex(f"not in graph: {sorted(s - self.vertices)}")

    def induced(self, s: Iterable[str]) -> "Admg":
        """Node-induced subgraph; keeps the parent ordering restricted to ``s``."""
        sub = frozenset(s)
        self._check(sub)
        return Admg(
            sub,
            frozenset(e for e in self.directed if e[0] in sub and e[1] in sub),
            frozenset(e for e in self.bidirected if e <= sub),
            tuple(v for v in self.topo if v in sub),
        )

    def ancestors(self, s: Iterable[str]) -> frozenset[str]:
        """Reflexive-transitive closure over reversed directed edges."""
        return self._closure(s, self._parents)

    def descendants(self, s: Iterable[str]) -> frozenset[str]:
        """Reflexive-transitive closure over forward directed edges."""
        return self._closure(s, self._children)

    def _closure(self, s: Iterable[str], step: dict[str, frozenset[str]]) -> frozenset[str]:
        seed = frozenset(s)
        self._check(seed)
        seen = set(seed)
        stack = list(seed)
        while stack:
            for nxt in step[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)

    def root_set(self) -> frozenset[str]:
        """Vertices with no proper descendants; never empty for a valid graph."""
        return frozenset(v for v in self.vertices if not self._children[v])

    def cut_incoming(self, x: Iterable[str]) -> "Admg":
        """Remove every arrow into ``x``: directed edges with head in ``x`` and
        bidirected edges touching ``x`` (a confounder is a latent parent)."""
        xs = frozenset(x)
        self._check(xs)
        return Admg(
            self.vertices,
            frozenset(e for e in self.directed if e[1] not in xs),
            frozenset(e for e in self.bidirected if not (e & xs)),
            self.topo,
        )

    def cut_outgoing(self, z: Iterable[str]) -> "Admg":
        """Remove directed edges with tail in ``z``.  Bidirected edges stay: a
        confounded vertex has no outgoing arrow through its confounder."""
        zs = frozenset(z)
        self._check(zs)
        return Admg(
            self.vertices,
            frozenset(e for e in self.directed if e[0] not in zs),
            self.bidirected,
            self.topo,
        )

    def c_components(self) -> tuple[frozenset[str], ...]:
        """Partition of the vertices into maximal confounded components.

        Components are connected parts of ``(vertices, bidirected)``; vertices
        touching no bidirected edge form singletons.  The result is ordered by
        the topological position of each component's earliest member.
        """
        neighbours: dict[str, set[str]] = {v: set() for v in self.vertices}
        for edge in self.bidirected:
            a, b = sorted(edge)
            neighbours[a].add(b)
            neighbours[b].add(a)
        seen: set[str] = set()
        comps: list[frozenset[str]] = []
        for v in self.topo:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                for nxt in neighbours[stack.pop()]:
                    if nxt not in comp:
                        comp.add(nxt)
                        stack.append(nxt)
            seen |= comp
            comps.append(frozenset(comp))
        comps.sort(key=lambda c: min(self._topo_index[v] for v in c))
        return tuple(comps)

    def explicit_confounders(self) -> "Admg":
        """Replace each bidirected edge {a, b} with a fresh latent vertex
        ``U[a,b]`` and arrows into both endpoints."""
        vertices = set(self.vertices)
        directed = set(self.directed)
        for edge in self.bidirected:
            a, b = sorted(edge)
            u = f"U[{a},{b}]"
            if u in vertices:
                raise NameCollision(f"latent name {u} already taken")
            vertices.add(u)
            directed.add((u, a))
            directed.add((u, b))
        return Admg.create(vertices, directed, ())

    def is_subgraph_of(self, other: "Admg") -> bool:
        return (
            self.vertices <= other.vertices
            and self.directed <= other.directed
            and self.bidirected <= other.bidirected
        )


def _topological_sort(vertices: frozenset[str], directed: set[tuple[str, str]]) -> tuple[str, ...]:
    indeg = {v: 0 for v in vertices}
    children: dict[str, list[str]] = {v: [] for v in vertices}
    for tail, head in directed:
        indeg[head] += 1
        children[tail].append(head)
    ready = [v for v in vertices if indeg[v] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in sorted(children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(vertices):
        raise CyclicGraph(f"directed cycle among {sorted(v for v in vertices if v not in order)}")
    return tuple(order)


def parse_graph(edge_specs: Iterable[str]) -> Admg:
    """Build a graph from edge strings like ``A->B`` and ``A<->B``.

    The graph contains exactly the vertices appearing in the edges; duplicate
    edges collapse to one.
    """
    directed: list[tuple[str, str]] = []
    bidirected: list[frozenset[str]] = []
    vertices: set[str] = set()
    for raw in edge_specs:
        token = raw.strip()
        m = _EDGE.match(token)
        if m is None:
            raise ParseError(f"cannot parse edge {raw!r}; expected A->B or A<->B")
        tail, kind, head = m.group(1), m.group(2), m.group(3)
        if tail == head:
            raise SelfLoop(f"self loop in {raw!r}")
        vertices.update((tail, head))
        if kind == "->":
            directed.append((tail, head))
        else:
            bidirected.append(_pair(tail, head))
    if not vertices:
        raise ParseError("no edges given; this format defines vertices through edges")
    return Admg.create(vertices, directed, bidirected)


def parse_graph_text(text: str) -> Admg:
    """Parse the text format: one edge per line or comma-separated, ``#`` comments."""
    tokens: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(t for t in (part.strip() for part in line.split(",")) if t)
    return parse_graph(tokens)


def is_subgraph(g1: Admg, g2: Admg) -> bool:
    """True iff vertices and both edge sets of ``g1`` are contained in ``g2``."""
    return g1.is_subgraph_of(g2)


def graphs_equal(g1: Admg, g2: Admg) -> bool:
    """Set-semantic equality: mutual containment, ignoring vertex order."""
    return g1.is_subgraph_of(g2) and g2.is_subgraph_of(g1)


def previous_in_order(v: str, possible: Iterable[str], order: tuple[str, ...]) -> frozenset[str]:
    """Vertices strictly before ``v`` in ``order``, intersected with ``possible``."""
    if v not in order:
        raise UnknownVertex(f"{v} not in ordering")
    idx = order.index(v)
    return frozenset(order[:idx]) & frozenset(possible)


def to_dot(g: Admg) -> str:
    """Deterministic DOT text; bidirected edges render dashed with dir=both."""
    lines = ["digraph G {"]
    for v in sorted(g.vertices):
        lines.append(f"  {v};")
    for tail, head in sorted(g.directed):
        lines.append(f"  {tail} -> {head};")
    for edge in sorted(g.bidirected, key=sorted):
        a, b = sorted(edge)
        lines.append(f"  {a} -> {b} [dir=both, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
