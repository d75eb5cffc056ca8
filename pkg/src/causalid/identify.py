"""Recursive identification of causal effects on ADMGs.

``identify`` answers queries ``P_x(y)`` and ``P_x(y|z)``: it either returns
a do-free symbolic expression over the observational distribution or raises
``NotIdentifiable`` carrying a hedge witness, the pair of root-linked
confounded forests that blocks the failing sub-query.

The unconditional recursion peels the problem apart line by line: drop the
do-operator when no interventions remain, restrict to ancestors of the
outcome, absorb vertices that interventions cut off, split across confounded
components, and fail or factorise when a single component remains.  The
conditional entry point moves conditioning variables into the intervention
set while rule 2 of the do-calculus allows it, then divides one
unconditional result by its marginal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .admg import Admg, previous_in_order
from .errors import InternalError, InvalidQuery
from .expr import Expression, Atom, Quotient, conditional, marginalize, product, simplify
from .separation import d_separated

__all__ = [
    "Query",
    "HedgeWitness",
    "NotIdentifiable",
    "TraceStep",
    "identify",
    "id_uncond",
    "idc",
    "hedge_search_witness",
    "thin_to_forests",
]


@dataclass(frozen=True)
class Query:
    """Outcomes ``y``, interventions ``x`` and conditions ``z``; pairwise disjoint."""

    y: frozenset[str]
    x: frozenset[str] = field(default_factory=frozenset)
    z: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def of(cls, y: Iterable[str], x: Iterable[str] = (), z: Iterable[str] = ()) -> "Query":
        return cls(frozenset(y), frozenset(x), frozenset(z))


@dataclass(frozen=True)
class HedgeWitness:
    """The pair of graphs returned by the fail line, with the failing sub-query.

    ``forest_f`` is the whole single-component graph at the failure point and
    ``forest_f_sub`` its induced subgraph on the unintervened vertices; both
    contain root-linked confounded forests as edge subgraphs (see
    ``thin_to_forests``)."""

    forest_f: Admg
    forest_f_sub: Admg
    sub_x: frozenset[str]
    sub_y: frozenset[str]

    def describe(self) -> str:
        return (
            f"hedge for {_query_label(self.sub_y, self.sub_x)}: "
            f"F = {sorted(self.forest_f.vertices)}, "
            f"F' = {sorted(self.forest_f_sub.vertices)}"
        )


class NotIdentifiable(Exception):
    """Raised when the causal effect has no do-free expression."""

    def __init__(self, witness: HedgeWitness):
        self.witness = witness
        super().__init__(witness.describe())


@dataclass(frozen=True)
class TraceStep:
    depth: int
    line: str
    query: str
    vertices: tuple[str, ...]


def _query_label(y: Iterable[str], x: Iterable[str], z: Iterable[str] = ()) -> str:
    ys = ", ".join(sorted(v.lower() for v in y))
    xs = ", ".join(sorted(v.lower() for v in x))
    zs = ", ".join(sorted(v.lower() for v in z))
    head = f"P_{{{xs}}}" if xs else "P"
    return f"{head}({ys}|{zs})" if zs else f"{head}({ys})"


def _log(log, depth, line, y, x, z, g):
    if log is not None:
        log.append(TraceStep(depth, line, _query_label(y, x, z), g.topo))


def identify(
    q: Query,
    g: Admg,
    log: list[TraceStep] | None = None,
    simplify_result: bool = True,
) -> Expression:
    """Identify ``P_x(y)`` or ``P_x(y|z)`` in ``g``.

    Returns the simplified do-free expression; raises ``NotIdentifiable``
    with a hedge witness otherwise, or ``InvalidQuery`` for malformed input.
    ``simplify_result=False`` returns the raw recursion output.
    """
    if not q.y:
        raise InvalidQuery("the outcome set y must not be empty")
    for name, s in (("y", q.y), ("x", q.x), ("z", q.z)):
        if not s <= g.vertices:
            raise InvalidQuery(f"{name} mentions unknown vertices: {sorted(s - g.vertices)}")
    if q.y & q.x or q.y & q.z or q.x & q.z:
        raise InvalidQuery("y, x and z must be pairwise disjoint")
    p0: Expression = Atom(g.vertices)
    if q.z:
        result = idc(q.y, q.x, q.z, p0, g, g.topo, log)
    else:
        result = id_uncond(q.y, q.x, p0, g, g.topo, log)
    return simplify(result) if simplify_result else result


def id_uncond(
    y: frozenset[str],
    x: frozenset[str],
    p: Expression,
    g: Admg,
    order: tuple[str, ...],
    log: list[TraceStep] | None = None,
    depth: int = 0,
) -> Expression:
    """The unconditional recursion; exactly one line fires per invocation."""
    if depth > 2 * len(order) + 2:
        raise InternalError("recursion exceeded its theoretical depth bound")
    v = g.vertices

    # line 1: no interventions left, plain marginalisation
    if not x:
        _log(log, depth, "ID-1", y, x, (), g)
        return marginalize(p, v - y)

    # line 2: restrict to ancestors of y
    an_y = g.ancestors(y)
    if v != an_y:
        _log(log, depth, "ID-2", y, x, (), g)
        return id_uncond(
            y, x & an_y, marginalize(p, v - an_y), g.induced(an_y), order, log, depth + 1
        )

    # line 3: absorb vertices cut off from y by the interventions
    w = (v - x) - g.cut_incoming(x).ancestors(y)
    if w:
        _log(log, depth, "ID-3", y, x, (), g)
        return id_uncond(y, x | w, p, g, order, log, depth + 1)

    comps_vx = g.induced(v - x).c_components()

    # line 4: split over the confounded components of G[V \ X]
    if len(comps_vx) > 1:
        _log(log, depth, "ID-4", y, x, (), g)
        results: dict[frozenset[str], Expression] = {}
        for si in reversed(comps_vx):
            results[si] = id_uncond(si, v - si, p, g, order, log, depth + 1)
        children = [results[si] for si in comps_vx]
        return marginalize(product(children), v - (y | x))

    s = comps_vx[0]
    comps_g = g.c_components()

    # line 5: a single component spanning the whole graph is a hedge
    if len(comps_g) == 1:
        _log(log, depth, "ID-5", y, x, (), g)
        raise NotIdentifiable(hedge_search_witness(g, s, x, y))

    # line 6: the component is itself confounded-maximal, factorise directly
    if s in comps_g:
        _log(log, depth, "ID-6", y, x, (), g)
        factors = [
            conditional(p, (vi,), previous_in_order(vi, v, order), scope=v)
            for vi in order
            if vi in s
        ]
        return marginalize(product(factors), s - y)

    # line 7: recurse inside the maximal component containing it
    for s_prime in comps_g:
        if s < s_prime:
            _log(log, depth, "ID-7", y, x, (), g)
            factors = [
                conditional(p, (vi,), previous_in_order(vi, v, order), scope=v)
                for vi in order
                if vi in s_prime
            ]
            return id_uncond(
                y, x & s_prime, product(factors), g.induced(s_prime), order, log, depth + 1
            )

    raise InternalError("no identification line applies; this cannot happen")


def idc(
    y: frozenset[str],
    x: frozenset[str],
    z: frozenset[str],
    p: Expression,
    g: Admg,
    order: tuple[str, ...],
    log: list[TraceStep] | None = None,
    depth: int = 0,
) -> Expression:
    """The conditional recursion.

    Line 1 moves a conditioning vertex into the interventions whenever rule 2
    of the do-calculus licenses the exchange, checked by d-separation in the
    graph with arrows into ``x`` and out of the candidate removed; candidates
    are tried in topological order.  Line 2 divides the unconditional result
    for ``y union z`` by its marginal over ``y``.
    """
    for z_i in (u for u in order if u in z):
        surgery = g.cut_incoming(x).cut_outgoing((z_i,))
        if d_separated(surgery, y, (z_i,), x | (z - {z_i})):
            _log(log, depth, "IDC-1", y, x, z, g)
            return idc(y, x | {z_i}, z - {z_i}, p, g, order, log, depth + 1)
    _log(log, depth, "IDC-2", y, x, z, g)
    p_prime = id_uncond(y | z, x, p, g, order, log, depth + 1)
    return Quotient(p_prime, marginalize(p_prime, y))


def hedge_search_witness(
    g: Admg, s: frozenset[str], x: frozenset[str], y: frozenset[str]
) -> HedgeWitness:
    """The witness for the fail line: the pair ``(G, G[S])`` with the failing
    sub-query.  ``thin_to_forests`` turns the pair into literal one-child
    forests when wanted."""
    return HedgeWitness(g, g.induced(s), x, y)


def thin_to_forests(witness: HedgeWitness) -> tuple[Admg, Admg]:
    """Greedily drop extra child edges from the witness graphs, preserving
    the root set, so each vertex keeps at most one child.

    Inner-graph vertices prefer children inside the inner graph, keeping the
    restriction of the thinned outer graph root-preserving as well."""
    f = _thin(witness.forest_f, prefer=witness.forest_f_sub.vertices)
    sub = witness.forest_f_sub.vertices
    f_sub = Admg(
        sub,
        frozenset(e for e in f.directed if e[0] in sub and e[1] in sub),
        frozenset(e for e in witness.forest_f_sub.bidirected),
        witness.forest_f_sub.topo,
    )
    return f, f_sub


def _thin(g: Admg, prefer: frozenset[str] = frozenset()) -> Admg:
    roots = g.root_set()
    reaches = set(roots)
    keep: set[tuple[str, str]] = set()
    for v in reversed(g.topo):
        if v in roots:
            continue
        targets = sorted(c for c in g.children(v) if c in reaches)
        if not targets:
            raise InternalError(f"{v} cannot reach the root set; graph is not ancestral")
        if v in prefer:
            inside = [c for c in targets if c in prefer]
            targets = inside or targets
        keep.add((v, targets[0]))
        reaches.add(v)
    return Admg(g.vertices, frozenset(keep), g.bidirected, g.topo)
