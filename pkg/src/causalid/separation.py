"""d-separation tests on ADMGs.

Both checkers work on the explicit-confounder expansion of the graph, where
each bidirected edge is replaced by a latent fork; edge surgery must see
confounders as incoming arrows, and latent vertices never appear in
conditioning sets.

Two implementations are provided: a production reachability checker (linear
in the size of the expanded graph) and a naive oracle that enumerates every
simple path and tests each for blocking.  They must agree; the oracle exists
for the test suite.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .admg import Admg
from .errors import InvalidPath, OverlappingSets, UnknownVertex

__all__ = ["d_separated", "d_separated_naive", "path_blocked"]


def _validated(g: Admg, xs, ys, zs):
    xs, ys, zs = frozenset(xs), frozenset(ys), frozenset(zs)
    for s in (xs, ys, zs):
        if not s <= g.vertices:
            raise UnknownVertex(f"not in graph: {sorted(s - g.vertices)}")
    if xs & ys:
        raise OverlappingSets(f"query sets overlap: {sorted(xs & ys)}")
    if zs & (xs | ys):
        raise OverlappingSets(f"conditioning set overlaps query sets: {sorted(zs & (xs | ys))}")
    return xs, ys, zs


def d_separated(g: Admg, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()) -> bool:
    """True iff every path between ``xs`` and ``ys`` is blocked by ``zs``.

    Uses active-trail reachability on the explicit-confounder graph.
    """
    xs, ys, zs = _validated(g, xs, ys, zs)
    if not xs or not ys:
        return True
    ex = g.explicit_confounders()
    ancestors_of_z = ex.ancestors(zs) if zs else frozenset()
    up, down = "up", "down"
    seen: set[tuple[str, str]] = set()
    queue: deque[tuple[str, str]] = deque((x, up) for x in xs)
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in seen:
            continue
        seen.add((v, direction))
        if v in ys and v not in zs:
            return False
        if direction == up and v not in zs:
            for p in ex.parents(v):
                queue.append((p, up))
            for c in ex.children(v):
                queue.append((c, down))
        elif direction == down:
            if v not in zs:
                for c in ex.children(v):
                    queue.append((c, down))
            if v in ancestors_of_z:
                for p in ex.parents(v):
                    queue.append((p, up))
    return True


def d_separated_naive(
    g: Admg, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()
) -> bool:
    """Reference oracle: enumerate all simple paths and check each is blocked.

    Exponential; intended for tests on small graphs.
    """
    xs, ys, zs = _validated(g, xs, ys, zs)
    ex = g.explicit_confounders()
    for x in sorted(xs):
        for y in sorted(ys):
            for path in _simple_paths(ex, x, y):
                if not _blocked(ex, path, zs):
                    return False
    return True


def _simple_paths(ex: Admg, start: str, goal: str):
    adjacency = {v: sorted(ex.parents(v) | ex.children(v)) for v in ex.vertices}
    path = [start]
    on_path = {start}

    def walk(v):
        if v == goal:
            yield tuple(path)
            return
        for nxt in adjacency[v]:
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            yield from walk(nxt)
            path.pop()
            on_path.remove(nxt)

    yield from walk(start)


def _blocked(ex: Admg, path: Sequence[str], zs: frozenset[str]) -> bool:
    if len(path) < 3:
        return False
    for i in range(1, len(path) - 1):
        prev, mid, nxt = path[i - 1], path[i], path[i + 1]
        collider = (prev, mid) in ex.directed and (nxt, mid) in ex.directed
        if collider:
            if not (ex.descendants((mid,)) & zs):
                return True
        elif mid in zs:
            return True
    return False


def path_blocked(g: Admg, path: Sequence[str], zs: Iterable[str]) -> bool:
    """True iff ``path`` (in the explicit-confounder graph) is blocked by ``zs``:
    it contains a chain or fork through a conditioned vertex, or a collider
    none of whose descendants is conditioned."""
    ex = g.explicit_confounders()
    zset = frozenset(zs)
    if not zset <= ex.vertices:
        raise UnknownVertex(f"not in graph: {sorted(zset - ex.vertices)}")
    if len(path) < 2:
        raise InvalidPath("a path needs at least two vertices")
    if len(set(path)) != len(path):
        raise InvalidPath("path vertices must be distinct")
    for a, b in zip(path, path[1:]):
        if a not in ex.vertices or b not in ex.vertices:
            raise UnknownVertex(f"path mentions unknown vertex: {a} or {b}")
        if (a, b) not in ex.directed and (b, a) not in ex.directed:
            raise InvalidPath(f"{a} and {b} are not adjacent")
    return _blocked(ex, tuple(path), zset)
