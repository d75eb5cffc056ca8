"""Symbolic probability expressions and their simplification.

The algebra has four immutable variants: atoms ``P(var | cond)``, products,
marginal sums and quotients.  ``simplify`` rewrites to a fixed point using a
small set of value-preserving rules (law of total probability, chain-rule
merging of sibling atoms, fraction elimination, pushing sums into the single
factor that mentions the summed variable) plus structural normalisation:
nested products flatten, product children are kept in a canonical order
sorted by their rendered form, and sums over variables absent from the body
are dropped.

Variable names are stored as written (usually upper case); rendering
lowercases them, following the convention that lower case letters stand for
values of the corresponding variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

from .errors import EmptyVar, InternalError

__all__ = [
    "Atom",
    "Product",
    "Marginal",
    "Quotient",
    "Expression",
    "atom",
    "product",
    "marginal",
    "quotient",
    "free_variables",
    "marginalize",
    "conditional",
    "simplify",
    "to_latex",
    "expressions_equal",
    "to_dict",
    "from_dict",
]


@dataclass(frozen=True)
class Atom:
    """A conditional distribution ``P(var | cond)``; ``var`` is non-empty and
    disjoint from ``cond``."""

    var: frozenset[str]
    cond: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.var:
            raise EmptyVar("atom needs a non-empty outcome set")
        if self.var & self.cond:
            raise EmptyVar(f"atom var/cond overlap: {sorted(self.var & self.cond)}")


@dataclass(frozen=True)
class Product:
    children: tuple["Expression", ...]


@dataclass(frozen=True)
class Marginal:
    sumset: frozenset[str]
    body: "Expression"


@dataclass(frozen=True)
class Quotient:
    num: "Expression"
    den: "Expression"


Expression = Union[Atom, Product, Marginal, Quotient]


def atom(var: Iterable[str], cond: Iterable[str] = ()) -> Atom:
    return Atom(frozenset(var), frozenset(cond))


def product(children: Iterable[Expression]) -> Expression:
    kids = tuple(children)
    if not kids:
        raise EmptyVar("product needs at least one factor")
    if len(kids) == 1:
        return kids[0]
    return Product(kids)


def marginal(sumset: Iterable[str], body: Expression) -> Expression:
    ss = frozenset(sumset)
    if not ss:
        return body
    return Marginal(ss, body)


def quotient(num: Expression, den: Expression) -> Quotient:
    return Quotient(num, den)


@lru_cache(maxsize=None)
def free_variables(e: Expression) -> frozenset[str]:
    """Names occurring in var/cond positions, minus enclosing sum bindings."""
    if isinstance(e, Atom):
        return e.var | e.cond
    if isinstance(e, Product):
        out: frozenset[str] = frozenset()
        for c in e.children:
            out |= free_variables(c)
        return out
    if isinstance(e, Marginal):
        return free_variables(e.body) - e.sumset
    return free_variables(e.num) | free_variables(e.den)


def marginalize(e: Expression, vs: Iterable[str]) -> Expression:
    """Sum ``e`` over ``vs``.

    An unconditioned atom just loses the summed variables from its outcome
    set; anything else is wrapped in a sum over the variables actually free
    in ``e`` (identity when none are).
    """
    drop = frozenset(vs)
    if not drop:
        return e
    if isinstance(e, Atom) and not e.cond and e.var - drop:
        return Atom(e.var - drop, e.cond)
    return marginal(drop & free_variables(e), e)


def conditional(
    p: Expression,
    var: Iterable[str],
    cond: Iterable[str] = (),
    scope: Iterable[str] | None = None,
) -> Expression:
    """The distribution ``p(var | cond)`` derived from a distribution ``p``.

    ``scope`` is the variable set ``p`` is a distribution over; it defaults
    to the free variables of ``p`` but callers that carry value parameters
    inside ``p`` (conditioning values fixed by an outer context) must pass
    the intended scope explicitly.
    """
    vset = frozenset(var)
    cset = frozenset(cond)
    if not vset:
        raise EmptyVar("conditional needs a non-empty outcome set")
    if vset & cset:
        raise EmptyVar(f"var/cond overlap: {sorted(vset & cset)}")
    vscope = frozenset(scope) if scope is not None else free_variables(p)
    if not cset:
        return simplify(marginalize(p, vscope - vset))
    num = marginalize(p, vscope - (vset | cset))
    den = marginalize(p, vscope - cset)
    return simplify(Quotient(num, den))


# --- simplification ---------------------------------------------------------

class _Unit:
    """Internal marker for a subexpression that reduced to the constant 1."""

    __slots__ = ()

    def __repr__(self):  # pragma: no cover
        return "<unit>"


_ONE = _Unit()
_MAX_PASSES = 200


def simplify(e: Expression, merge_chains: bool = True) -> Expression:
    """Apply the rewrite rules to a fixed point; idempotent and terminating.

    ``merge_chains=False`` disables the chain-rule merging of sibling atoms,
    leaving factorised products visible.  An expression that reduces to the
    constant 1 in a position that cannot absorb it (the root, or the
    numerator of a quotient) is kept verbatim, since the algebra has no unit
    element.
    """
    cur = e
    for _ in range(_MAX_PASSES):
        nxt = _simp(cur, merge_chains)
        if nxt is _ONE:
            return cur
        if nxt == cur:
            return cur
        cur = nxt
    raise InternalError("simplify did not reach a fixed point")


def _simp(e: Expression, merge_chains: bool = True):
    if isinstance(e, Atom):
        return e
    if isinstance(e, Product):
        return _simp_product(e, merge_chains)
    if isinstance(e, Marginal):
        return _simp_marginal(e, merge_chains)
    return _simp_quotient(e, merge_chains)


def _sort_key(e: Expression) -> str:
    return to_latex(e)


def _rebuild_product(kids: list[Expression]):
    if not kids:
        return _ONE
    if len(kids) == 1:
        return kids[0]
    return Product(tuple(sorted(kids, key=_sort_key)))


def _simp_product(e: Product, merge_chains: bool = True):
    kids: list[Expression] = []
    for child in e.children:
        s = _simp(child, merge_chains)
        if s is _ONE:
            continue
        if isinstance(s, Product):
            kids.extend(s.children)
        else:
            kids.append(s)
    kids.sort(key=_sort_key)
    # chain-rule merge: P(a|b,c) P(b|c) -> P(a,b|c), rescanning after each merge
    merged = merge_chains
    while merged:
        merged = False
        for i, p1 in enumerate(kids):
            if not isinstance(p1, Atom):
                continue
            for j, p2 in enumerate(kids):
                if i == j or not isinstance(p2, Atom):
                    continue
                if p1.cond == p2.var | p2.cond:
                    combined = Atom(p1.var | p2.var, p1.cond - p2.var)
                    for k in sorted((i, j), reverse=True):
                        del kids[k]
                    kids.append(combined)
                    kids.sort(key=_sort_key)
                    merged = True
                    break
            if merged:
                break
    return _rebuild_product(kids)


def _simp_marginal(e: Marginal, merge_chains: bool = True):
    body = _simp(e.body, merge_chains)
    if body is _ONE:
        return _ONE
    sumset = set(e.sumset)
    if isinstance(body, Marginal):
        sumset |= body.sumset
        body = body.body
    sumset &= free_variables(body)
    if not sumset:
        return body
    if isinstance(body, Atom):
        return _sum_over_atom(sumset, body)
    if isinstance(body, Product):
        return _sum_over_product(sumset, body)
    return Marginal(frozenset(sumset), body)


def _sum_over_atom(sumset: set[str], body: Atom):
    inside = sumset & body.var
    if inside == body.var:
        # the whole outcome set is summed out; only a clean collapse to 1 is
        # representable, so leftover sums over pure conditioning variables stay
        if sumset == inside:
            return _ONE
        return Marginal(frozenset(sumset), body)
    if inside:
        body = Atom(body.var - inside, body.cond)
        sumset -= inside
    if not sumset:
        return body
    return Marginal(frozenset(sumset), body)


def _sum_over_product(sumset: set[str], body: Product):
    kids = list(body.children)
    progress = True
    while progress and sumset:
        progress = False
        for s in sorted(sumset):
            owners = [i for i, c in enumerate(kids) if s in free_variables(c)]
            if len(owners) != 1:
                continue
            i = owners[0]
            child = kids[i]
            if isinstance(child, Atom) and s in child.var:
                if child.var == frozenset((s,)):
                    # dropping the factor must not orphan another sum variable
                    rest = [c for k, c in enumerate(kids) if k != i]
                    orphaned = {
                        t
                        for t in child.cond & sumset
                        if t != s and not any(t in free_variables(c) for c in rest)
                    }
                    if orphaned:
                        continue
                    del kids[i]
                else:
                    kids[i] = Atom(child.var - {s}, child.cond)
                sumset.discard(s)
                progress = True
                break
            if isinstance(child, Marginal):
                # product children are already flattened, so the only
                # composite single owners are sums and quotients; quotients
                # keep the variable in the outer sum set
                kids[i] = Marginal(child.sumset | {s}, child.body)
                sumset.discard(s)
                progress = True
                break
    rebuilt = _rebuild_product(kids)
    if rebuilt is _ONE:
        return _ONE
    if not sumset:
        return rebuilt
    return Marginal(frozenset(sumset), rebuilt)


def _simp_quotient(e: Quotient, merge_chains: bool = True):
    num = _simp(e.num, merge_chains)
    den = _simp(e.den, merge_chains)
    if den is _ONE:
        return num if num is not _ONE else _ONE
    if num is _ONE:
        return e  # 1/den has no representation; keep the quotient verbatim
    if num == den:
        return _ONE
    num, den = _cancel_common(num, den)
    if den is _ONE:
        return num
    folded = _fold_fraction(num, den)
    if folded is not None:
        return folded
    return Quotient(num, den)


def _cancel_common(num: Expression, den: Expression):
    """Remove factors appearing in both sides of a quotient of bare products."""
    if not isinstance(num, Product) and not isinstance(den, Product):
        return num, den
    nk = list(num.children) if isinstance(num, Product) else [num]
    dk = list(den.children) if isinstance(den, Product) else [den]
    changed = False
    for c in sorted(nk, key=_sort_key):
        if len(nk) == 1:
            break  # a bare-unit numerator has no representation
        if c in dk:
            nk.remove(c)
            dk.remove(c)
            changed = True
    if not changed:
        return num, den
    return _rebuild_product(nk), _rebuild_product(dk)


def _fold_fraction(num: Expression, den: Expression):
    """Fraction elimination: an unconditioned atomic denominator whose
    variables sit inside the numerator's atom becomes conditioning there."""
    if not isinstance(den, Atom) or den.cond:
        return None
    if isinstance(num, Atom):
        target, sums = num, frozenset()
    elif isinstance(num, Marginal) and isinstance(num.body, Atom):
        target, sums = num.body, num.sumset
    else:
        return None
    if not (den.var < target.var) or den.var & sums:
        return None
    folded = Atom(target.var - den.var, target.cond | den.var)
    if sums:
        return Marginal(sums, folded)
    return folded


# --- rendering and serialisation --------------------------------------------

def _names(vs: Iterable[str]) -> str:
    return ", ".join(sorted(v.lower() for v in vs))


@lru_cache(maxsize=None)
def to_latex(e: Expression) -> str:
    """Deterministic LaTeX rendering; variables print lower case and sorted."""
    if isinstance(e, Atom):
        if e.cond:
            return f"P({_names(e.var)}|{_names(e.cond)})"
        return f"P({_names(e.var)})"
    if isinstance(e, Marginal):
        return f"\\sum_{{{_names(e.sumset)}}}{to_latex(e.body)}"
    if isinstance(e, Quotient):
        return f"\\frac{{{to_latex(e.num)}}}{{{to_latex(e.den)}}}"
    parts = []
    last = len(e.children) - 1
    for i, child in enumerate(e.children):
        rendered = to_latex(child)
        if isinstance(child, Marginal) and i != last:
            rendered = f"({rendered})"
        parts.append(rendered)
    return "".join(parts)


def expressions_equal(a: Expression, b: Expression) -> bool:
    """Structural equality after simplification and canonical ordering."""
    return simplify(a) == simplify(b)


def to_dict(e: Expression) -> dict:
    """Serialise to the nested-record form used by the CLI (sets as sorted lists)."""
    if isinstance(e, Atom):
        return {"kind": "atom", "var": sorted(e.var), "cond": sorted(e.cond)}
    if isinstance(e, Product):
        return {"kind": "product", "children": [to_dict(c) for c in e.children]}
    if isinstance(e, Marginal):
        return {"kind": "marginal", "sumset": sorted(e.sumset), "body": to_dict(e.body)}
    return {"kind": "quotient", "num": to_dict(e.num), "den": to_dict(e.den)}


def from_dict(d: dict) -> Expression:
    kind = d["kind"]
    if kind == "atom":
        return atom(d["var"], d.get("cond", ()))
    if kind == "product":
        return Product(tuple(from_dict(c) for c in d["children"]))
    if kind == "marginal":
        return Marginal(frozenset(d["sumset"]), from_dict(d["body"]))
    if kind == "quotient":
        return Quotient(from_dict(d["num"]), from_dict(d["den"]))
    raise InternalError(f"unknown expression kind {kind!r}")
