"""Ground-truth numerics: discrete structural causal models, exact joint and
interventional tables by enumeration, and a numerical evaluator for symbolic
expressions against joint tables.

Models are semi-Markovian: every latent variable is parentless and has
exactly two observed children, matching the bidirected edges of the induced
graph.  Everything is exact (no sampling); table sizes stay tiny at the
graph scales this package targets.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .admg import Admg
from .errors import CyclicGraph, InternalError, UnboundVariable, ZeroDenominator
from .expr import Atom, Expression, Product, Quotient, free_variables

__all__ = [
    "DiscreteScm",
    "JointTable",
    "scm_graph",
    "joint",
    "interventional",
    "conditional_from_table",
    "evaluate",
    "random_scm",
    "load_model",
    "dump_model",
]

Binding = Mapping[str, int]

_ROW_TOL = 1e-12


@dataclass(frozen=True)
class JointTable:
    """An exact joint distribution over named discrete variables."""

    variables: tuple[str, ...]
    domains: tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self):
        if self.probs.shape != self.domains:
            raise InternalError("table shape does not match domains")
        object.__setattr__(self, "_axis", {v: i for i, v in enumerate(self.variables)})
        object.__setattr__(self, "_sums", {})

    def domain_of(self, v: str) -> int:
        return self.domains[self._axis[v]]

    def prob_sum(self, assignment: Binding) -> float:
        """Total mass of all table entries consistent with ``assignment``."""
        key = frozenset(assignment.items())
        cached = self._sums.get(key)
        if cached is not None:
            return cached
        idx = tuple(assignment.get(v, slice(None)) for v in self.variables)
        unknown = set(assignment) - set(self.variables)
        if unknown:
            raise UnboundVariable(f"not in table: {sorted(unknown)}")
        value = float(self.probs[idx].sum())
        self._sums[key] = value
        return value


@dataclass(frozen=True)
class DiscreteScm:
    """A fully specified discrete semi-Markovian causal model.

    ``observed`` and ``latents`` fix name and domain size for each variable;
    latents also carry their marginal distribution.  ``parents`` maps each
    observed variable to an ordered parent list (observed and latent), and
    ``cpts[v]`` has shape ``(domain of v, *parent domains)`` in that order.
    """

    observed: tuple[tuple[str, int], ...]
    latents: tuple[tuple[str, int, tuple[float, ...]], ...]
    parents: Mapping[str, tuple[str, ...]]
    cpts: Mapping[str, np.ndarray]

    def __post_init__(self):
        sizes = {name: k for name, k in self.observed}
        for name, k, marg in self.latents:
            if name in sizes:
                raise InternalError(f"duplicate variable {name}")
            sizes[name] = k
            if len(marg) != k or abs(sum(marg) - 1.0) > _ROW_TOL or min(marg) < 0:
                raise InternalError(f"latent {name} marginal is not a distribution")
        latent_names = {name for name, _, _ in self.latents}
        children: dict[str, list[str]] = {u: [] for u in latent_names}
        for name, k in self.observed:
            if k < 2:
                raise InternalError(f"{name} needs a domain of size >= 2")
            pars = self.parents.get(name, ())
            for p in pars:
                if p not in sizes:
                    raise InternalError(f"unknown parent {p} of {name}")
                if p in latent_names:
                    children[p].append(name)
            cpt = np.asarray(self.cpts[name], dtype=float)
            expect = (k,) + tuple(sizes[p] for p in pars)
            if cpt.shape != expect:
                raise InternalError(f"cpt shape for {name}: {cpt.shape} != {expect}")
            if cpt.min() < 0:
                raise InternalError(f"negative probability in cpt of {name}")
            rows = cpt.reshape(k, -1).sum(axis=0)
            if np.abs(rows - 1.0).max() > _ROW_TOL:
                raise InternalError(f"cpt rows of {name} do not sum to 1")
        for u, ch in children.items():
            if len(ch) != 2:
                raise InternalError(f"latent {u} must have exactly two observed children")
        obs_names = [name for name, _ in self.observed]
        obs_parents = {v: tuple(p for p in self.parents.get(v, ()) if p not in latent_names)
                       for v in obs_names}
        _assert_acyclic(obs_names, obs_parents)
        object.__setattr__(self, "_sizes", sizes)

    def domain_of(self, v: str) -> int:
        return self._sizes[v]


def _assert_acyclic(names: list[str], parents: Mapping[str, tuple[str, ...]]) -> None:
    remaining = {v: set(parents[v]) for v in names}
    while remaining:
        free = sorted(v for v, ps in remaining.items() if not ps)
        if not free:
            raise CyclicGraph(f"cyclic parent structure among {sorted(remaining)}")
        for v in free:
            del remaining[v]
        for ps in remaining.values():
            ps.difference_update(free)


def scm_graph(m: DiscreteScm) -> Admg:
    """The causal diagram of ``m``: observed parent arrows become directed
    edges, each latent becomes a bidirected edge between its two children."""
    latent_names = {name for name, _, _ in m.latents}
    obs = [name for name, _ in m.observed]
    directed = []
    children: dict[str, list[str]] = {u: [] for u in latent_names}
    for v in obs:
        for p in m.parents.get(v, ()):
            if p in latent_names:
                children[p].append(v)
            else:
                directed.append((p, v))
    bidirected = [tuple(ch) for ch in children.values()]
    return Admg.create(obs, directed, bidirected)


def _enumerate(m: DiscreteScm, forced: Binding | None = None) -> JointTable:
    order = [name for name, _ in m.observed]
    latent = [name for name, _, _ in m.latents]
    names = order + latent
    letters = {v: chr(ord("a") + i) for i, v in enumerate(names)}
    if len(names) > 26:
        raise InternalError("too many variables for the enumeration backend")
    operands = []
    subscripts = []
    for name, k, marg in m.latents:
        operands.append(np.asarray(marg, dtype=float))
        subscripts.append(letters[name])
    for name, k in m.observed:
        if forced is not None and name in forced:
            point = np.zeros(k)
            point[forced[name]] = 1.0
            operands.append(point)
            subscripts.append(letters[name])
        else:
            pars = m.parents.get(name, ())
            operands.append(np.asarray(m.cpts[name], dtype=float))
            subscripts.append(letters[name] + "".join(letters[p] for p in pars))
    spec = ",".join(subscripts) + "->" + "".join(letters[v] for v in order)
    probs = np.einsum(spec, *operands)
    domains = tuple(k for _, k in m.observed)
    return JointTable(tuple(order), domains, probs)


def joint(m: DiscreteScm) -> JointTable:
    """Exact observational distribution, latents summed out."""
    return _enumerate(m)


def interventional(m: DiscreteScm, x: Binding) -> JointTable:
    """Distribution of the mutilated model where each variable in ``x`` is
    forced to the given value (its mechanism replaced by a point mass)."""
    observed = {name for name, _ in m.observed}
    unknown = set(x) - observed
    if unknown:
        raise UnboundVariable(f"cannot intervene on {sorted(unknown)}")
    return _enumerate(m, dict(x))


def conditional_from_table(t: JointTable, var: Binding, cond: Binding) -> float:
    """``P(var | cond)`` as a ratio of summed table entries."""
    if set(var) & set(cond):
        raise ZeroDenominator(f"var/cond overlap: {sorted(set(var) & set(cond))}")
    den = t.prob_sum(cond) if cond else 1.0
    if den == 0.0:
        raise ZeroDenominator(f"conditioning event has zero mass: {dict(cond)}")
    num = t.prob_sum({**var, **cond})
    return num / den


def evaluate(e: Expression, t: JointTable, b: Binding) -> float:
    """Numerical value of ``e`` on table ``t`` under binding ``b``.

    ``b`` must cover all free variables of ``e``; sum variables are bound
    internally and shadow outer bindings.
    """
    missing = {v for v in free_variables(e) if v not in b}
    if missing:
        raise UnboundVariable(f"unbound variables: {sorted(missing)}")
    return _eval(e, t, dict(b))


def _eval(e: Expression, t: JointTable, b: dict[str, int]) -> float:
    if isinstance(e, Atom):
        return conditional_from_table(
            t, {v: b[v] for v in e.var}, {c: b[c] for c in e.cond}
        )
    if isinstance(e, Product):
        out = 1.0
        for c in e.children:
            out *= _eval(c, t, b)
        return out
    if isinstance(e, Quotient):
        den = _eval(e.den, t, b)
        if den == 0.0:
            raise ZeroDenominator("quotient denominator evaluated to zero")
        return _eval(e.num, t, b) / den
    names = sorted(e.sumset)
    terms = []
    inner = dict(b)
    for values in itertools.product(*(range(t.domain_of(v)) for v in names)):
        inner.update(zip(names, values))
        terms.append(_eval(e.body, t, inner))
    return math.fsum(terms)


def random_scm(
    g: Admg,
    seed: int,
    domain_sizes: Mapping[str, int] | int = 2,
) -> DiscreteScm:
    """A fully specified random model compatible with ``g``.

    CPT entries are drawn uniformly from [0.05, 1] before row normalisation,
    keeping every conditional strictly positive; one binary latent is created
    per bidirected edge.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    if isinstance(domain_sizes, int):
        domain_sizes = {v: domain_sizes for v in g.vertices}
    observed = tuple((v, domain_sizes[v]) for v in g.topo)
    latents = []
    latent_parents: dict[str, list[str]] = {v: [] for v in g.vertices}
    for edge in sorted(g.bidirected, key=sorted):
        a, b = sorted(edge)
        u = f"U[{a},{b}]"
        marg = rng.uniform(0.05, 1.0, size=2)
        marg /= marg.sum()
        latents.append((u, 2, tuple(float(p) for p in marg)))
        latent_parents[a].append(u)
        latent_parents[b].append(u)
    latent_size = {name: k for name, k, _ in latents}
    parents = {}
    cpts = {}
    for v, k in observed:
        pars = tuple(sorted(g.parents(v))) + tuple(latent_parents[v])
        parents[v] = pars
        shape = (k,) + tuple(latent_size.get(p) or domain_sizes[p] for p in pars)
        raw = rng.uniform(0.05, 1.0, size=shape)
        cpts[v] = raw / raw.sum(axis=0, keepdims=True)
    return DiscreteScm(observed, tuple(latents), parents, cpts)


# --- model files -------------------------------------------------------------

def load_model(text: str) -> DiscreteScm:
    """Parse the JSON model document (see README for the schema).

    CPT rows are keyed by comma-joined parent values in declared parent
    order (empty key for parentless variables); each row is a distribution
    over the variable's own values and is validated on load.
    """
    doc = json.loads(text)
    observed = tuple((o["name"], int(o["domain"])) for o in doc["observed"])
    latents = tuple(
        (l["name"], int(l["domain"]), tuple(float(p) for p in l["marginal"]))
        for l in doc.get("latents", [])
    )
    sizes = {name: k for name, k in observed}
    sizes.update({name: k for name, k, _ in latents})
    parents = {name: tuple(doc.get("parents", {}).get(name, ())) for name, _ in observed}
    cpts = {}
    for name, k in observed:
        pars = parents[name]
        rows = doc["cpts"][name]
        shape = (k,) + tuple(sizes[p] for p in pars)
        cpt = np.zeros(shape)
        expected = list(itertools.product(*(range(sizes[p]) for p in pars)))
        for combo in expected:
            key = ",".join(str(v) for v in combo)
            if key not in rows:
                raise InternalError(f"cpt of {name} misses row for parents {key!r}")
            row = [float(p) for p in rows[key]]
            if len(row) != k:
                raise InternalError(f"cpt row {key!r} of {name} has wrong arity")
            cpt[(slice(None),) + combo] = row
        cpts[name] = cpt
    return DiscreteScm(observed, latents, parents, cpts)


def dump_model(m: DiscreteScm) -> str:
    """Serialise a model back to the JSON document format."""
    doc = {
        "observed": [{"name": n, "domain": k} for n, k in m.observed],
        "latents": [
            {"name": n, "domain": k, "marginal": list(marg)} for n, k, marg in m.latents
        ],
        "parents": {n: list(ps) for n, ps in sorted(m.parents.items()) if ps},
        "cpts": {},
    }
    sizes = {n: k for n, k in m.observed}
    sizes.update({n: k for n, k, _ in m.latents})
    for name, k in m.observed:
        pars = m.parents.get(name, ())
        rows = {}
        for combo in itertools.product(*(range(sizes[p]) for p in pars)):
            key = ",".join(str(v) for v in combo)
            rows[key] = [float(x) for x in m.cpts[name][(slice(None),) + combo]]
        doc["cpts"][name] = rows
    return json.dumps(doc, indent=2, sort_keys=True)
