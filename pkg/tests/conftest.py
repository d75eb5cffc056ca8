"""Shared graph and model fixtures.

The named graphs are the worked examples used throughout the test suite:
the front-door and bow-arc graphs, the seasonal sunscreen model (season
drives weather, both drive sunscreen use), and the larger mixed graphs
whose identification runs are pinned as goldens.
"""

import itertools

import numpy as np
import pytest

from causalid.admg import Admg, parse_graph
from causalid.oracle import DiscreteScm


@pytest.fixture
def front_door():
    return parse_graph(["X->Z", "Z->Y", "X<->Y"])


@pytest.fixture
def bow_arc():
    return parse_graph(["X->Y", "X<->Y"])


@pytest.fixture
def sunscreen_graph():
    # Z season, X sunny, Y sunscreen
    return parse_graph(["Z->X", "Z->Y", "X->Y"])


@pytest.fixture
def hedge_graph():
    # single confounded component around X once Y is cut away
    return parse_graph(["X->Z", "Z->W", "W->Y", "X<->Z", "X<->W"])


@pytest.fixture
def conditional_graph():
    # the conditional-query example: intervening on X and conditioning on Z
    # leaves W free in the identified expression
    return parse_graph(["W->X", "W->Z", "X->Z", "Z->Y", "X<->Y"])


@pytest.fixture
def pregnancy_graph():
    return parse_graph(
        ["W->X", "X->Y1", "Z->Y2", "W<->Y1", "W<->Z", "Z<->Y2", "X<->Z"]
    )


@pytest.fixture
def pregnancy_graph_variant():
    return parse_graph(
        ["W->X", "X->Y1", "Z->Y2", "W->Z", "W<->Y1", "W<->Z", "Z<->Y2", "X<->Z"]
    )


@pytest.fixture
def collider_chain():
    # two X-Y paths, both through colliders; measuring Z1 unblocks them
    return parse_graph(["X->Z1", "Z2->Z1", "Z3->Z2", "Y->Z3", "Z1<->Z3"])


def make_sunscreen_scm() -> DiscreteScm:
    cpt_z = np.array([0.75, 0.25])
    cpt_x = np.array([[0.30, 0.10], [0.70, 0.90]])
    cpt_y = np.zeros((2, 2, 2))
    cpt_y[1, 1, 1] = 0.99
    cpt_y[1, 1, 0] = 0.20
    cpt_y[1, 0, 1] = 0.60
    cpt_y[1, 0, 0] = 0.05
    cpt_y[0] = 1.0 - cpt_y[1]
    return DiscreteScm(
        observed=(("Z", 2), ("X", 2), ("Y", 2)),
        latents=(),
        parents={"Z": (), "X": ("Z",), "Y": ("X", "Z")},
        cpts={"Z": cpt_z, "X": cpt_x, "Y": cpt_y},
    )


@pytest.fixture
def sunscreen_scm():
    return make_sunscreen_scm()


def random_admg(rng, max_vertices=6, max_bidirected=4, p_edge=0.45) -> Admg:
    """A random ADMG with a fixed vertex naming scheme; edges follow index order
    so the directed part is a DAG by construction."""
    n = int(rng.integers(2, max_vertices + 1))
    names = [f"V{i}" for i in range(n)]
    directed = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p_edge
    ]
    pairs = list(itertools.combinations(names, 2))
    order = rng.permutation(len(pairs))
    count = int(rng.integers(0, max_bidirected + 1))
    bidirected = [pairs[i] for i in order[:count]]
    return Admg.create(names, directed, bidirected)


def random_query(rng, g, allow_empty_x=False):
    """A random (y, x) pair of disjoint non-empty-y vertex sets."""
    names = sorted(g.vertices)
    perm = [names[i] for i in rng.permutation(len(names))]
    ny = int(rng.integers(1, max(2, len(names) - 1)))
    y = frozenset(perm[:ny])
    rest = perm[ny:]
    low = 0 if allow_empty_x else min(1, len(rest))
    nx = int(rng.integers(low, len(rest) + 1)) if rest else 0
    x = frozenset(rest[:nx])
    return y, x
