"""d-separation: worked examples, error handling, and oracle agreement."""

import itertools

import numpy as np
import pytest

from causalid.admg import Admg, parse_graph
from causalid.errors import InvalidPath, OverlappingSets, UnknownVertex
from causalid.separation import d_separated, d_separated_naive, path_blocked

from conftest import random_admg


def test_unmeasured_sets_block_both_paths(collider_chain):
    assert d_separated(collider_chain, {"X"}, {"Y"}, set())


def test_measuring_collider_unblocks(collider_chain):
    assert not d_separated(collider_chain, {"X"}, {"Y"}, {"Z1"})


def test_isolated_vertices():
    g = Admg.create({"A", "B", "C"})
    assert d_separated(g, {"A"}, {"B"}, set())
    assert d_separated(g, {"A"}, {"B"}, {"C"})


def test_bidirected_edge_connects():
    g = parse_graph(["X<->Y"])
    assert not d_separated(g, {"X"}, {"Y"}, set())


def test_chain_blocked_by_middle():
    g = parse_graph(["A->B", "B->C"])
    assert not d_separated(g, {"A"}, {"C"}, set())
    assert d_separated(g, {"A"}, {"C"}, {"B"})


def test_symmetry():
    rng = np.random.default_rng(31)
    for _ in range(20):
        g = random_admg(rng, max_vertices=5, max_bidirected=2)
        names = sorted(g.vertices)
        x, y = names[0], names[1]
        rest = names[2:]
        for k in range(len(rest) + 1):
            for zs in itertools.combinations(rest, k):
                assert d_separated(g, {x}, {y}, zs) == d_separated(g, {y}, {x}, zs)


def test_rejects_overlap(collider_chain):
    with pytest.raises(OverlappingSets):
        d_separated(collider_chain, {"X"}, {"X"}, set())
    with pytest.raises(OverlappingSets):
        d_separated(collider_chain, {"X"}, {"Y"}, {"X"})


def test_rejects_unknown(collider_chain):
    with pytest.raises(UnknownVertex):
        d_separated(collider_chain, {"Q"}, {"Y"}, set())


# --- per-path blocking ------------------------------------------------------------

def test_path_blocked_chain():
    g = parse_graph(["A->B", "B->C"])
    assert path_blocked(g, ("A", "B", "C"), {"B"})
    assert not path_blocked(g, ("A", "B", "C"), set())


def test_path_blocked_collider():
    g = parse_graph(["A->B", "C->B"])
    assert path_blocked(g, ("A", "B", "C"), set())


def test_path_unblocked_by_collider_descendant():
    g = parse_graph(["A->B", "C->B", "B->D"])
    assert not path_blocked(g, ("A", "B", "C"), {"D"})


def test_path_blocked_invalid():
    g = parse_graph(["A->B", "B->C"])
    with pytest.raises(InvalidPath):
        path_blocked(g, ("A", "C"), set())
    with pytest.raises(InvalidPath):
        path_blocked(g, ("A",), set())
    with pytest.raises(InvalidPath):
        path_blocked(g, ("A", "B", "A"), set())


def test_path_through_explicit_confounder():
    g = parse_graph(["X<->Y"])
    # the latent fork U[X,Y] is a non-collider interior vertex
    assert not path_blocked(g, ("X", "U[X,Y]", "Y"), set())


# --- the two implementations agree --------------------------------------------------

def test_production_matches_naive_enumeration():
    rng = np.random.default_rng(41)
    for _ in range(40):
        g = random_admg(rng, max_vertices=7, max_bidirected=3, p_edge=0.35)
        names = sorted(g.vertices)
        for x, y in itertools.combinations(names, 2):
            rest = [v for v in names if v not in (x, y)]
            for k in range(len(rest) + 1):
                for zs in itertools.combinations(rest, k):
                    assert d_separated(g, {x}, {y}, zs) == d_separated_naive(
                        g, {x}, {y}, zs
                    ), (sorted(g.directed), sorted(map(sorted, g.bidirected)), x, y, zs)


def test_empty_query_sets_trivially_separated(collider_chain):
    assert d_separated(collider_chain, set(), {"Y"}, set())
    assert d_separated(collider_chain, {"X"}, set(), set())


def test_path_blocked_unknown_vertices():
    g = parse_graph(["A->B", "B->C"])
    with pytest.raises(UnknownVertex):
        path_blocked(g, ("A", "B"), {"Q"})
    with pytest.raises(UnknownVertex):
        path_blocked(g, ("A", "Q"), set())
