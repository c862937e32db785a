"""Fixtures and random generators shared by the test modules.

Random posets are produced with networkx (transitive reduction of a random
DAG), which is independent of the covering-graph code under test.
"""

from __future__ import annotations

import random

import networkx as nx

from posetruns.downward import validate_downward
from posetruns.poset import FinitePoset, tree_poset
from posetruns.upward import validate_upward

DIAMOND_EDGES = [("e", "a"), ("e", "b"), ("a", "t"), ("b", "t")]
DIAMOND_UP = {
    "e": {"e": 0.2, "a": 0.4, "b": 0.4},
    "a": {"t": 0.5, "e": 0.5},
    "b": {"t": 0.3, "e": 0.7},
    "t": {"e": 1},
}

HEXAGON_EDGES = [("e", "a"), ("e", "b"), ("a", "c"), ("c", "t"), ("b", "t")]
HEXAGON_UP = {
    "e": {"e": 0.1, "a": 0.5, "b": 0.4},
    "a": {"c": 0.6, "e": 0.4},
    "b": {"t": 0.5, "e": 0.5},
    "c": {"t": 0.7, "e": 0.3},
    "t": {"e": 1},
}


def diamond():
    return FinitePoset(["e", "a", "b", "t"], DIAMOND_EDGES)


def diamond_kernel():
    return validate_upward(DIAMOND_UP, diamond())


def hexagon():
    return FinitePoset(["e", "a", "b", "c", "t"], HEXAGON_EDGES)


def hexagon_kernel():
    return validate_upward(HEXAGON_UP, hexagon())


def random_poset(rng: random.Random, n: int, p: float = 0.3) -> FinitePoset:
    """Random finite poset on ``0..n-1`` with minimum ``0``."""
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for i in range(1, n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(i, j)
    for j in range(1, n):
        if g.in_degree(j) == 0:
            g.add_edge(0, j)
    red = nx.transitive_reduction(g)
    return FinitePoset(list(range(n)), list(red.edges()))


def _weights(rng, k):
    w = [rng.uniform(0.05, 1.0) for _ in range(k)]
    s = sum(w)
    return [v / s for v in w]


def random_up_rows(rng: random.Random, poset) -> dict:
    e = poset.root
    rows = {}
    for x in poset.elements:
        targets = list(poset.up_covers(x)) + [e]
        rows[x] = dict(zip(targets, _weights(rng, len(targets))))
    return rows


def random_up_kernel(rng, poset):
    return validate_upward(random_up_rows(rng, poset), poset)


def random_down_rows(rng: random.Random, poset) -> dict:
    e = poset.root
    rows = {e: dict(zip(poset.elements, _weights(rng, len(poset.elements))))}
    for x in poset.elements:
        if x != e:
            below = list(poset.down_covers(x))
            rows[x] = dict(zip(below, _weights(rng, len(below))))
    return rows


def random_down_kernel(rng, poset):
    return validate_downward(random_down_rows(rng, poset), poset)


def random_tree(rng: random.Random, n: int):
    """Random rooted tree on ``0..n-1`` and its parent map."""
    parent = {i: rng.randrange(i) for i in range(1, n)}
    children = {i: [] for i in range(n)}
    for c, p in parent.items():
        children[p].append(c)
    return tree_poset(children, root=0), parent


def depth_in_tree(parent: dict, x) -> int:
    d = 0
    while x in parent:
        x = parent[x]
        d += 1
    return d


def random_tree_pdf(rng: random.Random, n: int) -> dict:
    return dict(zip(range(n), _weights(rng, n)))
