from itertools import product
from math import gcd

import numpy as np
import pytest
from hypothesis import given

from conftest import signed_matrices
from delayed_opinions.errors import InvalidMatrix, InvalidPartition, MixedSignCrossing
from delayed_opinions.graph import (
    Partition,
    as_weight_matrix,
    bipartition_is_witness,
    block_arcs,
    compress,
    graph_period,
    is_aperiodic,
    is_structurally_balanced,
    scc_decompose,
    successors,
)


def reachability(w):
    """Warshall closure: reach[u, v] iff there is a directed path u -> v (length >= 0)."""
    n = w.shape[0]
    reach = (w != 0).T.copy() | np.eye(n, dtype=bool)
    for k in range(n):
        reach |= reach[:, [k]] & reach[[k], :]
    return reach


def oracle_components(w):
    reach = reachability(w)
    mutual = reach & reach.T
    comps = {frozenset(np.flatnonzero(mutual[v]).tolist()) for v in range(w.shape[0])}
    closed = {}
    for c in comps:
        inside = list(c)
        outside = [u for u in range(w.shape[0]) if u not in c]
        closed[c] = not np.any(w[np.ix_(inside, outside)] != 0)
    return closed


def oracle_balanced(w):
    n = w.shape[0]
    for colours in product([0, 1], repeat=n):
        c = np.array(colours)
        same = c[:, None] == c[None, :]
        if np.all(w[same] >= 0) and np.all(w[~same] <= 0):
            return True
    return False


def simple_cycle_lengths(w):
    succ = successors(w)
    n = len(succ)
    lengths = set()
    for start in range(n):
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for u in succ[v]:
                if u == start:
                    lengths.add(len(path))
                elif u > start and u not in path:
                    stack.append((u, path + [u]))
    return lengths


def oracle_period(w):
    g = 0
    for length in simple_cycle_lengths(w):
        g = gcd(g, length)
    return g


@given(signed_matrices())
def test_components_match_closure_oracle(w):
    scc = scc_decompose(w)
    got = dict(zip(scc.components, scc.closed))
    assert got == oracle_components(w)
    for idx, comp in enumerate(scc.components):
        assert all(scc.component_of[v] == idx for v in comp)


@given(signed_matrices())
def test_every_graph_has_a_closed_component(w):
    assert scc_decompose(w).n_closed >= 1


@given(signed_matrices(max_n=8))
def test_balance_matches_exhaustive_search(w):
    res = is_structurally_balanced(w)
    assert res.balanced == oracle_balanced(w)
    if res.balanced:
        assert bipartition_is_witness(w, res.bipartition)
        assert res.bipartition[0] | res.bipartition[1] == set(range(w.shape[0]))


@given(signed_matrices(max_n=6))
def test_period_matches_cycle_enumeration(w):
    assert graph_period(w) == oracle_period(w)


def test_period_of_plain_cycles():
    ring = np.roll(np.eye(4), 1, axis=0)
    assert graph_period(ring) == 4
    assert not is_aperiodic(ring)
    ring[0, 0] = 0.5
    assert graph_period(ring) == 1
    assert is_aperiodic(ring)
    assert graph_period(np.zeros((3, 3))) == 0
    assert not is_aperiodic(np.triu(np.ones((3, 3)), 1))


def test_negative_self_loop_is_unbalanced():
    assert not is_structurally_balanced([[-1.0]]).balanced
    assert is_structurally_balanced([[1.0]]).balanced


def test_two_camps_are_balanced():
    w = np.array([[0, 1, -1, 0], [1, 0, 0, -1], [-1, 0, 0, 1], [0, -1, 1, 0]], float)
    res = is_structurally_balanced(w)
    assert res.balanced
    assert set(map(frozenset, res.bipartition)) == {frozenset({0, 1}), frozenset({2, 3})}


def test_arc_direction_convention():
    w = np.zeros((3, 3))
    w[1, 0] = 0.7  # node 1 listens to node 0: arc 0 -> 1
    assert successors(w) == [[1], [], []]
    scc = scc_decompose(w)
    closed = [c for c, f in zip(scc.components, scc.closed) if f]
    assert sorted(map(sorted, closed)) == [[0], [2]]


def test_weight_matrix_validation():
    with pytest.raises(InvalidMatrix):
        as_weight_matrix(np.zeros((2, 3)))
    with pytest.raises(InvalidMatrix):
        as_weight_matrix([[np.nan]])
    with pytest.raises(InvalidMatrix):
        as_weight_matrix(np.zeros((0, 0)))


def test_partition_validation():
    with pytest.raises(InvalidPartition):
        Partition(({0, 1}, {1, 2}))
    with pytest.raises(InvalidPartition):
        Partition(({0}, set()))
    with pytest.raises(InvalidPartition):
        Partition(({0}, {2}))
    layers = Partition.layers(3, 2)
    assert layers.blocks[1] == frozenset({1, 4, 7})
    assert list(layers.membership()) == [0, 1, 2] * 3


def test_compress_signs_and_mixed_crossing():
    w = np.array([[0, 0.5, 0.5], [0.5, 0, -0.5], [1, 0, 0]])
    # block {2} reaches block {0, 1} through one positive and one negative arc
    with pytest.raises(MixedSignCrossing) as info:
        compress(w, Partition(({0, 1}, {2})))
    assert info.value.blocks == [(0, 1)]
    assert np.array_equal(info.value.arcs, np.array([[True, True], [True, False]]))
    got = compress(w, Partition(({0}, {1, 2})))
    assert np.array_equal(got, np.array([[0.0, 1.0], [1.0, -1.0]]))
    with pytest.raises(InvalidPartition):
        compress(w, Partition.singletons(2))


@given(signed_matrices(max_n=6))
def test_singleton_compression_is_sign_pattern(w):
    assert np.array_equal(compress(w, Partition.singletons(w.shape[0])), np.sign(w))
    assert np.array_equal(block_arcs(w, Partition.singletons(w.shape[0])), w != 0)
