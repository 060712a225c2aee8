"""Signed directed graphs stored as dense weight matrices.

Convention: ``w[i, j]`` is the weight of the arc from node ``j`` to node ``i``
(node ``i`` listens to node ``j``).  An arc exists iff ``w[i, j] != 0``; there
is no epsilon threshold.
"""

from collections import deque
from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import InvalidMatrix, InvalidPartition, MixedSignCrossing


def as_weight_matrix(w):
    """Validate ``w`` as a finite square matrix and return it as float64."""
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise InvalidMatrix("matrix must have at least one node")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix entries must be finite")
    return arr


def successors(w):
    """Adjacency lists following arc direction: ``succ[j]`` lists every i with j -> i."""
    w = as_weight_matrix(w)
    nz = w != 0
    return [np.flatnonzero(nz[:, j]).tolist() for j in range(w.shape[0])]


@dataclass(frozen=True)
class SccDecomposition:
    components: tuple
    closed: tuple
    component_of: tuple

    @property
    def n_closed(self):
        return sum(self.closed)

    @property
    def n_open(self):
        return len(self.closed) - self.n_closed

    def closed_components(self):
        return [c for c, flag in zip(self.components, self.closed) if flag]


def scc_decompose(w):
    """Strongly connected components with closed (CSCC) / open (OSCC) flags.

    Iterative Tarjan lowlink traversal followed by one scan over the arcs to
    mark components with an incoming arc from elsewhere as open.
    """
    succ = successors(w)
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comp_of = [-1] * n
    components = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            nbrs = succ[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                u = nbrs[pos]
                if index[u] == -1:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, 0))
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                members = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp_of[u] = len(components)
                    members.append(u)
                    if u == v:
                        break
                components.append(frozenset(members))

    closed = [True] * len(components)
    for j in range(n):
        for i in succ[j]:
            if comp_of[i] != comp_of[j]:
                closed[comp_of[i]] = False
    return SccDecomposition(tuple(components), tuple(closed), tuple(comp_of))


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    bipartition: tuple = None  # (V1, V2) as frozensets, present iff balanced


def is_structurally_balanced(w):
    """Decide structural balance by sign-consistent 2-colouring.

    Arc directions are ignored: a positive entry forces equal colours, a
    negative entry opposite colours.  A negative self-loop makes the graph
    unbalanced.
    """
    w = as_weight_matrix(w)
    n = w.shape[0]
    sym_pos = (w > 0) | (w > 0).T
    sym_neg = (w < 0) | (w < 0).T
    if np.any(np.diag(sym_neg)):
        return BalanceResult(False)
    colour = np.full(n, -1, dtype=int)
    for start in range(n):
        if colour[start] != -1:
            continue
        colour[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in np.flatnonzero(sym_pos[v] | sym_neg[v]):
                want = colour[v] if sym_pos[v, u] else 1 - colour[v]
                if sym_pos[v, u] and sym_neg[v, u]:
                    return BalanceResult(False)
                if colour[u] == -1:
                    colour[u] = want
                    queue.append(u)
                elif colour[u] != want:
                    return BalanceResult(False)
    v1 = frozenset(np.flatnonzero(colour == 0).tolist())
    v2 = frozenset(np.flatnonzero(colour == 1).tolist())
    return BalanceResult(True, (v1, v2))


def bipartition_is_witness(w, bipartition):
    """Check the sign conditions of a balance witness edge by edge."""
    w = as_weight_matrix(w)
    side = np.zeros(w.shape[0], dtype=bool)
    side[list(bipartition[1])] = True
    same = side[:, None] == side[None, :]
    return bool(np.all(w[same] >= 0) and np.all(w[~same] <= 0))


def graph_period(w):
    """Return the gcd of all directed cycle lengths, or 0 if there is no cycle.

    Computed per SCC from BFS levels: for each internal arc u -> v the value
    level(u) + 1 - level(v) is a multiple of the period, and the gcd of these
    values over a BFS tree equals it.
    """
    succ = successors(w)
    scc = scc_decompose(w)
    period = 0
    for comp in scc.components:
        root = min(comp)
        level = {root: 0}
        queue = deque([root])
        g = 0
        has_arc = False
        while queue:
            v = queue.popleft()
            for u in succ[v]:
                if u not in comp:
                    continue
                has_arc = True
                if u not in level:
                    level[u] = level[v] + 1
                    queue.append(u)
                else:
                    g = gcd(g, abs(level[v] + 1 - level[u]))
        if has_arc:
            period = gcd(period, g)
    return period


def is_aperiodic(w):
    """True iff the graph has a cycle and the gcd of its cycle lengths is 1.

    An acyclic graph returns False; use :func:`graph_period` (which returns 0
    for it) to tell that case apart from a periodic one.
    """
    return graph_period(w) == 1


@dataclass(frozen=True)
class Partition:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(frozenset(int(v) for v in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise InvalidPartition("partition blocks must be non-empty")
            if seen & b:
                raise InvalidPartition("partition blocks must be disjoint")
            seen |= b
        if seen != set(range(len(seen))):
            raise InvalidPartition("partition must cover nodes 0..n-1")

    @property
    def n_nodes(self):
        return sum(len(b) for b in self.blocks)

    def membership(self):
        labels = np.empty(self.n_nodes, dtype=int)
        for k, b in enumerate(self.blocks):
            labels[list(b)] = k
        return labels

    @classmethod
    def singletons(cls, n):
        return cls(tuple(frozenset([i]) for i in range(n)))

    @classmethod
    def layers(cls, n, tau_d):
        """Blocks {i, n+i, ..., n*tau_d+i} of an augmented delay system."""
        return cls(tuple(frozenset(i + n * l for l in range(tau_d + 1)) for i in range(n)))


def _block_counts(w, partition):
    w = as_weight_matrix(w)
    if partition.n_nodes != w.shape[0]:
        raise InvalidPartition(
            f"partition covers {partition.n_nodes} nodes, matrix has {w.shape[0]}"
        )
    ind = np.zeros((w.shape[0], len(partition.blocks)))
    ind[np.arange(w.shape[0]), partition.membership()] = 1.0
    pos = ind.T @ (w > 0) @ ind
    neg = ind.T @ (w < 0) @ ind
    return pos > 0, neg > 0


def block_arcs(w, partition):
    """Sign-free adjacency of the compressed graph (same orientation as ``w``)."""
    pos, neg = _block_counts(w, partition)
    return pos | neg


def compress(w, partition):
    """Signed adjacency of the compressed graph.

    Entry (I, J) is +1 / -1 when every arc from block J into block I is
    positive / negative and 0 when there is none.  Diagonal entries record
    arcs inside a block.  Raises :class:`MixedSignCrossing` when some block
    pair is connected by arcs of both signs.
    """
    pos, neg = _block_counts(w, partition)
    mixed = pos & neg
    if np.any(mixed):
        pairs = list(zip(*np.nonzero(mixed)))
        raise MixedSignCrossing(
            f"{len(pairs)} block pair(s) have arcs of both signs, first {pairs[0]}",
            arcs=pos | neg,
            blocks=pairs,
        )
    return pos.astype(float) - neg.astype(float)
