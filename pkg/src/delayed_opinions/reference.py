"""Small fixed networks used by the examples, tests and CLI pipelines."""

import numpy as np

from .errors import InputError

W_TM = np.array(
    [
        [0.0, 0.3, 0.0, 0.0, -0.7],
        [-0.5, 0.0, 0.0, 0.5, 0.0],
        [-0.5, -0.3, 0.0, 0.2, 0.0],
        [0.0, -0.5, 0.0, 0.0, -0.5],
        [-0.5, 0.0, 0.0, -0.5, 0.0],
    ]
)
W_T = np.abs(W_TM)
W_M = -np.abs(W_TM)
X0_FIVE = np.array([-1 / 2, -1 / 4, 0.0, 1 / 3, 1 / 2])

# Five nodes: a negative 3-cycle 0 -> 1 -> 2 -> 0 with no incoming arcs (closed
# component, unbalanced) feeding a 2-cycle {3, 4} (open component).
LAYERED_DEMO = np.array(
    [
        [0.0, 0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0, 0.5],
        [0.0, 0.0, 0.0, 1.0, 0.0],
    ]
)
LAYERED_DEMO_DELAY = 2


def five_node_networks():
    """The trust-only, mistrust-only and mixed five-node matrices by name."""
    return {"W_t": W_T.copy(), "W_m": W_M.copy(), "W_tm": W_TM.copy()}


def random_signed_stochastic(rng, n, density=0.4, self_loop_prob=0.3):
    """Random signed matrix whose rows of |W| sum to one.

    Each off-diagonal arc is present with probability ``density`` and takes a
    random sign; each node gets a positive self-loop with probability
    ``self_loop_prob``.  A node left without arcs receives a self-loop.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    mags = rng.uniform(0.1, 1.0, size=(n, n))
    signs = np.where(rng.random((n, n)) < 0.5, -1.0, 1.0)
    present = rng.random((n, n)) < density
    np.fill_diagonal(present, rng.random(n) < self_loop_prob)
    w = np.where(present, mags * signs, 0.0)
    diag = np.abs(np.diag(w))
    np.fill_diagonal(w, diag)
    empty = np.abs(w).sum(axis=1) == 0
    w[empty, empty] = 1.0
    return w / np.abs(w).sum(axis=1, keepdims=True)
