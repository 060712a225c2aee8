"""Delayed discrete-time opinion dynamics X(k+1) = W_hat X(k) + W_tilde X(k - tau_d).

W_hat is the diagonal (self-loop) part of a signed stochastic matrix W and
W_tilde its off-diagonal part.  Before time tau_d the delayed term reads the
initial state X(0).
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import InputError, InvalidMatrix, NotConvergent
from .graph import (
    Partition,
    as_weight_matrix,
    block_arcs,
    is_structurally_balanced,
    scc_decompose,
)
from .spectral import eigenvalues

ROW_SUM_TOL = 1e-9
DIVERGENCE_LIMIT = 1e6
BIPARTITE_TOL = 1e-4
BIPARTITE_MIN = 1e-3
MAX_STEPS_CAP = 100_000
_CHUNK = 1024


@dataclass(frozen=True)
class DiscreteSystem:
    w_hat: np.ndarray  # n x n diagonal
    w_tilde: np.ndarray  # n x n, zero diagonal
    tau_d: int
    x0: np.ndarray

    def __post_init__(self):
        w_hat = as_weight_matrix(self.w_hat)
        w_tilde = as_weight_matrix(self.w_tilde)
        n = w_hat.shape[0]
        if w_tilde.shape != (n, n):
            raise InvalidMatrix("w_hat and w_tilde must have the same shape")
        if np.any(w_hat != np.diag(np.diag(w_hat))):
            raise InvalidMatrix("w_hat must be diagonal")
        if np.any(np.diag(w_hat) < 0):
            raise InvalidMatrix("self-loop weights must be non-negative")
        if np.any(np.diag(w_tilde) != 0):
            raise InvalidMatrix("w_tilde must have a zero diagonal")
        rows = np.abs(w_hat + w_tilde).sum(axis=1)
        if np.any(np.abs(rows - 1.0) > ROW_SUM_TOL):
            bad = np.flatnonzero(np.abs(rows - 1.0) > ROW_SUM_TOL).tolist()
            raise InvalidMatrix(f"rows {bad} of |W| do not sum to 1")
        if int(self.tau_d) != self.tau_d or self.tau_d < 0:
            raise InputError(f"tau_d must be a non-negative integer, got {self.tau_d}")
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (n,):
            raise InputError(f"x0 must have length {n}")
        if not np.all(np.isfinite(x0)):
            raise InputError("x0 must be finite")
        object.__setattr__(self, "w_hat", w_hat)
        object.__setattr__(self, "w_tilde", w_tilde)
        object.__setattr__(self, "tau_d", int(self.tau_d))
        object.__setattr__(self, "x0", x0)

    @classmethod
    def from_matrix(cls, w, tau_d=0, x0=None):
        """Split a signed stochastic ``w`` into its diagonal and off-diagonal parts."""
        w = as_weight_matrix(w)
        w_hat = np.diag(np.diag(w))
        w_tilde = w - w_hat
        if x0 is None:
            x0 = np.zeros(w.shape[0])
        return cls(w_hat, w_tilde, tau_d, x0)

    @property
    def n(self):
        return self.w_hat.shape[0]

    @property
    def w(self):
        return self.w_hat + self.w_tilde


@dataclass
class Trajectory:
    states: np.ndarray  # (steps_run + 1, n), row k is X(k)
    classification: str
    steps_run: int
    alpha: float = None
    bipartition: tuple = None

    def to_dict(self):
        d = {"classification": self.classification, "steps_run": self.steps_run}
        if self.alpha is not None:
            d["alpha"] = self.alpha
            d["bipartition"] = [sorted(b) for b in self.bipartition]
        return d


def build_augmented(sys):
    """Block-companion matrix A of size n(tau_d + 1) with Y(k+1) = A Y(k).

    Top block row is [W_hat, 0, ..., 0, W_tilde]; identity blocks sit on the
    block subdiagonal.  For tau_d = 0 this is W itself.
    """
    n, tau = sys.n, sys.tau_d
    if tau == 0:
        return sys.w_hat + sys.w_tilde
    size = n * (tau + 1)
    a = np.zeros((size, size))
    a[:n, :n] = sys.w_hat
    a[:n, n * tau:] = sys.w_tilde
    a[n:, : n * tau] = np.eye(n * tau)
    return a


def classification_window(tau_d):
    return max(50, 5 * (tau_d + 1))


def _classify(states, window, tol):
    tail = states[-window:]
    peak = np.max(np.abs(tail))
    if not np.isfinite(peak) or peak > DIVERGENCE_LIMIT:
        return "diverged", None, None
    if peak < tol:
        return "converged_zero", None, None
    mags = np.abs(tail)
    alpha = float(np.mean(mags[-1]))
    signs = np.sign(tail)
    if (
        alpha > BIPARTITE_MIN
        and np.all(np.abs(mags - alpha) < BIPARTITE_TOL)
        and np.all(signs == signs[-1])
    ):
        last = tail[-1]
        parts = (
            frozenset(np.flatnonzero(last > 0).tolist()),
            frozenset(np.flatnonzero(last < 0).tolist()),
        )
        return "bipartite_consensus", alpha, parts
    if np.max(np.abs(np.diff(tail, axis=0))) < tol:
        return "converged_other", None, None
    return "not_converged", None, None


def _first_settled(states, k, nsteps, window, tol):
    """Earliest step in (k, k + nsteps] whose trailing window is all below
    ``tol`` or which exceeds the divergence limit, else None."""
    first = max(k + 1, window - 1)
    last = k + nsteps
    if first > last:
        return None
    peaks = np.max(np.abs(states[first - window + 1 : last + 1]), axis=1)
    if not np.all(np.isfinite(peaks)):
        peaks = np.where(np.isfinite(peaks), peaks, np.inf)
    blown = np.flatnonzero(peaks[window - 1 :] > DIVERGENCE_LIMIT)
    trailing = np.lib.stride_tricks.sliding_window_view(peaks, window).max(axis=1)
    quiet = np.flatnonzero(trailing < tol)
    hits = [int(i[0]) for i in (blown, quiet) if i.size]
    return first + min(hits) if hits else None


def default_max_steps(sys, tol=1e-6):
    """Step budget: three times the steps the predicted rate needs to shrink
    ||x0|| below ``tol``, plus one classification window."""
    rho = eigenvalues(sys.w).spectral_radius
    window = classification_window(sys.tau_d)
    if 0 < rho < 1:
        rate = -math.log(rho) / (sys.tau_d + 1)
        scale = max(float(np.max(np.abs(sys.x0))), tol)
        steps = 3 * math.ceil(math.log(scale / tol) / rate + sys.tau_d + 1) + window
    else:
        steps = MAX_STEPS_CAP
    return int(min(max(steps, window + 1), MAX_STEPS_CAP))


def simulate(sys, max_steps=None, tol=1e-6):
    """Iterate the delayed system and classify the tail of the trajectory.

    The run stops early once the classification window shows convergence to
    zero or divergence.  Classification rules over the last
    max(50, 5(tau_d + 1)) states: diverged if any |x_i| > 1e6; converged_zero
    if all |x_i| < tol; bipartite_consensus if every |x_i| is within 1e-4 of a
    common alpha > 1e-3 with a fixed sign pattern; converged_other if
    successive states differ by less than tol; otherwise not_converged.
    """
    if max_steps is None:
        max_steps = default_max_steps(sys, tol)
    if max_steps < 1:
        raise InputError("max_steps must be >= 1")
    if not tol > 0:
        raise InputError("tol must be positive")
    n, tau = sys.n, sys.tau_d
    window = classification_window(tau)
    w_diag = np.ascontiguousarray(np.diag(sys.w_hat))
    w_tilde = np.ascontiguousarray(sys.w_tilde)
    ring = np.tile(sys.x0, (tau + 1, 1))
    states = np.empty((min(max_steps, 4 * _CHUNK) + 1, n))
    states[0] = sys.x0

    k = 0
    while k < max_steps:
        nsteps = min(_CHUNK, max_steps - k)
        if k + 1 + nsteps > states.shape[0]:
            grown = np.empty((min(2 * states.shape[0], max_steps + 1), n))
            grown[: k + 1] = states[: k + 1]
            states = grown
        kernels.discrete_advance(w_diag, w_tilde, ring, k, nsteps, states[k + 1 : k + 1 + nsteps])
        stop = _first_settled(states, k, nsteps, window, tol)
        if stop is not None:
            k = stop
            break
        k += nsteps

    states = states[: k + 1]
    label, alpha, parts = _classify(states, min(window, k + 1), tol)
    return Trajectory(states, label, k, alpha, parts)


def check_cscc_selfloop_condition(w):
    """True iff every closed SCC of G(W) contains a node with a positive self-loop."""
    w = as_weight_matrix(w)
    diag = np.diag(w)
    scc = scc_decompose(w)
    return all(any(diag[i] > 0 for i in comp) for comp in scc.closed_components())


def _spectral_radius_augmented(sys):
    if not np.any(sys.w_hat):
        lam = eigenvalues(sys.w_tilde).spectral_radius
        return lam ** (1.0 / (sys.tau_d + 1)), "fast"
    return eigenvalues(build_augmented(sys)).spectral_radius, "augmented"


def discrete_rate(sys, method="auto"):
    """Convergence rate -log|theta_1| of the augmented system.

    ``method`` is "auto" (closed form |lambda_1|^(1/(tau_d+1)) when W_hat = 0,
    augmented eigensolve otherwise), "augmented" or "fast".
    """
    if method == "auto":
        theta, _ = _spectral_radius_augmented(sys)
    elif method == "augmented":
        theta = eigenvalues(build_augmented(sys)).spectral_radius
    elif method == "fast":
        if np.any(sys.w_hat):
            raise InputError("fast path needs W_hat = 0")
        theta = eigenvalues(sys.w_tilde).spectral_radius ** (1.0 / (sys.tau_d + 1))
    else:
        raise InputError(f"unknown method {method!r}")
    if theta >= 1.0 - 1e-10:
        raise NotConvergent(f"spectral radius {theta!r} of the augmented system is not below 1")
    if theta == 0:
        return math.inf
    return -math.log(theta)


def hausdorff(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def delay_roots(values, tau_d):
    """All (tau_d + 1)-th complex roots of each value."""
    values = np.asarray(values, dtype=complex)
    k = tau_d + 1
    base = np.abs(values) ** (1.0 / k) * np.exp(1j * np.angle(values) / k)
    turns = np.exp(2j * np.pi * np.arange(k) / k)
    return (base[:, None] * turns[None, :]).ravel()


def root_identity_check(w, tau_d):
    """Hausdorff distance between eig(A) and the (tau_d+1)-th roots of eig(W).

    A is the augmented matrix of the system with W_hat = 0 and W_tilde = w.
    """
    w = as_weight_matrix(w)
    if np.any(np.diag(w) != 0):
        raise InvalidMatrix("root identity assumes W_hat = 0 (zero diagonal)")
    n, tau = w.shape[0], int(tau_d)
    size = n * (tau + 1)
    a = np.zeros((size, size))
    a[:n, n * tau:] = w
    a[n:, : n * tau] = np.eye(n * tau)
    lam = eigenvalues(w).eigenvalues
    theta = eigenvalues(a).eigenvalues
    return hausdorff(theta, delay_roots(lam, tau))


@dataclass(frozen=True)
class LemmaCheck:
    arc_correspondence: bool
    cscc_count_equal: bool
    balance_equivalent: bool

    @property
    def passed(self):
        return self.arc_correspondence and self.cscc_count_equal and self.balance_equivalent


def check_layer_lemmas(sys):
    """Compare G(W) with the layered augmented graph G(A).

    * arcs between distinct layer blocks of A match the arcs of W between
      distinct nodes;
    * both graphs have the same number of closed SCCs;
    * both are structurally balanced or both are not.
    """
    w = sys.w
    a = build_augmented(sys)
    arcs = block_arcs(a, Partition.layers(sys.n, sys.tau_d))
    off = ~np.eye(sys.n, dtype=bool)
    arc_ok = bool(np.array_equal(arcs[off], (w != 0)[off]))
    cscc_ok = scc_decompose(w).n_closed == scc_decompose(a).n_closed
    bal_ok = is_structurally_balanced(w).balanced == is_structurally_balanced(a).balanced
    return LemmaCheck(arc_ok, cscc_ok, bal_ok)
