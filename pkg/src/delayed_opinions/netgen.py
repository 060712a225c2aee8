"""Random signed interaction networks and the matrices derived from them.

Two constructions are provided:

* random mixture: each ordered pair (j -> i) interacts independently with
  probability ``p_connect`` and carries a normal(0, sigma^2) strength;
* complex mixture: each unordered pair interacts with probability
  ``p_connect`` and is assigned one of five interaction types (+/+, -/-, +/-,
  +/0, -/0) whose strengths are built from half-normal magnitudes |Z|.

Randomness
----------
A generator call is a pure function of ``(spec, seed)``.  The seed feeds a
:class:`numpy.random.SeedSequence`; attempt ``a`` (see ZeroRow retries) uses
child ``a`` of that sequence, and within an attempt every kind of draw
(connection, type, side coin, first magnitude, second magnitude) uses its own
spawned Philox stream laid out as a full ``n x n`` array.  The value used for
pair (i, j) is always the array entry at that position, so it does not depend
on the order in which pairs are visited.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InvalidMatrix, InvalidProportions, ZeroRow
from .graph import as_weight_matrix

TYPE_NAMES = ("+/+", "-/-", "+/-", "+/0", "-/0")
MAX_ATTEMPTS = 100

# proportions (P++, P--, P+-, P+0, P-0) of the four reference mixtures
CASES = {
    "a": (0.0, 0.0, 1.0, 0.0, 0.0),
    "b": (1 / 3, 0.0, 1 / 3, 1 / 3, 0.0),
    "c": (0.0, 1 / 3, 1 / 3, 0.0, 1 / 3),
    "d": (0.2, 0.2, 0.2, 0.2, 0.2),
}


@dataclass(frozen=True)
class MixtureSpec:
    """Parameters of a random network construction.

    ``proportions`` is None for the random mixture and a 5-tuple
    (P++, P--, P+-, P+0, P-0) for the complex mixture.
    """

    n: int
    p_connect: float
    sigma: float = 1.0
    proportions: tuple = None
    seed: int = 0
    dist: str = "normal"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidMatrix(f"n must be an integer >= 2, got {self.n}")
        if not 0 < self.p_connect <= 1:
            raise InvalidProportions(f"p_connect must lie in (0, 1], got {self.p_connect}")
        if not self.sigma > 0:
            raise InvalidProportions(f"sigma must be positive, got {self.sigma}")
        if self.dist != "normal":
            raise InvalidProportions(f"unsupported strength distribution {self.dist!r}")
        if self.proportions is not None:
            props = tuple(float(p) for p in self.proportions)
            object.__setattr__(self, "proportions", props)
            validate_proportions(props, mixed=False)

    @property
    def is_complex(self):
        return self.proportions is not None

    @property
    def e_abs_z(self):
        return self.sigma * math.sqrt(2.0 / math.pi)

    def to_dict(self):
        d = {"n": self.n, "p": self.p_connect, "sigma": self.sigma, "seed": self.seed}
        if self.proportions is not None:
            d["proportions"] = list(self.proportions)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            n=int(d["n"]),
            p_connect=float(d.get("p", d.get("p_connect"))),
            sigma=float(d.get("sigma", 1.0)),
            proportions=tuple(d["proportions"]) if d.get("proportions") is not None else None,
            seed=int(d.get("seed", 0)),
        )


def validate_proportions(props, mixed=True):
    """Check five non-negative proportions summing to one.

    With ``mixed`` the mixture must also contain both trust and mistrust
    (P++ + P+0 < 1 and P-- + P-0 < 1), which the spectral predictions need.
    Generation alone accepts one-sided mixtures.
    """
    if len(props) != 5:
        raise InvalidProportions(f"expected 5 proportions, got {len(props)}")
    if any(not math.isfinite(p) or p < 0 for p in props):
        raise InvalidProportions("proportions must be finite and non-negative")
    if abs(sum(props) - 1.0) > 1e-9:
        raise InvalidProportions(f"proportions must sum to 1, got {sum(props)!r}")
    if not mixed:
        return
    pp, mm, pm, p0, m0 = props
    if not (pp + p0 < 1 and mm + m0 < 1):
        raise InvalidProportions(
            "need P(+/+) + P(+/0) < 1 and P(-/-) + P(-/0) < 1 (both trust and mistrust present)"
        )


@dataclass(frozen=True)
class MixtureStats:
    p_hat: float
    p_bar: float
    p_star: float
    expected_row_sum: float
    e_abs_z: float
    p_connect: float = field(default=1.0)
    sigma: float = field(default=1.0)
    is_complex: bool = field(default=False)


def mixture_stats(spec):
    """Summary statistics of a construction, used by the spectral predictions.

    For the random mixture the entries have zero mean, unit "mass" and no
    pair correlation, i.e. P_hat = 1, P_bar = 0, P_star = 0.
    """
    if spec.is_complex:
        validate_proportions(spec.proportions)
        pp, mm, pm, p0, m0 = spec.proportions
        p_hat = pp + pm + mm + 0.5 * p0 + 0.5 * m0
        p_bar = pp - mm + 0.5 * p0 - 0.5 * m0
        p_star = pp + mm - pm
    else:
        p_hat, p_bar, p_star = 1.0, 0.0, 0.0
    row_sum = (spec.n - 1) * spec.p_connect * p_hat * spec.e_abs_z
    return MixtureStats(
        p_hat=p_hat,
        p_bar=p_bar,
        p_star=p_star,
        expected_row_sum=row_sum,
        e_abs_z=spec.e_abs_z,
        p_connect=spec.p_connect,
        sigma=spec.sigma,
        is_complex=spec.is_complex,
    )


def _streams(seed, attempt, k):
    root = np.random.SeedSequence(int(seed) & ((1 << 64) - 1))
    child = root.spawn(attempt + 1)[attempt]
    return [np.random.Generator(np.random.Philox(s)) for s in child.spawn(k)]


def _has_zero_row(s):
    return bool(np.any(np.abs(s).sum(axis=1) == 0))


def _retrying(draw, spec):
    for attempt in range(MAX_ATTEMPTS):
        s = draw(spec, attempt)
        if not _has_zero_row(s):
            return s
    raise ZeroRow(
        f"every one of {MAX_ATTEMPTS} draws left a node without in-neighbours "
        f"(n={spec.n}, p={spec.p_connect})"
    )


def _draw_random(spec, attempt):
    n = spec.n
    connect_rng, value_rng = _streams(spec.seed, attempt, 2)
    connect = connect_rng.random((n, n)) < spec.p_connect
    values = value_rng.normal(0.0, spec.sigma, size=(n, n))
    s = np.where(connect, values, 0.0)
    np.fill_diagonal(s, 0.0)
    return s


def generate_random_mixture(spec):
    """Random-mixture strength matrix S (zero diagonal, not normalized)."""
    if spec.is_complex:
        raise InvalidProportions("random mixture takes no proportions")
    return _retrying(_draw_random, spec)


def _draw_complex(spec, attempt):
    n = spec.n
    connect_rng, type_rng, coin_rng, mag1_rng, mag2_rng = _streams(spec.seed, attempt, 5)
    connect = connect_rng.random((n, n)) < spec.p_connect
    cum = np.cumsum(spec.proportions)
    kind = np.searchsorted(cum, type_rng.random((n, n)) * cum[-1], side="right")
    kind = np.minimum(kind, 4)
    coin = coin_rng.random((n, n)) < 0.5
    m1 = np.abs(mag1_rng.normal(0.0, spec.sigma, size=(n, n)))
    m2 = np.abs(mag2_rng.normal(0.0, spec.sigma, size=(n, n)))

    iu, ju = np.triu_indices(n, k=1)
    live = connect[iu, ju]
    iu, ju = iu[live], ju[live]
    k = kind[iu, ju]
    c = coin[iu, ju]
    a = m1[iu, ju]
    b = m2[iu, ju]

    s_ij = np.zeros(iu.size)
    s_ji = np.zeros(iu.size)
    mutual_pos = k == 0
    s_ij[mutual_pos], s_ji[mutual_pos] = a[mutual_pos], b[mutual_pos]
    mutual_neg = k == 1
    s_ij[mutual_neg], s_ji[mutual_neg] = -a[mutual_neg], -b[mutual_neg]
    mixed = k == 2
    s_ij[mixed] = np.where(c[mixed], a[mixed], -a[mixed])
    s_ji[mixed] = np.where(c[mixed], -b[mixed], b[mixed])
    for code, sign in ((3, 1.0), (4, -1.0)):
        uni = k == code
        s_ij[uni] = np.where(c[uni], sign * a[uni], 0.0)
        s_ji[uni] = np.where(c[uni], 0.0, sign * a[uni])

    s = np.zeros((n, n))
    s[iu, ju] = s_ij
    s[ju, iu] = s_ji
    return s


def generate_complex_mixture(spec):
    """Complex-mixture strength matrix S (zero diagonal, not normalized)."""
    if not spec.is_complex:
        raise InvalidProportions("complex mixture requires proportions")
    return _retrying(_draw_complex, spec)


def generate(spec):
    """Dispatch on ``spec.is_complex``."""
    return generate_complex_mixture(spec) if spec.is_complex else generate_random_mixture(spec)


def pair_types(spec, attempt=0):
    """Sampled interaction type code per interacting pair (i < j), for diagnostics."""
    n = spec.n
    connect_rng, type_rng = _streams(spec.seed, attempt, 5)[:2]
    connect = connect_rng.random((n, n)) < spec.p_connect
    cum = np.cumsum(spec.proportions)
    kind = np.minimum(np.searchsorted(cum, type_rng.random((n, n)) * cum[-1], side="right"), 4)
    iu, ju = np.triu_indices(n, k=1)
    live = connect[iu, ju]
    return kind[iu[live], ju[live]]


def normalize_rows(s):
    """Signed stochastic matrix w_ij = s_ij / sum_k |s_ik| with zero diagonal."""
    s = as_weight_matrix(s).copy()
    np.fill_diagonal(s, 0.0)
    row = np.abs(s).sum(axis=1)
    empty = np.flatnonzero(row == 0)
    if empty.size:
        raise ZeroRow(f"node(s) {empty.tolist()} have no in-neighbours")
    return s / row[:, None]


def build_laplacian(w):
    """Return -L: off-diagonal entries of ``w`` and diagonal -sum_{k != i} |w_ik|.

    The continuous system is then x'(t) = (-L) x(t - tau).
    """
    w = as_weight_matrix(w)
    if np.any(np.diag(w) != 0):
        raise InvalidMatrix("build_laplacian expects a zero diagonal")
    neg_l = w.copy()
    np.fill_diagonal(neg_l, -np.abs(w).sum(axis=1))
    return neg_l
