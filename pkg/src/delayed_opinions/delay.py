"""Delay margins and convergence rates of x'(t) = (-L) x(t - tau).

Each eigenvalue alpha of -L contributes the scalar characteristic factor
z - alpha e^{-z tau}, whose rightmost root is W0(alpha tau) / tau.  From this:

* the stability boundary of a single eigenvalue x + iy is
  |arctan(-x/y)| / sqrt(x^2 + y^2)  (pi / (2|x|) on the real axis);
* the decay rate at delay tau is R = -max_k Re W0(alpha_k tau) / tau
  = min_k g(alpha_k tau) |Re alpha_k| with g(x) = Re W0(x) / Re x.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import (
    DelayOutOfRange,
    InputError,
    NoConvergence,
    NoCrossover,
    PositiveRealPart,
)

ZERO_SENTINEL = 1e18
DOMINANT_RTOL = 1e-9
SCAN_POINTS = 64
BISECT_ATOL = 1e-10
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class LambertValue:
    w: complex
    residual: float


def lambert_w0_array(z):
    """Vectorized principal-branch Lambert W; raises NoConvergence on failure."""
    z = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(z.ravel())
    w, ok = kernels.lambertw0(flat)
    if not np.all(ok):
        bad = flat[~ok][:3]
        raise NoConvergence(f"Halley iteration did not converge for z = {bad.tolist()}")
    return w.reshape(z.shape)


def lambert_w0(z):
    """Principal branch W0(z) with its residual |w e^w - z|.

    On the cut (-inf, -1/e) the value is the limit from the upper half plane,
    e.g. W0(-pi/2) = i pi/2.
    """
    z = complex(z)
    w = complex(lambert_w0_array(np.array([z]))[0])
    return LambertValue(w, abs(w * np.exp(w) - z))


def _values(eigs):
    vals = getattr(eigs, "eigenvalues", eigs)
    return np.atleast_1d(np.asarray(vals, dtype=complex))


def teardrop_tau(x, y):
    """Largest delay keeping the eigenvalue x + iy inside the stability region.

    Returns 0 on the imaginary axis, pi/(2|x|) on the negative real axis and
    ZERO_SENTINEL for the zero eigenvalue, which never destabilizes.
    """
    x = float(x)
    y = float(y)
    if x > 0:
        raise PositiveRealPart(f"eigenvalue {complex(x, y)} has positive real part")
    if y == 0:
        if x == 0:
            return ZERO_SENTINEL
        return math.pi / (2.0 * abs(x))
    return abs(math.atan(-x / y)) / math.hypot(x, y)


def boundary_taus(eigs, zero_tol=1e-12):
    """Per-eigenvalue delay boundaries.

    Eigenvalues within ``zero_tol`` (relative to the largest modulus) of 0
    count as the zero eigenvalue, and real parts in (0, zero_tol] are treated
    as 0 so that rounding on a marginal eigenvalue does not raise.
    """
    vals = _values(eigs)
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    out = np.empty(vals.size)
    for k, z in enumerate(vals):
        if abs(z) <= zero_tol * scale:
            out[k] = ZERO_SENTINEL
            continue
        x = z.real
        if 0 < x <= zero_tol * scale:
            x = 0.0
        out[k] = teardrop_tau(x, z.imag)
    return out


@dataclass
class DelayReport:
    per_eig_boundary: list
    tau_star: float
    tau_tilde: float = None
    accel_possible: bool = False
    rate_curve: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    r0: float = None

    def to_dict(self):
        return {
            "tau_star": self.tau_star,
            "tau_tilde": self.tau_tilde,
            "accel_possible": self.accel_possible,
            "r0": self.r0,
            "per_eig_boundary": [
                {"eigenvalue": [float(a.real), float(a.imag)], "tau": float(t)}
                for a, t in self.per_eig_boundary
            ],
            "rate_curve": [[float(t), float(r)] for t, r in self.rate_curve],
        }


def _all_stable(vals, zero_tol=1e-12):
    """Every eigenvalue strictly in the left half plane; eigenvalues within
    ``zero_tol`` (relative) of 0 count as the zero eigenvalue."""
    if vals.size == 0:
        return False
    scale = max(1.0, float(np.max(np.abs(vals))))
    return bool(np.all((vals.real < 0) & (np.abs(vals) > zero_tol * scale)))


def tau_star(eigs, zero_tol=1e-12):
    """Delay margin: the minimum per-eigenvalue boundary."""
    vals = _values(eigs)
    taus = boundary_taus(vals, zero_tol)
    stable = _all_stable(vals, zero_tol)
    return DelayReport(
        per_eig_boundary=list(zip(vals.tolist(), taus.tolist())),
        tau_star=float(np.min(taus)),
        accel_possible=accel_condition(vals) if stable else False,
        r0=float(np.min(np.abs(vals.real))) if stable else None,
    )


def random_threshold_components(stats, n):
    """(tau_u, tau_l) for the random mixture from the predicted disc of -L."""
    alpha = (n - 1) * stats.p_connect * stats.e_abs_z
    s = math.sqrt(n * stats.p_connect * stats.sigma ** 2)
    tau_u = alpha / math.sqrt(alpha ** 2 + s ** 2) * math.atan(alpha / s)
    tau_l = alpha * math.pi / (2 * alpha + 2 * s)
    return tau_u, tau_l


def tau_star_random(stats, n):
    """Predicted delay margin for the random mixture."""
    if stats.is_complex:
        raise InputError("tau_star_random applies to the random mixture")
    if n < 2:
        raise InputError("n must be >= 2")
    return min(random_threshold_components(stats, n))


def complex_threshold_components(pred):
    """Boundary delays at the extreme points of the predicted spectrum of -L.

    Keys "r", "l", "u" (rightmost, leftmost, uppermost ellipse points) and
    "out" for the outlier when one is predicted.
    """
    e, a, b = pred.center_shift, pred.a, pred.b
    comps = {
        "r": math.pi / (2 * abs(a - e - 1)),
        "l": math.pi / (2 * abs(-a - e - 1)),
        "u": teardrop_tau(-e - 1, b) if b != 0 else math.pi / (2 * abs(e + 1)),
    }
    if pred.has_outlier:
        comps["out"] = math.pi / (2 * abs(pred.lambda_hat - e - 1))
    return comps


def tau_star_complex(pred, n=None):
    """Predicted delay margin for the complex mixture (outlier term included
    only when the outlier exists)."""
    return min(complex_threshold_components(pred).values())


def delay_gain(x):
    """g(x) = Re W0(x) / Re x, with g(0) = 1."""
    x = complex(x)
    if x == 0:
        return 1.0
    if x.real > 0:
        raise PositiveRealPart(f"delay gain undefined for Re(x) > 0 (x = {x})")
    if x.real == 0:
        raise PositiveRealPart(f"delay gain undefined on the imaginary axis (x = {x})")
    return lambert_w0(x).w.real / x.real


def _rates(vals, taus):
    """Decay rate for each delay in ``taus`` (zero delay allowed)."""
    taus = np.asarray(taus, dtype=float)
    out = np.empty(taus.shape)
    zero = taus == 0
    out[zero] = np.min(np.abs(vals.real))
    pos = ~zero
    if np.any(pos):
        w = lambert_w0_array(np.outer(taus[pos], vals))
        out[pos] = -np.max(w.real, axis=1) / taus[pos]
    return out


def _require_stable(vals):
    if not _all_stable(vals):
        raise PositiveRealPart("rate theory needs every eigenvalue in the open left half plane "
                               "(a zero eigenvalue is not allowed)")


def rate_continuous(eigs, tau_c):
    """Positive decay rate R(tau_c) = min_k g(alpha_k tau_c) |Re alpha_k|.

    R(0) is |Re alpha_1| for the eigenvalue with the smallest |Re|.
    """
    vals = _values(eigs)
    _require_stable(vals)
    if tau_c < 0:
        raise DelayOutOfRange("delay must be non-negative")
    margin = float(np.min(boundary_taus(vals)))
    if tau_c >= margin:
        raise DelayOutOfRange(f"tau_c = {tau_c} is not below the delay margin {margin}")
    return float(_rates(vals, [tau_c])[0])


def accel_condition(eigs):
    """True iff every eigenvalue attaining the dominant real part has argument
    strictly inside (3pi/4, 5pi/4)."""
    vals = _values(eigs)
    _require_stable(vals)
    re1 = vals.real[np.argmin(np.abs(vals.real))]
    dominant = np.abs(vals.real - re1) <= DOMINANT_RTOL * abs(re1)
    args = np.mod(np.angle(vals[dominant]), 2 * math.pi)
    return bool(np.all((args > 0.75 * math.pi) & (args < 1.25 * math.pi)))


def crossover_delays(eigs):
    """eta_i for each eigenvalue (NaN where the scan finds no sign change).

    eta_i solves g(alpha_i tau) = |Re alpha_1| / |Re alpha_i| on
    (0, tau*_i): 64 log-spaced samples locate the first + to - sign change of
    g(alpha_i tau) |Re alpha_i| - |Re alpha_1|, then bisection refines it.
    """
    vals = _values(eigs)
    _require_stable(vals)
    r0 = np.min(np.abs(vals.real))
    bounds = boundary_taus(vals)
    eta = np.full(vals.size, np.nan)

    # conjugates share g, so solve once per upper-half-plane representative
    rep = np.flatnonzero(vals.imag >= 0)
    v = vals[rep]
    ub = bounds[rep]
    grid = ub[:, None] * np.geomspace(1e-6, 1 - 1e-12, SCAN_POINTS)[None, :]

    def excess(alpha, tau):
        w = lambert_w0_array(alpha * tau)
        return -w.real / tau - r0

    f = excess(v[:, None], grid)
    change = (f[:, :-1] > 0) & (f[:, 1:] <= 0)
    has = change.any(axis=1)
    if not np.any(has):
        return eta
    first = np.argmax(change, axis=1)
    rows = np.flatnonzero(has)
    lo = grid[rows, first[rows]]
    hi = grid[rows, first[rows] + 1]
    alpha = v[rows]
    for _ in range(MAX_BISECTIONS):
        if np.max(hi - lo) <= BISECT_ATOL:
            break
        mid = 0.5 * (lo + hi)
        pos = excess(alpha, mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    roots = 0.5 * (lo + hi)
    eta[rep[rows]] = roots
    # copy to the conjugate partners
    for k in np.flatnonzero(vals.imag < 0):
        match = rep[np.argmin(np.abs(vals[rep] - np.conj(vals[k])))]
        eta[k] = eta[match]
    return eta


def tau_tilde(eigs):
    """Crossover delay: the smallest eta_i, where the delayed rate returns to R0."""
    eta = crossover_delays(eigs)
    if np.all(np.isnan(eta)):
        raise NoCrossover("the delayed rate never returns to R0 before the delay margin")
    return float(np.nanmin(eta))


def rate_sweep(eigs, samples=64):
    """Predicted rate on an even grid over [0, 0.999 tau*) plus thresholds."""
    if samples < 8:
        raise InputError("samples must be >= 8")
    vals = _values(eigs)
    _require_stable(vals)
    report = tau_star(vals)
    grid = 0.999 * report.tau_star * np.arange(samples) / samples
    report.rate_curve = np.column_stack([grid, _rates(vals, grid)])
    try:
        report.tau_tilde = tau_tilde(vals)
    except NoCrossover:
        report.tau_tilde = None
    return report


def boundary_curve(tau, points=200, theta_min=0.75 * math.pi, theta_max=1.25 * math.pi):
    """Polar samples of the stability boundary for delay ``tau``.

    r(theta) = |arctan(-cot theta)| / tau, which equals (pi/2 - |theta - pi|) / tau
    for theta in [pi/2, 3pi/2].  Returns an array with columns theta, r, x, y.
    """
    if not tau > 0:
        raise InputError("tau must be positive")
    if points < 2:
        raise InputError("points must be >= 2")
    theta = np.linspace(theta_min, theta_max, points)
    r = (0.5 * math.pi - np.abs(theta - math.pi)) / tau
    return np.column_stack([theta, r, r * np.cos(theta), r * np.sin(theta)])
