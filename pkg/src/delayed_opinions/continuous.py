"""Fixed-step integration of x'(t) = (-L) x(t - tau_c).

The history on [-tau_c, 0] is the constant initial state.  Steps are
classical RK4; the delayed argument at a half step falls midway between two
stored nodes and is read by cubic Hermite interpolation using the stored
states and their derivatives.  With tau_c = 0 the same stepper integrates the
ordinary system.

Thresholds are relative to ||x0||_inf so that the integrator is exactly
linear in the initial state.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import InputError, PoorFit, StepTooLarge
from .graph import as_weight_matrix

STOP_TOL = 1e-8
DIVERGENCE_FACTOR = 1e6
SETTLED_FACTOR = 1e-3
RATE_FLOOR = 1e-13
MIN_R2 = 0.9
DEFAULT_HORIZON = 200.0
_CHUNK = 2048


def default_dt(tau_c):
    return tau_c / 64.0 if tau_c > 0 else 1.0 / 128.0


@dataclass(frozen=True)
class ContinuousSystem:
    neg_l: np.ndarray
    tau_c: float
    x0: np.ndarray
    dt: float = None
    horizon: float = None  # default max(10 tau_c, 200)

    def __post_init__(self):
        a = as_weight_matrix(self.neg_l)
        n = a.shape[0]
        tau = float(self.tau_c)
        if not (math.isfinite(tau) and tau >= 0):
            raise InputError(f"tau_c must be a finite non-negative number, got {self.tau_c}")
        dt = default_dt(tau) if self.dt is None else float(self.dt)
        if not (math.isfinite(dt) and dt > 0):
            raise InputError(f"dt must be positive, got {dt}")
        if tau > 0:
            if dt > tau:
                raise StepTooLarge(f"dt = {dt} exceeds the delay {tau}")
            m = round(tau / dt)
            if abs(m * dt - tau) > 1e-12 * max(1.0, tau):
                raise InputError(f"dt = {dt} does not divide tau_c = {tau}")
        else:
            norm = float(np.max(np.abs(a).sum(axis=1)))
            if norm > 0 and dt > 0.1 / norm:
                raise StepTooLarge(f"dt = {dt} exceeds 0.1/||L||_inf = {0.1 / norm}")
        min_horizon = 10.0 * tau if tau > 0 else 10.0
        if self.horizon is None:
            horizon = max(min_horizon, DEFAULT_HORIZON)
        else:
            horizon = float(self.horizon)
        if horizon < min_horizon * (1 - 1e-12):
            raise InputError(f"horizon must be at least {min_horizon}, got {horizon}")
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (n,) or not np.all(np.isfinite(x0)):
            raise InputError(f"x0 must be a finite vector of length {n}")
        object.__setattr__(self, "neg_l", a)
        object.__setattr__(self, "tau_c", tau)
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "x0", x0)

    @property
    def n(self):
        return self.neg_l.shape[0]

    @property
    def delay_steps(self):
        return int(round(self.tau_c / self.dt))


@dataclass
class ContinuousTrajectory:
    times: np.ndarray
    states: np.ndarray  # row k is X(times[k])
    classification: str
    measured_rate: float = None

    def to_dict(self):
        return {
            "classification": self.classification,
            "measured_rate": self.measured_rate,
            "final_time": float(self.times[-1]),
            "samples": int(self.times.size),
        }


def _scale(x0):
    s = float(np.max(np.abs(x0))) if x0.size else 0.0
    return s if s > 0 else 1.0


def integrate(sys, stop_tol=STOP_TOL, record_every=1):
    """Integrate to the horizon, or until ||X||_inf < stop_tol * ||x0||_inf.

    ``stop_tol=None`` disables the early stop; the run is still classified
    converged_zero if the norm ever fell below STOP_TOL * ||x0||_inf.
    Every ``record_every``-th step is kept (the final step always is).
    """
    if int(record_every) != record_every or record_every < 1:
        raise InputError("record_every must be a positive integer")
    n, dt = sys.n, sys.dt
    a = np.ascontiguousarray(sys.neg_l)
    m = sys.delay_steps
    scale = _scale(sys.x0)
    total = int(math.ceil(sys.horizon / dt - 1e-9))
    x = sys.x0.copy()

    if m > 0:
        ring = 2 * m + 2
        g = np.empty((ring, n))
        h = np.empty((ring, n))
        g[0] = a @ x
        h[0] = a @ g[0]

    kept_t = [0.0]
    kept_x = [x.copy()]
    buf = np.empty((min(_CHUNK, total), n))
    k = 0
    status = None
    reached_small = False
    while k < total:
        nsteps = min(_CHUNK, total - k)
        out = buf[:nsteps]
        if m > 0:
            kernels.dde_advance(a, x, g, h, k, m, dt, nsteps, out)
        else:
            kernels.ode_advance(a, x, dt, nsteps, out)
        norms = np.max(np.abs(out), axis=1)
        stop = nsteps
        big = np.flatnonzero(~np.isfinite(norms) | (norms > DIVERGENCE_FACTOR * scale))
        if big.size:
            stop = int(big[0]) + 1
            status = "diverged"
        elif stop_tol is not None:
            small = np.flatnonzero(norms < stop_tol * scale)
            if small.size:
                stop = int(small[0]) + 1
                status = "converged_zero"
        else:
            reached_small = reached_small or bool(np.any(norms < STOP_TOL * scale))
        steps = np.arange(k + 1, k + stop + 1)
        keep = (steps % record_every == 0) | (steps == k + stop)
        kept_t.extend((steps[keep] * dt).tolist())
        kept_x.extend(out[:stop][keep])
        k += stop
        if status is not None:
            break

    traj = ContinuousTrajectory(np.asarray(kept_t), np.asarray(kept_x), "undetermined")
    if status is None:
        status = "converged_zero" if reached_small else _classify_tail(traj, scale)
    traj.classification = status
    if status == "converged_zero":
        try:
            traj.measured_rate = measure_rate(traj)
        except PoorFit:
            traj.measured_rate = None
    return traj


def _tail_fit(times, norms, floor):
    """Least-squares slope and R^2 of log ||X|| over the final half."""
    half = times >= 0.5 * times[-1]
    use = half & (norms >= floor) & np.isfinite(norms)
    if np.count_nonzero(use) < 3:
        raise PoorFit("fewer than three usable samples in the final half")
    t = times[use]
    y = np.log(norms[use])
    tc = t - t.mean()
    denom = float(tc @ tc)
    if denom == 0:
        raise PoorFit("degenerate time samples")
    slope = float(tc @ (y - y.mean())) / denom
    resid = y - y.mean() - slope * tc
    total = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / total if total > 0 else 1.0
    return slope, r2


def _classify_tail(traj, scale):
    norms = np.max(np.abs(traj.states), axis=1)
    if norms[-1] >= SETTLED_FACTOR * scale:
        return "undetermined"
    try:
        slope, _ = _tail_fit(traj.times, norms, RATE_FLOOR * scale)
    except PoorFit:
        return "undetermined"
    return "converged_zero" if slope < 0 else "undetermined"


def measure_rate(traj, floor=RATE_FLOOR):
    """Decay exponent: least-squares slope of -log ||X(t)||_inf over the final half.

    Samples with ||X||_inf below ``floor * ||X(0)||_inf`` are skipped.
    Raises PoorFit when R^2 < 0.9.
    """
    norms = np.max(np.abs(traj.states), axis=1)
    scale = _scale(traj.states[0])
    slope, r2 = _tail_fit(np.asarray(traj.times, dtype=float), norms, floor * scale)
    if r2 < MIN_R2:
        raise PoorFit(f"tail fit R^2 = {r2:.3f} < {MIN_R2}; extend the horizon")
    return -slope
