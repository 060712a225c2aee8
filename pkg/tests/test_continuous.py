import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delayed_opinions.continuous import (
    ContinuousSystem,
    ContinuousTrajectory,
    integrate,
    measure_rate,
)
from delayed_opinions.delay import rate_continuous, tau_star
from delayed_opinions.errors import InputError, PoorFit, StepTooLarge
from delayed_opinions.netgen import MixtureSpec, build_laplacian, generate, normalize_rows
from delayed_opinions.reference import W_TM, X0_FIVE
from delayed_opinions.spectral import eigenvalues


def series_solution(a, x0, tau, t):
    """Exact solution of x' = A x(t - tau) with constant history:
    x(t) = sum_k A^k (t - (k - 1) tau)_+^k / k! x0."""
    x = np.zeros_like(x0, dtype=float)
    term = np.array(x0, dtype=float)
    k = 0
    while True:
        s = t - (k - 1) * tau
        if s <= 0 and k > 0:
            return x
        x = x + s ** k / math.factorial(k) * term
        term = a @ term
        k += 1


def state_at(traj, t):
    k = int(np.argmin(np.abs(traj.times - t)))
    assert abs(traj.times[k] - t) < 1e-9
    return traj.states[k]


def test_scalar_ode_matches_exponential():
    sys = ContinuousSystem([[-1.0]], 0.0, [1.0], horizon=10.0)
    traj = integrate(sys, stop_tol=None)
    assert abs(state_at(traj, 1.0)[0] - math.exp(-1)) < 1e-8
    assert traj.classification == "converged_zero"


def test_dde_matches_method_of_steps_series():
    rng = np.random.default_rng(5)
    a = -np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    x0 = rng.uniform(-1, 1, 4)
    sys = ContinuousSystem(a, 1.0, x0, dt=1 / 64, horizon=10.0)
    traj = integrate(sys, stop_tol=None)
    for t in (0.5, 1.0, 2.5, 5.0, 8.0):
        assert np.max(np.abs(state_at(traj, t) - series_solution(a, x0, 1.0, t))) < 1e-8


def test_dde_fourth_order_convergence():
    a = np.array([[-1.0, 0.5], [-0.5, -1.0]])
    x0 = np.array([1.0, -0.5])
    errs = []
    for dt in (1 / 8, 1 / 16, 1 / 32):
        traj = integrate(ContinuousSystem(a, 1.0, x0, dt=dt, horizon=10.0), stop_tol=None)
        errs.append(np.max(np.abs(state_at(traj, 6.0) - series_solution(a, x0, 1.0, 6.0))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 12 < coarse / fine < 20


def test_sustained_oscillation_at_quarter_period_delay():
    # x' = -x(t - pi/2) has roots +-i on the imaginary axis
    tau = math.pi / 2
    traj = integrate(ContinuousSystem([[-1.0]], tau, [1.0], horizon=60 * tau))
    assert traj.classification == "undetermined"
    late = np.abs(traj.states[traj.times > 40 * tau, 0])
    assert 0.3 < late.max() < 3


@settings(max_examples=25)
@given(st.integers(0, 2 ** 31), st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([0.0, 0.25, 0.5]))
def test_integration_is_linear_in_initial_state(seed, c1, c2, tau):
    rng = np.random.default_rng(seed)
    a = -np.eye(3) + 0.4 * rng.standard_normal((3, 3))
    x1, x2 = rng.uniform(-1, 1, (2, 3))
    kwargs = dict(dt=1 / 64 if tau == 0 else None, horizon=10.0)
    run = lambda x: integrate(ContinuousSystem(a, tau, x, **kwargs), stop_tol=None).states
    combo = run(c1 * x1 + c2 * x2)
    expected = c1 * run(x1) + c2 * run(x2)
    assert np.max(np.abs(combo - expected)) <= 1e-10 * max(1.0, np.max(np.abs(expected)))


def test_measure_rate_scalar_decay():
    traj = integrate(ContinuousSystem([[-1.0]], 0.0, [1.0], horizon=20.0), stop_tol=None)
    assert measure_rate(traj) == pytest.approx(1.0, rel=0.01)


def test_measure_rate_at_branch_point():
    # alpha tau = -1/e puts a double root at -1/tau
    a = [[-1.0 / math.e]]
    traj = integrate(ContinuousSystem(a, 1.0, [1.0], horizon=100.0), stop_tol=None)
    assert measure_rate(traj, floor=0.0) == pytest.approx(1.0, rel=0.02)


def test_measure_rate_on_random_network_without_delay():
    w = normalize_rows(generate(MixtureSpec(100, 0.5, seed=2)))
    neg_l = build_laplacian(w)
    alpha = eigenvalues(neg_l, "real").eigenvalues
    predicted = float(np.min(np.abs(alpha.real)))
    x0 = np.random.default_rng(0).uniform(-1, 1, 100)
    dt = 0.1 / np.max(np.abs(neg_l).sum(axis=1))
    traj = integrate(ContinuousSystem(neg_l, 0.0, x0, dt=dt, horizon=10.0))
    assert traj.classification == "converged_zero"
    assert measure_rate(traj) == pytest.approx(predicted, rel=0.05)


def test_measure_rate_rejects_noise():
    rng = np.random.default_rng(1)
    t = np.linspace(0, 10, 200)
    traj = ContinuousTrajectory(t, np.exp(rng.normal(0, 3, (200, 1))), "undetermined")
    with pytest.raises(PoorFit):
        measure_rate(traj)
    with pytest.raises(PoorFit):
        measure_rate(ContinuousTrajectory(t[:2], np.ones((2, 1)), "undetermined"))


def test_reference_network_delay_margin_is_sharp():
    neg_l = build_laplacian(W_TM)
    ts = tau_star(eigenvalues(neg_l)).tau_star
    below = integrate(ContinuousSystem(neg_l, 0.9 * ts, X0_FIVE))
    above = integrate(ContinuousSystem(neg_l, 1.1 * ts, X0_FIVE, horizon=400.0))
    assert below.classification == "converged_zero"
    assert above.classification == "diverged"


def test_measured_rate_follows_prediction_under_delay():
    neg_l = build_laplacian(W_TM)
    for tau in (0.1, 0.24, 0.5):
        traj = integrate(ContinuousSystem(neg_l, tau, X0_FIVE))
        assert traj.measured_rate == pytest.approx(rate_continuous(eigenvalues(neg_l), tau), rel=0.05)


def test_divergence_is_detected():
    traj = integrate(ContinuousSystem(build_laplacian(W_TM), 1.0, X0_FIVE))
    assert traj.classification == "diverged"
    assert np.max(np.abs(traj.states[-1])) > 1e6 * np.max(np.abs(X0_FIVE))
    assert traj.times[-1] < 200


def test_recording_stride_keeps_final_step():
    sys = ContinuousSystem([[-1.0]], 0.5, [1.0], horizon=10.0)
    full = integrate(sys, stop_tol=None)
    sparse = integrate(sys, stop_tol=None, record_every=7)
    assert sparse.times[-1] == full.times[-1]
    assert np.allclose(sparse.states, full.states[np.isin(full.times, sparse.times)])
    with pytest.raises(InputError):
        integrate(sys, record_every=0)


def test_system_validation():
    neg_l = build_laplacian(W_TM)
    with pytest.raises(StepTooLarge):
        ContinuousSystem(neg_l, 0.1, X0_FIVE, dt=0.2)
    with pytest.raises(StepTooLarge):
        ContinuousSystem(neg_l, 0.0, X0_FIVE, dt=0.1)
    with pytest.raises(InputError):
        ContinuousSystem(neg_l, 0.1, X0_FIVE, dt=0.03)
    with pytest.raises(InputError):
        ContinuousSystem(neg_l, 1.0, X0_FIVE, horizon=5.0)
    with pytest.raises(InputError):
        ContinuousSystem(neg_l, -1.0, X0_FIVE)
    with pytest.raises(InputError):
        ContinuousSystem(neg_l, 0.5, X0_FIVE[:3])
    sys = ContinuousSystem(neg_l, 0.5, X0_FIVE)
    assert sys.dt == 0.5 / 64 and sys.horizon == 200.0 and sys.delay_steps == 64
    assert ContinuousSystem(neg_l, 30.0, X0_FIVE).horizon == 300.0
