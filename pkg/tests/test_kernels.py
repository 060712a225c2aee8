import json
import os
import subprocess
import sys

import numpy as np
import pytest

from delayed_opinions import kernels

numba_backend = pytest.importorskip("numba") and kernels.get_backend("numba")
numpy_backend = kernels.get_backend("numpy")


def run_both(fn_name, *args, mutable=()):
    """Call a kernel on both backends with private copies of the arguments."""
    results = []
    for mod in (numpy_backend, numba_backend):
        copies = [np.array(a, copy=True) if isinstance(a, np.ndarray) else a for a in args]
        ret = getattr(mod, fn_name)(*copies)
        results.append((ret, [copies[i] for i in mutable]))
    return results


def test_lambert_backends_agree():
    rng = np.random.default_rng(0)
    mod = 10 ** rng.uniform(-8, 3, 5000)
    z = mod * np.exp(1j * rng.uniform(-np.pi, np.pi, mod.size))
    z = np.concatenate([z, [0, np.e, -1 / np.e, -np.pi / 2, complex(-1.5, -0.0), -1 / np.e + 1e-9j]])
    (w1, ok1), (w2, ok2) = (b.lambertw0(z) for b in (numpy_backend, numba_backend))
    assert ok1.all() and ok2.all()
    assert np.max(np.abs(w1 - w2) / np.maximum(1, np.abs(w1))) < 1e-14


def test_discrete_backends_agree():
    rng = np.random.default_rng(1)
    n, tau, steps = 12, 3, 300
    w_diag = rng.uniform(-0.3, 0.3, n)
    w_tilde = rng.standard_normal((n, n))
    np.fill_diagonal(w_tilde, 0)
    w_tilde *= ((1 - np.abs(w_diag)) / np.abs(w_tilde).sum(axis=1))[:, None]
    ring = np.tile(rng.uniform(-1, 1, n), (tau + 1, 1))
    out = np.empty((steps, n))
    (_, (r1, o1)), (_, (r2, o2)) = run_both(
        "discrete_advance", w_diag, w_tilde, ring, 0, steps, out, mutable=(2, 5)
    )
    assert np.allclose(o1, o2, rtol=0, atol=1e-14)
    assert np.allclose(r1, r2, rtol=0, atol=1e-14)


def test_dde_backends_agree():
    rng = np.random.default_rng(2)
    n, m, steps = 6, 16, 500
    a = -np.eye(n) + 0.3 * rng.standard_normal((n, n))
    x = rng.uniform(-1, 1, n)
    ring = 2 * m + 2
    g = np.empty((ring, n))
    h = np.empty((ring, n))
    g[0] = a @ x
    h[0] = a @ g[0]
    out = np.empty((steps, n))
    (_, s1), (_, s2) = run_both("dde_advance", a, x, g, h, 0, m, 1 / 16, steps, out, mutable=(1, 8))
    for u, v in zip(s1, s2):
        assert np.allclose(u, v, rtol=1e-13, atol=1e-14)


def test_ode_backends_agree():
    rng = np.random.default_rng(3)
    a = -np.eye(5) + 0.2 * rng.standard_normal((5, 5))
    x = rng.uniform(-1, 1, 5)
    out = np.empty((400, 5))
    (_, s1), (_, s2) = run_both("ode_advance", a, x, 0.01, 400, out, mutable=(1, 4))
    for u, v in zip(s1, s2):
        assert np.allclose(u, v, rtol=1e-13, atol=1e-14)


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop(kernels.ENV_FLAG, None)
    if flag is not None:
        env[kernels.ENV_FLAG] = flag
    code = "import json, delayed_opinions.kernels as k; print(json.dumps(k.BACKEND_NAME))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.parametrize("flag,expected", [(None, "numba"), ("0", "numba"), ("1", "numpy"), ("true", "numpy")])
def test_environment_flag_selects_backend(flag, expected):
    assert _backend_in_subprocess(flag) == expected


def test_unknown_backend_name():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
