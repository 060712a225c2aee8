"""Numba-compiled twins of the kernels in ``_numpy``.

Same signatures and semantics; loops are explicit so the compiled code does
not allocate per step.
"""

import cmath
import math

import numba as nb
import numpy as np

from ._numpy import E_HI, E_LO, EPS, INV_E, MAX_HALLEY

jit = nb.njit(cache=True, nogil=True)


@jit
def _w0_scalar(z):
    z = complex(z.real, z.imag + 0.0)
    if z == 0:
        return 0j, True
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return complex(np.nan, np.nan), False
    q = E_HI * z + 1.0 + E_LO * z
    if abs(q) <= 4.0 * EPS:
        return -1.0 + 0j, True

    if abs(z + INV_E) < 0.3:
        p = cmath.sqrt(2.0 * q)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    elif -1.0 < z.real < 1.5 and abs(z.imag) < 1.0 and z.real > -2.5 * abs(z.imag) - 0.2:
        w = z * (60.0 + z * (114.0 + 17.0 * z)) / (60.0 + z * (174.0 + 101.0 * z))
    else:
        l1 = cmath.log(z)
        l2 = cmath.log(l1)
        w = l1 - l2 + l2 / l1

    scale = max(1.0, abs(z))
    for _ in range(MAX_HALLEY):
        ew = cmath.exp(w)
        f = w * ew - z
        # residual at rounding level: further steps only chase noise
        if abs(f) <= 2.0 * EPS * scale:
            return w, True
        wp1 = w + 1.0
        if wp1 == 0:
            wp1 = EPS + 0j
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w = w - dw
        if abs(dw) <= 4.0 * EPS * (1.0 + abs(w)):
            return w, True
    return w, False


@jit
def lambertw0(z):
    n = z.shape[0]
    w = np.empty(n, dtype=np.complex128)
    converged = np.empty(n, dtype=np.bool_)
    for i in range(n):
        w[i], converged[i] = _w0_scalar(z[i])
    return w, converged


@jit
def discrete_advance(w_hat, w_tilde, ring, k0, nsteps, out):
    slots = ring.shape[0]
    n = w_hat.shape[0]
    for s in range(nsteps):
        k = k0 + s
        cur = (k % slots)
        dslot = (k + 1) % slots
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += w_tilde[i, j] * ring[dslot, j]
            out[s, i] = w_hat[i] * ring[cur, i] + acc
        for i in range(n):
            ring[dslot, i] = out[s, i]


@jit
def _matvec(a, v, dest):
    n = a.shape[0]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += a[i, j] * v[j]
        dest[i] = acc


@jit
def dde_advance(a, x, g, h, k0, m, dt, nsteps, out):
    ring = g.shape[0]
    n = x.shape[0]
    c6 = dt / 6.0
    c8 = dt / 8.0
    for s in range(nsteps):
        k = k0 + s
        j = k - m
        j0 = max(j, 0) % ring
        j1 = max(j + 1, 0) % ring
        i0 = max(j - m, 0) % ring
        i1 = max(j + 1 - m, 0) % ring
        for i in range(n):
            k1 = g[j0, i]
            k4 = g[j1, i]
            kmid = 0.5 * (k1 + k4) + c8 * (h[i0, i] - h[i1, i])
            x[i] += c6 * (k1 + 4.0 * kmid + k4)
            out[s, i] = x[i]
        slot = (k + 1) % ring
        _matvec(a, x, g[slot])
        _matvec(a, g[slot], h[slot])


@jit
def ode_advance(a, x, dt, nsteps, out):
    n = x.shape[0]
    half = 0.5 * dt
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for s in range(nsteps):
        _matvec(a, x, k1)
        for i in range(n):
            tmp[i] = x[i] + half * k1[i]
        _matvec(a, tmp, k2)
        for i in range(n):
            tmp[i] = x[i] + half * k2[i]
        _matvec(a, tmp, k3)
        for i in range(n):
            tmp[i] = x[i] + dt * k3[i]
        _matvec(a, tmp, k4)
        for i in range(n):
            x[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            out[s, i] = x[i]
