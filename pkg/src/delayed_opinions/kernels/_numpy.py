"""Pure-numpy kernels.

Every function here has a twin with the same signature in ``_numba`` and the
two are tested against each other.  Time-stepping kernels work in chunks and
mutate their ring buffers in place so a driver can stop early between chunks.
"""

import numpy as np

E_HI = np.e
E_LO = 1.4456468917292502e-16  # e - fl(e)
INV_E = np.exp(-1.0)
EPS = np.finfo(float).eps
MAX_HALLEY = 100


def _guess_regions(z):
    """Masks (near_branch, near_zero, far) selecting the initial guess."""
    near_branch = np.abs(z + INV_E) < 0.3
    near_zero = (
        ~near_branch
        & (z.real > -1.0)
        & (z.real < 1.5)
        & (np.abs(z.imag) < 1.0)
        & (z.real > -2.5 * np.abs(z.imag) - 0.2)
    )
    return near_branch, near_zero, ~(near_branch | near_zero)


def _initial_guess(z):
    w = np.empty_like(z)
    near_branch, near_zero, far = _guess_regions(z)

    zb = z[near_branch]
    p = np.sqrt(2.0 * (E_HI * zb + 1.0 + E_LO * zb))
    w[near_branch] = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3

    # (2, 2) Pade approximant of W(z)/z at the origin
    z0 = z[near_zero]
    w[near_zero] = z0 * (60.0 + z0 * (114.0 + 17.0 * z0)) / (60.0 + z0 * (174.0 + 101.0 * z0))

    zf = z[far]
    l1 = np.log(zf)
    l2 = np.log(l1)
    w[far] = l1 - l2 + l2 / l1
    return w


def lambertw0(z):
    """Principal branch of Lambert W for a 1-d complex array.

    Returns ``(w, converged)``.  Points on the negative real axis left of the
    branch point take the limit from the upper half plane.
    """
    # adding +0j turns a -0.0 imaginary part into +0.0 (upper side of the cut)
    z = np.ascontiguousarray(z, dtype=np.complex128) + 0j
    w = np.zeros_like(z)
    converged = np.zeros(z.shape, dtype=np.bool_)

    zero = z == 0
    # floating-point neighbourhood of -1/e: snap to the branch point value
    q = E_HI * z + 1.0 + E_LO * z
    snap = ~zero & (np.abs(q) <= 4.0 * EPS)
    w[snap] = -1.0
    converged[zero | snap] = True
    bad = ~np.isfinite(z)
    active = ~(zero | snap | bad)

    idx = np.flatnonzero(active)
    zz = z[idx]
    ww = _initial_guess(zz)
    for _ in range(MAX_HALLEY):
        if idx.size == 0:
            break
        ew = np.exp(ww)
        f = ww * ew - zz
        # residual at rounding level: further steps only chase noise
        settled = np.abs(f) <= 2.0 * EPS * np.maximum(1.0, np.abs(zz))
        w[idx[settled]] = ww[settled]
        converged[idx[settled]] = True
        live = ~settled
        idx, zz, ww, ew, f = idx[live], zz[live], ww[live], ew[live], f[live]
        wp1 = ww + 1.0
        wp1 = np.where(wp1 == 0, EPS, wp1)
        dw = f / (ew * wp1 - (ww + 2.0) * f / (2.0 * wp1))
        ww = ww - dw
        done = np.abs(dw) <= 4.0 * EPS * (1.0 + np.abs(ww))
        w[idx[done]] = ww[done]
        converged[idx[done]] = True
        idx, zz, ww = idx[~done], zz[~done], ww[~done]
    w[idx] = ww
    w[bad] = np.nan
    return w, converged


def discrete_advance(w_hat, w_tilde, ring, k0, nsteps, out):
    """Advance X(k+1) = diag(w_hat) X(k) + w_tilde X(k - tau).

    ``ring`` has tau+1 rows and holds X(j) in row ``j % (tau+1)``; rows for
    negative j are pre-filled with X(0).  ``k0`` is the index of the current
    state.  The new states are written to ``out[:nsteps]``.
    """
    slots = ring.shape[0]
    for s in range(nsteps):
        k = k0 + s
        cur = ring[k % slots]
        delayed = ring[(k + 1) % slots]  # X(k - tau), about to be overwritten
        new = w_hat * cur + w_tilde @ delayed
        ring[(k + 1) % slots] = new
        out[s] = new


def dde_advance(a, x, g, h, k0, m, dt, nsteps, out):
    """RK4 steps for x'(t) = a x(t - m dt) with cubic Hermite history.

    ``g[j % R]`` holds a @ X_j and ``h[j % R]`` holds a @ a @ X_j for the last
    R = 2m + 2 nodes.  Negative node indices clamp to 0, which encodes the
    constant initial history.  ``x`` is updated in place.
    """
    ring = g.shape[0]
    for s in range(nsteps):
        k = k0 + s
        j = k - m
        j0 = max(j, 0) % ring
        j1 = max(j + 1, 0) % ring
        i0 = max(j - m, 0) % ring
        i1 = max(j + 1 - m, 0) % ring
        k1 = g[j0]
        k4 = g[j1]
        kmid = 0.5 * (k1 + k4) + (dt / 8.0) * (h[i0] - h[i1])
        x += (dt / 6.0) * (k1 + 4.0 * kmid + k4)
        out[s] = x
        gx = a @ x
        slot = (k + 1) % ring
        g[slot] = gx
        h[slot] = a @ gx


def ode_advance(a, x, dt, nsteps, out):
    """Classical RK4 for x' = a x; ``x`` is updated in place."""
    half = 0.5 * dt
    for s in range(nsteps):
        k1 = a @ x
        k2 = a @ (x + half * k1)
        k3 = a @ (x + half * k2)
        k4 = a @ (x + dt * k3)
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s] = x
