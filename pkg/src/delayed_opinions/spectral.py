"""Eigenvalues of dense real matrices and random-matrix predictions for them.

The eigensolver delegates to LAPACK ``geev`` through :func:`numpy.linalg.eig`
(balancing, Hessenberg reduction, shifted QR).  The contract is
residual-based: every returned eigenpair satisfies
``||M v - lambda v|| <= 1e-8 ||M||_F``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateMean, InputError, NoConvergence
from .graph import as_weight_matrix

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    spectral_radius: float
    rightmost_real: float
    ordering: str = "modulus"

    def __len__(self):
        return len(self.eigenvalues)

    def to_dict(self):
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "spectral_radius": float(self.spectral_radius),
            "rightmost_real": float(self.rightmost_real),
            "ordering": self.ordering,
        }


def order_eigenvalues(values, ordering="modulus"):
    """Sort by descending modulus ("modulus") or ascending |Re| ("real")."""
    values = np.asarray(values, dtype=complex)
    if ordering == "modulus":
        key = -np.abs(values)
    elif ordering == "real":
        key = np.abs(values.real)
    else:
        raise InputError(f"unknown ordering {ordering!r}")
    # lexsort for determinism between conjugates: primary key last
    return values[np.lexsort((-values.imag, values.real, key))]


def summarize(values, ordering="modulus"):
    values = order_eigenvalues(values, ordering)
    return SpectralSummary(
        eigenvalues=values,
        spectral_radius=float(np.max(np.abs(values))) if values.size else 0.0,
        rightmost_real=float(np.max(values.real)) if values.size else 0.0,
        ordering=ordering,
    )


def _eig(m, vectors):
    try:
        if vectors:
            return np.linalg.eig(m)
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"QR iteration failed to converge: {exc}") from exc


def eigenvalues(m, ordering="modulus"):
    """All eigenvalues of the real square matrix ``m`` as a SpectralSummary."""
    m = as_weight_matrix(m)
    return summarize(_eig(m, vectors=False), ordering)


def eigen_residuals(m):
    """Relative residuals ||M v - lambda v||_2 / ||M||_F for unit eigenvectors."""
    m = as_weight_matrix(m)
    vals, vecs = _eig(m, vectors=True)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    res = np.linalg.norm(m @ vecs - vecs * vals, axis=0)
    scale = max(np.linalg.norm(m), np.finfo(float).tiny)
    return vals, res / scale


def predict_circular(stats, n):
    """Radius of the circular-law disc for a row-normalized random mixture."""
    if stats.is_complex:
        raise InputError("circular-law prediction applies to the random mixture")
    return math.sqrt(n * stats.p_connect * stats.sigma ** 2) / (
        (n - 1) * stats.p_connect * stats.e_abs_z
    )


@dataclass(frozen=True)
class EllipsePrediction:
    center_shift: float
    v: float
    t: float
    zeta: float
    a: float
    b: float
    outlier: float
    q_rightmost: complex
    q_leftmost: complex
    q_uppermost: complex
    q_outlier: complex
    lambda_hat: float = None

    @property
    def has_outlier(self):
        return self.outlier is not None

    @property
    def sqrt_nv(self):
        return 0.5 * (self.a + self.b)

    def to_dict(self):
        def pt(z):
            return None if z is None else [float(z.real), float(z.imag)]

        return {
            "center_shift": self.center_shift,
            "v": self.v,
            "t": self.t,
            "zeta": self.zeta,
            "a": self.a,
            "b": self.b,
            "outlier": self.outlier,
            "lambda_hat": self.lambda_hat,
            "q_rightmost": pt(self.q_rightmost),
            "q_leftmost": pt(self.q_leftmost),
            "q_uppermost": pt(self.q_uppermost),
            "q_outlier": pt(self.q_outlier),
        }


def predict_ellipse(stats, n):
    """Elliptic-law region and mean-induced outlier for a complex mixture.

    The bulk is predicted uniform on ((x + E)/a)^2 + (y/b)^2 <= 1 with
    a = sqrt(nV)(1 + zeta), b = sqrt(nV)(1 - zeta).  When |nE| > sqrt(nV) a
    single eigenvalue sits outside at lambda_hat - E.
    """
    if not stats.is_complex:
        raise InputError("elliptic-law prediction applies to the complex mixture")
    p, sigma, ez = stats.p_connect, stats.sigma, stats.e_abs_z
    p_hat, p_bar, p_star = stats.p_hat, stats.p_bar, stats.p_star
    c_m = (n - 1) * p * p_hat * ez

    mean = p_bar / ((n - 1) * p_hat)
    mean_sq = p * p_hat * sigma ** 2 / c_m ** 2
    var = mean_sq - mean ** 2
    cross = p * p_star * ez ** 2 / c_m ** 2
    sqrt_nv = math.sqrt(n * p * p_hat * sigma ** 2 - n * p ** 2 * p_bar ** 2 * ez ** 2) / c_m
    zeta = (p_star * ez ** 2 - p * p_bar ** 2 * ez ** 2) / (
        p_hat * sigma ** 2 - p * p_bar ** 2 * ez ** 2
    )
    a = sqrt_nv * (1.0 + zeta)
    b = sqrt_nv * (1.0 - zeta)

    outlier = lam_hat = q_out = None
    if abs(n * mean) > sqrt_nv:
        if mean == 0:
            raise DegenerateMean("outlier requested with zero mean entry")
        lam_hat = n * mean + (cross - mean ** 2) / mean
        outlier = lam_hat - mean
        q_out = complex(outlier, 0.0)

    return EllipsePrediction(
        center_shift=mean,
        v=var,
        t=cross,
        zeta=zeta,
        a=a,
        b=b,
        outlier=outlier,
        q_rightmost=complex(a - mean, 0.0),
        q_leftmost=complex(-a - mean, 0.0),
        q_uppermost=complex(-mean, b),
        q_outlier=q_out,
        lambda_hat=lam_hat,
    )


@dataclass(frozen=True)
class ContainmentReport:
    fraction: float
    n_checked: int
    outlier_matched: complex = None
    outlier_error: float = None  # relative to |predicted outlier|


def containment_check(summary, pred, slack=1.15):
    """Fraction of eigenvalues inside the predicted ellipse inflated by ``slack``.

    When an outlier is predicted, the eigenvalue nearest to it is matched,
    removed from the bulk and its relative error reported.
    """
    if slack < 0:
        raise InputError("slack must be non-negative")
    vals = np.asarray(summary.eigenvalues, dtype=complex)
    matched = err = None
    if pred.has_outlier and vals.size:
        k = int(np.argmin(np.abs(vals - pred.q_outlier)))
        matched = complex(vals[k])
        err = abs(matched - pred.q_outlier) / abs(pred.q_outlier)
        vals = np.delete(vals, k)
    if vals.size == 0:
        return ContainmentReport(1.0, 0, matched, err)
    tiny = np.finfo(float).tiny
    a = max(pred.a * slack, tiny)
    b = max(pred.b * slack, tiny)
    inside = ((vals.real + pred.center_shift) / a) ** 2 + (vals.imag / b) ** 2 <= 1.0
    return ContainmentReport(float(np.mean(inside)), int(vals.size), matched, err)
