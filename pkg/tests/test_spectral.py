from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from delayed_opinions.errors import InputError
from delayed_opinions.netgen import CASES, MixtureSpec, generate, mixture_stats, normalize_rows
from delayed_opinions.spectral import (
    containment_check,
    eigen_residuals,
    eigenvalues,
    order_eigenvalues,
    predict_circular,
    predict_ellipse,
    summarize,
)

# (E, V, T, zeta, a, b, outlier) at n = 500, P = 0.5, sigma = 1, from an
# mpmath computation of the normalized entry moments E(w), E(w^2), E(w_ij w_ji)
FROZEN_ELLIPSE = {
    "a": (0.0, 1.261678729639557e-5, -8.0320962566415396e-6, -0.63661977236758134,
          0.02886161874921545, 0.12998917474200744, None),
    "b": (0.0012024048096192385, 1.3694367429479206e-5, 0.0, -0.10557459726713786,
          0.074011654947174702, 0.091483767524138422, 0.59879759519038076),
    "c": (-0.0012024048096192385, 1.3694367429479206e-5, 0.0, -0.10557459726713786,
          0.074011654947174702, 0.091483767524138422, -0.59879759519038076),
    "d": (0.0, 1.5770984120494462e-5, 2.5100300802004811e-6, 0.15915494309189534,
          0.10293329873143257, 0.074667287531645185, None),
}


def charpoly_exact(m):
    """Faddeev-LeVerrier in exact rationals: coefficients of det(zI - M), leading first."""
    n = len(m)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        mk = [[sum(m[i][l] * mk[l][j] for l in range(n)) + c * ident[i][j] for j in range(n)]
              for i in range(n)]
        am = [[sum(m[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def polynomial_roots(coeffs):
    mpmath.mp.dps = 50
    roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in coeffs],
                             maxsteps=500, extraprec=400)
    return np.array([complex(r) for r in roots])


def match_error(a, b):
    a, b = list(a), list(b)
    worst = 0.0
    for z in a:
        k = int(np.argmin([abs(z - y) for y in b]))
        worst = max(worst, abs(z - b.pop(k)))
    return worst


@pytest.mark.parametrize("seed", range(5))
def test_six_by_six_against_exact_characteristic_polynomial(seed):
    rng = np.random.default_rng(seed)
    ints = rng.integers(-9, 10, size=(6, 6))
    exact = [[Fraction(int(v), 10) for v in row] for row in ints]
    oracle = polynomial_roots(charpoly_exact(exact))
    got = eigenvalues(ints / 10).eigenvalues
    assert match_error(got, oracle) < 1e-6


def test_trivial_spectra():
    assert np.allclose(sorted(eigenvalues(np.diag([3.0, -1.0, 0.5])).eigenvalues.real), [-1, 0.5, 3])
    swap = eigenvalues([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(sorted(swap.eigenvalues.real), [-1, 1])
    assert swap.spectral_radius == pytest.approx(1.0)


ENTRIES = st.one_of(st.just(0.0), st.floats(1e-3, 5.0), st.floats(-5.0, -1e-3))


@given(hnp.arrays(np.float64, st.integers(1, 12).map(lambda n: (n, n)), elements=ENTRIES))
def test_solver_sanity_properties(m):
    n = m.shape[0]
    summ = eigenvalues(m)
    vals = summ.eigenvalues
    _, res = eigen_residuals(m)
    assert np.all(res <= 1e-8)
    # power sums tr(m^k) stay well conditioned where defective eigenvalues are not
    scale = max(1.0, np.linalg.norm(m, 2))
    vals_t = eigenvalues(m.T).eigenvalues
    mk = np.eye(n)
    for k in range(1, n + 1):
        mk = mk @ m
        tol = 1e-9 * n * scale ** k
        assert abs(np.sum(vals ** k) - np.trace(mk)) <= tol
        assert abs(np.sum(vals_t ** k) - np.trace(mk)) <= tol
    nonreal = vals[np.abs(vals.imag) > 1e-9]
    assert match_error(nonreal, np.conj(nonreal)) <= 1e-8 * max(1.0, np.abs(m).max())
    assert summ.spectral_radius == pytest.approx(np.abs(vals).max())


@given(st.integers(2, 40), st.integers(0, 2 ** 31))
def test_normalized_spectral_radius_at_most_one(n, seed):
    w = normalize_rows(generate(MixtureSpec(n, 0.9 if n < 6 else 0.4, seed=seed)))
    assert eigenvalues(w).spectral_radius <= 1 + 1e-12


def test_ordering():
    vals = np.array([-0.1 + 2j, -0.1 - 2j, -3.0, 0.5, -0.2])
    by_mod = order_eigenvalues(vals, "modulus")
    assert np.all(np.diff(np.abs(by_mod)) <= 0)
    by_re = order_eigenvalues(vals, "real")
    assert np.all(np.diff(np.abs(by_re.real)) >= 0)
    assert by_re[0] == -0.1 + 2j and by_re[1] == -0.1 - 2j
    with pytest.raises(InputError):
        order_eigenvalues(vals, "imag")
    assert summarize(vals).rightmost_real == 0.5


def test_circular_radius_value():
    stats = mixture_stats(MixtureSpec(500, 0.5))
    expected = math.sqrt(250) / (499 * 0.5 * math.sqrt(2 / math.pi))
    assert predict_circular(stats, 500) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(InputError):
        predict_circular(mixture_stats(MixtureSpec(10, 0.5, proportions=CASES["a"])), 10)


@pytest.mark.parametrize("case", sorted(CASES))
def test_ellipse_prediction_matches_moment_oracle(case):
    pred = predict_ellipse(mixture_stats(MixtureSpec(500, 0.5, proportions=CASES[case])), 500)
    e, v, t, zeta, a, b, out = FROZEN_ELLIPSE[case]
    got = (pred.center_shift, pred.v, pred.t, pred.zeta, pred.a, pred.b)
    for g, want in zip(got, (e, v, t, zeta, a, b)):
        assert g == pytest.approx(want, rel=1e-12, abs=1e-18)
    if out is None:
        assert not pred.has_outlier and pred.q_outlier is None
    else:
        assert pred.outlier == pytest.approx(out, rel=1e-12)
        assert pred.q_outlier == complex(pred.outlier, 0)
    assert pred.a >= 0 and pred.b >= 0
    assert pred.q_rightmost == complex(pred.a - pred.center_shift, 0)
    assert pred.q_uppermost == complex(-pred.center_shift, pred.b)


def test_outlier_closed_form():
    n = 500
    stats = mixture_stats(MixtureSpec(n, 0.5, proportions=CASES["b"]))
    p = 0.5
    closed = (stats.p_star + (n - 2) * p * stats.p_bar ** 2) / ((n - 1) * p * stats.p_hat * stats.p_bar)
    assert predict_ellipse(stats, n).outlier == pytest.approx(closed, rel=1e-12)


def test_zero_mean_means_no_outlier():
    pred = predict_ellipse(mixture_stats(MixtureSpec(300, 0.5, proportions=CASES["a"])), 300)
    assert pred.center_shift == 0 and not pred.has_outlier


def test_ellipse_needs_complex_stats():
    with pytest.raises(InputError):
        predict_ellipse(mixture_stats(MixtureSpec(10, 0.5)), 10)


def test_containment_removes_nearest_outlier():
    pred = predict_ellipse(mixture_stats(MixtureSpec(500, 0.5, proportions=CASES["b"])), 500)
    inside = np.array([-pred.center_shift, -pred.center_shift + 0.5 * pred.a, 0.01j])
    vals = np.concatenate([inside, [0.61]])
    rep = containment_check(summarize(vals), pred)
    assert rep.n_checked == 3
    assert rep.fraction == 1.0
    assert rep.outlier_matched == 0.61
    assert rep.outlier_error == pytest.approx(abs(0.61 - pred.outlier) / pred.outlier)
    far = containment_check(summarize(np.array([0.61, 1.0, 0.0])), pred)
    assert far.fraction == 0.5
    with pytest.raises(InputError):
        containment_check(summarize(vals), pred, slack=-1)
