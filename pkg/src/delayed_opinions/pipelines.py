"""Named end-to-end experiments used by ``delayed-opinions reproduce``.

Each pipeline returns a dict with a ``verdicts`` list of
``{"check": str, "passed": bool, "detail": str}`` entries, a ``data`` dict
for JSON output and a ``tables`` dict mapping a file stem to
``(header, rows)`` for optional CSV output.
"""

import math

import numpy as np

from . import continuous, delay, discrete, graph, netgen, spectral
from .reference import LAYERED_DEMO, LAYERED_DEMO_DELAY, X0_FIVE, five_node_networks


def _verdict(check, passed, detail):
    return {"check": check, "passed": bool(passed), "detail": detail}


def _random_w(n, p, seed, proportions=None):
    spec = netgen.MixtureSpec(n, p, proportions=proportions, seed=seed)
    return spec, netgen.normalize_rows(netgen.generate(spec))


def layered_demo():
    """Closed/open component counts and balance in W and in its layered system."""
    sys = discrete.DiscreteSystem.from_matrix(LAYERED_DEMO, LAYERED_DEMO_DELAY)
    a = discrete.build_augmented(sys)
    sw, sa = graph.scc_decompose(sys.w), graph.scc_decompose(a)
    bw = graph.is_structurally_balanced(sys.w).balanced
    ba = graph.is_structurally_balanced(a).balanced
    lemmas = discrete.check_layer_lemmas(sys)
    data = {
        "W": {"closed": sw.n_closed, "open": sw.n_open, "balanced": bw},
        "A": {"closed": sa.n_closed, "open": sa.n_open, "balanced": ba},
    }
    verdicts = [
        _verdict("one closed and one open component in W and A",
                 (sw.n_closed, sw.n_open, sa.n_closed, sa.n_open) == (1, 1, 1, 1),
                 f"W {sw.n_closed}/{sw.n_open}, A {sa.n_closed}/{sa.n_open}"),
        _verdict("both unbalanced", not bw and not ba, f"W balanced={bw}, A balanced={ba}"),
        _verdict("layer lemmas", lemmas.passed, str(lemmas)),
    ]
    return {"verdicts": verdicts, "data": data, "tables": {}}


def five_node_discrete(max_steps=5000, tol=1e-6):
    """Discrete runs on the trust-only, mistrust-only and mixed five-node networks."""
    expected = {"W_t": "not_converged", "W_m": "not_converged", "W_tm": "converged_zero"}
    verdicts, data, tables = [], {}, {}
    for name, w in five_node_networks().items():
        sys = discrete.DiscreteSystem.from_matrix(w, 0, X0_FIVE)
        traj = discrete.simulate(sys, max_steps=max_steps, tol=tol)
        data[name] = traj.to_dict()
        ok = traj.classification == expected[name]
        if name == "W_tm":
            ok = ok and traj.steps_run <= 500
        verdicts.append(_verdict(
            f"{name} {expected[name]}", ok,
            f"{traj.classification} after {traj.steps_run} steps",
        ))
        steps = np.arange(traj.states.shape[0])[:, None]
        tables[f"example2_{name}"] = (
            ["k"] + [f"x_{i}" for i in range(5)],
            np.hstack([steps, traj.states]),
        )
    return {"verdicts": verdicts, "data": data, "tables": tables}


def five_node_delay_margin(margin=0.1):
    """Delay margin of the mixed five-node network, bracketed by simulation."""
    neg_l = netgen.build_laplacian(five_node_networks()["W_tm"])
    summary = spectral.eigenvalues(neg_l)
    report = delay.tau_star(summary)
    ts = report.tau_star
    below = continuous.integrate(continuous.ContinuousSystem(neg_l, (1 - margin) * ts, X0_FIVE))
    above = continuous.integrate(
        continuous.ContinuousSystem(neg_l, (1 + margin) * ts, X0_FIVE, horizon=400.0)
    )
    verdicts = [
        _verdict("tau* in (0.2, 1)", 0.2 < ts < 1.0, f"tau* = {ts:.6f}"),
        _verdict(f"converges at {1 - margin:.2f} tau*", below.classification == "converged_zero",
                 below.classification),
        _verdict(f"diverges at {1 + margin:.2f} tau*", above.classification == "diverged",
                 above.classification),
    ]
    return {"verdicts": verdicts, "data": report.to_dict(), "tables": {}}


def five_node_continuous(horizon=200.0, fast_delay=0.24):
    """Continuous runs on the five-node networks at delays 0, 0.2, 0.24 and 1."""
    verdicts, data, tables = [], {}, {}
    for name, w in five_node_networks().items():
        neg_l = netgen.build_laplacian(w)
        data[name] = {}
        for tau in (0.0, 0.2, fast_delay, 1.0):
            system = continuous.ContinuousSystem(neg_l, tau, X0_FIVE, horizon=horizon)
            traj = continuous.integrate(system)
            data[name][f"{tau:g}"] = traj.to_dict()
            if name == "W_tm" and tau in (0.2, 1.0):
                tables[f"example4_{name}_tau{tau:g}"] = (
                    ["t"] + [f"x_{i}" for i in range(5)],
                    np.hstack([traj.times[:, None], traj.states]),
                )
    tm = data["W_tm"]
    r0 = tm["0"]["measured_rate"]
    rf = tm[f"{fast_delay:g}"]["measured_rate"]
    verdicts.append(_verdict("W_tm converged_zero at tau_c = 0.2",
                             tm["0.2"]["classification"] == "converged_zero",
                             tm["0.2"]["classification"]))
    verdicts.append(_verdict("W_tm diverged at tau_c = 1",
                             tm["1"]["classification"] == "diverged", tm["1"]["classification"]))
    verdicts.append(_verdict(
        f"W_tm faster at tau_c = {fast_delay:g} than at 0",
        r0 is not None and rf is not None and rf > r0,
        f"rate {rf} vs {r0}",
    ))
    for name in ("W_t", "W_m"):
        verdicts.append(_verdict(
            f"{name} diverged at tau_c = 1",
            data[name]["1"]["classification"] == "diverged",
            data[name]["1"]["classification"],
        ))
    return {"verdicts": verdicts, "data": data, "tables": tables}


def discrete_rates_and_spectra(n=100, p=0.5, seed=0, delays=(0, 1, 2, 4, 8)):
    """Discrete rates on a random mixture versus delay, plus the complex cases."""
    spec, w = _random_w(n, p, seed)
    sys0 = discrete.DiscreteSystem.from_matrix(w, 0)
    rates = [discrete.discrete_rate(discrete.DiscreteSystem(sys0.w_hat, sys0.w_tilde, d, sys0.x0))
             for d in delays]
    data = {"random": {"delays": list(delays), "rates": rates}}
    verdicts = [_verdict("rate decreases with delay",
                         all(a > b for a, b in zip(rates, rates[1:])),
                         ", ".join(f"{r:.6f}" for r in rates))]
    case_rates = {}
    for case, props in netgen.CASES.items():
        cspec, cw = _random_w(n, p, seed, props)
        pred = spectral.predict_ellipse(netgen.mixture_stats(cspec), n)
        summary = spectral.eigenvalues(cw)
        report = spectral.containment_check(summary, pred)
        case_rates[case] = -math.log(summary.spectral_radius)
        data[f"case_{case}"] = {
            "inside_fraction": report.fraction,
            "predicted_outlier": pred.outlier,
            "matched_outlier": report.outlier_matched,
            "rate": case_rates[case],
        }
        verdicts.append(_verdict(f"case {case} bulk inside ellipse", report.fraction >= 0.99,
                                 f"{report.fraction:.4f}"))
    rand_rate = -math.log(spectral.eigenvalues(w).spectral_radius)
    data["random"]["rate_tau0"] = rand_rate
    verdicts.append(_verdict(
        "random mixture converges fastest",
        all(rand_rate > r for r in case_rates.values()),
        f"random {rand_rate:.4f}, cases " + ", ".join(f"{k}={v:.4f}" for k, v in case_rates.items()),
    ))
    return {"verdicts": verdicts, "data": data, "tables": {}}


def continuous_rate_curves(n=100, p=0.5, seed=0, samples=64):
    """Continuous thresholds and rate-versus-delay curves for the five constructions."""
    verdicts, data, tables = [], {}, {}
    constructions = {"random": None, **{f"case_{c}": v for c, v in netgen.CASES.items()}}
    for label, props in constructions.items():
        spec, w = _random_w(n, p, seed, props)
        summary = spectral.eigenvalues(netgen.build_laplacian(w))
        report = delay.rate_sweep(summary, samples)
        stats = netgen.mixture_stats(spec)
        predicted = (delay.tau_star_complex(spectral.predict_ellipse(stats, n)) if props
                     else delay.tau_star_random(stats, n))
        curve = report.rate_curve
        data[label] = {
            "tau_star": report.tau_star,
            "tau_star_predicted": predicted,
            "tau_tilde": report.tau_tilde,
            "r0": report.r0,
            "max_rate": float(curve[:, 1].max()),
            "accel_possible": report.accel_possible,
        }
        tables[f"example6_{label}"] = (["tau_c", "rate_predicted"], curve)
        verdicts.append(_verdict(
            f"{label}: rate rises above R0 then falls",
            report.accel_possible and curve[:, 1].max() > report.r0 and curve[-1, 1] < report.r0,
            f"R0 {report.r0:.4f}, max {curve[:, 1].max():.4f}, tau~ {report.tau_tilde}",
        ))
        verdicts.append(_verdict(
            f"{label}: predicted tau* within 10% of empirical",
            abs(predicted - report.tau_star) <= 0.1 * report.tau_star,
            f"{predicted:.4f} vs {report.tau_star:.4f}",
        ))
    return {"verdicts": verdicts, "data": data, "tables": tables}


PIPELINES = {
    "example-1": layered_demo,
    "example-2": five_node_discrete,
    "example-3": five_node_delay_margin,
    "example-4": five_node_continuous,
    "example-5": discrete_rates_and_spectra,
    "example-6": continuous_rate_curves,
}
