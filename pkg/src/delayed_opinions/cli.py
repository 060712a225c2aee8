"""Command-line front end.

Exit status: 0 success, 2 bad arguments, 3 invalid input, 4 numerical failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import continuous, delay, discrete, io, netgen, spectral
from .errors import InputError, NumericalError
from .pipelines import PIPELINES
from .reference import random_signed_stochastic

EXIT_ARGS = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    p.add_argument("--out", help="output file (directory for reproduce)")
    p.add_argument("--format", choices=("csv", "json"), help="format of the --out artifact")
    p.add_argument("--quiet", action="store_true", help="suppress standard output")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="delayed-opinions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="random signed stochastic matrix")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True, help="connection probability")
    g.add_argument("--mode", choices=("random", "complex"), default="random")
    g.add_argument("--case", choices=sorted(netgen.CASES), help="reference type proportions")
    g.add_argument("--proportions", type=_floats, help="P++,P--,P+-,P+0,P-0")
    g.add_argument("--sigma", type=float, default=1.0)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of W or -L")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--laplacian", action="store_true", help="use -L built from W")
    s.add_argument("--ordering", choices=("modulus", "real"), default="modulus")

    d = sub.add_parser("simulate-discrete", parents=[common], help="iterate the delayed map")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--tau-d", type=int, default=0)
    d.add_argument("--x0", type=_floats, help="initial state (default: uniform(-1, 1) from --seed)")
    d.add_argument("--max-steps", type=_positive_int)
    d.add_argument("--tol", type=float, default=1e-6)

    c = sub.add_parser("simulate-continuous", parents=[common], help="integrate the delayed ODE")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--tau-c", type=float, default=0.0)
    c.add_argument("--dt", type=float)
    c.add_argument("--horizon", type=float)
    c.add_argument("--x0", type=_floats, help="initial state (default: uniform(-1, 1) from --seed)")

    t = sub.add_parser("thresholds", parents=[common], help="delay margin report of -L")
    t.add_argument("--in", dest="input", required=True)

    r = sub.add_parser("rate-sweep", parents=[common], help="predicted rate versus delay")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--samples", type=int, default=64)

    b = sub.add_parser("boundary-curve", parents=[common], help="stability boundary for a delay")
    b.add_argument("--tau", type=float, required=True)
    b.add_argument("--points", type=int, default=200)

    v = sub.add_parser("verify-lemmas", parents=[common], help="layered-graph property trials")
    v.add_argument("--n", type=_positive_int, default=6)
    v.add_argument("--tau-d", type=int, default=3)
    v.add_argument("--trials", type=_positive_int, default=100)
    v.add_argument("--density", type=float, default=0.4)

    x = sub.add_parser("reproduce", parents=[common], help="run a named example pipeline")
    x.add_argument("example", choices=sorted(PIPELINES))
    return parser


def _emit(args, text):
    if not args.quiet:
        sys.stdout.write(text)


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _initial_state(args, n):
    if args.x0 is not None:
        if len(args.x0) != n:
            raise InputError(f"--x0 has {len(args.x0)} entries, matrix has {n} nodes")
        return np.asarray(args.x0)
    return np.random.default_rng(args.seed).uniform(-1.0, 1.0, n)


def cmd_generate(args):
    if args.case and args.proportions:
        raise InputError("give --case or --proportions, not both")
    props = None
    if args.mode == "complex":
        props = netgen.CASES[args.case] if args.case else args.proportions
        if props is None:
            raise InputError("complex mode needs --case or --proportions")
    elif args.case or args.proportions:
        raise InputError("--case/--proportions only apply to --mode complex")
    spec = netgen.MixtureSpec(args.n, args.p, args.sigma, props, args.seed)
    w = netgen.normalize_rows(netgen.generate(spec))
    text = io.dumps(io.matrix_to_dict(w, {"generator": args.mode, **spec.to_dict()}))
    if args.out:
        _write(args.out, text)
    else:
        _emit(args, text)


def cmd_spectrum(args):
    w = io.read_matrix(args.input)
    m = netgen.build_laplacian(w) if args.laplacian else w
    summary = spectral.eigenvalues(m, args.ordering)
    if args.out:
        if (args.format or "csv") == "csv":
            rows = np.column_stack([summary.eigenvalues.real, summary.eigenvalues.imag])
            _write(args.out, io.csv_text(["re", "im"], rows))
        else:
            _write(args.out, io.dumps(summary.to_dict()))
    _emit(args, io.dumps(summary.to_dict()))


def cmd_simulate_discrete(args):
    w = io.read_matrix(args.input)
    sys_ = discrete.DiscreteSystem.from_matrix(w, args.tau_d, _initial_state(args, w.shape[0]))
    traj = discrete.simulate(sys_, args.max_steps, args.tol)
    if args.out:
        if (args.format or "csv") == "csv":
            k = np.arange(traj.states.shape[0])[:, None]
            header = ["k"] + [f"x_{i}" for i in range(sys_.n)]
            _write(args.out, io.csv_text(header, np.hstack([k, traj.states])))
        else:
            _write(args.out, io.dumps({**traj.to_dict(), "states": traj.states}))
    _emit(args, io.dumps(traj.to_dict()))


def cmd_simulate_continuous(args):
    w = io.read_matrix(args.input)
    x0 = _initial_state(args, w.shape[0])
    system = continuous.ContinuousSystem(netgen.build_laplacian(w), args.tau_c, x0, args.dt, args.horizon)
    traj = continuous.integrate(system)
    if args.out:
        if (args.format or "csv") == "csv":
            header = ["t"] + [f"x_{i}" for i in range(system.n)]
            _write(args.out, io.csv_text(header, np.hstack([traj.times[:, None], traj.states])))
        else:
            _write(args.out, io.dumps({**traj.to_dict(), "times": traj.times, "states": traj.states}))
    _emit(args, io.dumps(traj.to_dict()))


def _neg_l_summary(path):
    return spectral.eigenvalues(netgen.build_laplacian(io.read_matrix(path)), "real")


def cmd_thresholds(args):
    summary = _neg_l_summary(args.input)
    report = delay.tau_star(summary)
    if report.accel_possible:
        try:
            report.tau_tilde = delay.tau_tilde(summary)
        except NumericalError:
            report.tau_tilde = None
    text = io.dumps(report.to_dict())
    if args.out:
        _write(args.out, text)
    _emit(args, text)


def cmd_rate_sweep(args):
    if args.samples < 8:
        raise InputError("--samples must be >= 8")
    report = delay.rate_sweep(_neg_l_summary(args.input), args.samples)
    if args.out:
        if (args.format or "csv") == "csv":
            _write(args.out, io.csv_text(["tau_c", "rate_predicted"], report.rate_curve))
        else:
            _write(args.out, io.dumps(report.to_dict()))
    summary = report.to_dict()
    summary.pop("per_eig_boundary")
    _emit(args, io.dumps(summary))


def cmd_boundary_curve(args):
    curve = delay.boundary_curve(args.tau, args.points)
    if (args.format or "csv") == "csv":
        text = io.csv_text(["theta", "r", "x", "y"], curve)
    else:
        text = io.dumps({"tau": args.tau, "theta": curve[:, 0], "r": curve[:, 1]})
    if args.out:
        _write(args.out, text)
    else:
        _emit(args, text)


def run_lemma_trials(n, tau_d, trials, seed, density=0.4):
    """Per-trial results of the layered-graph checks on random signed systems.

    Trial ``i`` draws from child ``i`` of ``SeedSequence(seed)``.
    """
    children = np.random.SeedSequence(seed).spawn(trials)
    results = []
    for child in children:
        w = random_signed_stochastic(np.random.default_rng(child), n, density)
        results.append(discrete.check_layer_lemmas(discrete.DiscreteSystem.from_matrix(w, tau_d)))
    return results


def cmd_verify_lemmas(args):
    if args.tau_d < 0:
        raise InputError("--tau-d must be non-negative")
    results = run_lemma_trials(args.n, args.tau_d, args.trials, args.seed, args.density)
    passed = sum(r.passed for r in results)
    report = {
        "n": args.n,
        "tau_d": args.tau_d,
        "trials": args.trials,
        "passed": passed,
        "arc_correspondence": sum(r.arc_correspondence for r in results),
        "cscc_count_equal": sum(r.cscc_count_equal for r in results),
        "balance_equivalent": sum(r.balance_equivalent for r in results),
    }
    if args.out:
        _write(args.out, io.dumps(report))
    _emit(args, f"{passed}/{args.trials} trials passed\n" + io.dumps(report))
    return 0 if passed == args.trials else 1


def cmd_reproduce(args):
    result = PIPELINES[args.example]()
    lines = [
        f"{'PASS' if v['passed'] else 'FAIL'}  {v['check']}  ({v['detail']})" for v in result["verdicts"]
    ]
    _emit(args, "\n".join(lines) + "\n")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        stem = args.example.replace("-", "")
        _write(os.path.join(args.out, f"{stem}.json"),
               io.dumps({"verdicts": result["verdicts"], "data": result["data"]}))
        for name, (header, rows) in result["tables"].items():
            _write(os.path.join(args.out, f"{name}.csv"), io.csv_text(header, rows))
    return 0 if all(v["passed"] for v in result["verdicts"]) else 1


COMMANDS = {
    "generate": cmd_generate,
    "spectrum": cmd_spectrum,
    "simulate-discrete": cmd_simulate_discrete,
    "simulate-continuous": cmd_simulate_continuous,
    "thresholds": cmd_thresholds,
    "rate-sweep": cmd_rate_sweep,
    "boundary-curve": cmd_boundary_curve,
    "verify-lemmas": cmd_verify_lemmas,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args) or 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
