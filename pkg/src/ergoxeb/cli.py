"""Command-line interface.

Exit codes: 0 success, 1 invalid flags or file errors, 2 benchmark verdict
violated under --strict.
"""

import argparse
import json
import sys

from . import __version__, analytic
from .estimators import (
    SchemeFunction,
    ZeroProbabilityError,
    deviation_of_ergodicity,
    linear_xeb,
    log_xeb,
    parse_scheme,
)
from .harness import ScanConfig, run_ergodicity_scan, write_scan_result
from .noise import NoiseModel, read_probabilities, read_samples

NOISE_KINDS = ("noiseless", "depolarizing", "completely-noisy")
ENSEMBLE_KINDS = ("haar", "brickwork", "pauli", "fixed")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_qubits(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return (int(text),)


def _build_parser():
    parser = _Parser(
        prog="ergoxeb",
        description=(
            "Ergodicity-based cross-entropy benchmarking for random "
            "quantum circuits."
        ),
    )
    parser.add_argument("--version", action="version",
                        version=f"ergoxeb {__version__}")
    parser.add_argument("--seed", type=int, default=0,
                        help="base RNG seed (default 0)")
    parser.add_argument("--out-dir", default=".",
                        help="directory for result files")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="printed-report format for the xeb subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser(
        "scan",
        help="run an ergodicity scan over qubit counts and instances",
        description=(
            "Schemes: neglog, plogp, monomial<i> (f = N^i p^i), "
            "normalized-monomial<i>. Ensembles: haar, brickwork, pauli, "
            "fixed. Noise: noiseless, depolarizing (needs --fidelity), "
            "completely-noisy."
        ),
    )
    scan.add_argument("--ensemble", default="haar", choices=ENSEMBLE_KINDS)
    scan.add_argument("--qubits", required=True,
                      help="qubit count or range, e.g. 8 or 6..10")
    scan.add_argument("--instances", type=int, default=10)
    scan.add_argument("--scheme", default="neglog",
                      help="neglog | plogp | monomial<i> | "
                           "normalized-monomial<i>")
    scan.add_argument("--alpha", type=float, default=10.0)
    scan.add_argument("--noise", default="noiseless", choices=NOISE_KINDS)
    scan.add_argument("--fidelity", type=float, default=None,
                      help="fidelity F for depolarizing noise")
    scan.add_argument("--samples", type=int, default=0,
                      help="bitstring samples per instance "
                           "(0 = exact correlation)")
    scan.add_argument("--depth", type=int, default=0,
                      help="brickwork layer count (default 5n)")
    scan.add_argument("--fixed-file", default=None,
                      help="gate-program JSON for the fixed ensemble")
    scan.add_argument("--haar-mean-mode", default="exact",
                      choices=("exact", "porter_thomas"))
    scan.add_argument("--strict", action="store_true",
                      help="exit 2 if any instance violates ergodicity")

    xeb = sub.add_parser(
        "xeb",
        help="analyze a probability file and a sample file",
    )
    xeb.add_argument("--probs", required=True,
                     help="CSV bitstring,probability covering all N rows")
    xeb.add_argument("--samples", required=True,
                     help="text file, one measured bitstring per line")
    xeb.add_argument("--alpha", type=float, default=10.0)

    oracle = sub.add_parser(
        "oracle",
        help="print analytic Haar moment/covariance values",
    )
    group = oracle.add_mutually_exclusive_group(required=True)
    group.add_argument("--moment", nargs=3, metavar=("Q1", "Q2", "N"),
                       help="joint moment E[P(x)^q1 P(y)^q2]")
    group.add_argument("--covariance", nargs=3, metavar=("Q1", "Q2", "N"),
                       help="Cov(P(x)^q1, P(y)^q2)")
    group.add_argument("--plogp-cov", type=int, metavar="N",
                       help="Cov(p ln p) closed form")
    group.add_argument("--haar-mean", nargs=2, metavar=("SCHEME", "N"),
                       help="exact ensemble mean of a scheme function")
    return parser


def _make_noise(args):
    if args.noise == "noiseless":
        return NoiseModel.noiseless()
    if args.noise == "completely-noisy":
        return NoiseModel.completely_noisy()
    if args.fidelity is None:
        raise ValueError("depolarizing noise requires --fidelity")
    return NoiseModel.depolarizing(args.fidelity)


def _cmd_scan(args):
    cfg = ScanConfig(
        ensemble=args.ensemble,
        n_range=_parse_qubits(args.qubits),
        instances=args.instances,
        scheme=parse_scheme(args.scheme),
        alpha=args.alpha,
        T=args.samples,
        noise=_make_noise(args),
        base_seed=args.seed,
        depth=args.depth,
        source_path=args.fixed_file,
        mean_mode=args.haar_mean_mode,
    )
    result = run_ergodicity_scan(cfg)
    csv_path, json_path = write_scan_result(result, args.out_dir)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    violated = any(r["verdict"] == "violated" for r in result.rows)
    if args.strict and violated:
        print("ergodicity violated in at least one instance", file=sys.stderr)
        return 2
    return 0


def _cmd_xeb(args):
    P = read_probabilities(args.probs)
    samples = read_samples(args.samples, dims=P.dims)
    lin = linear_xeb(P, samples)
    report = {
        "n": P.dims.n,
        "T": samples.T,
        "f_xeb": lin.F_hat,
        "f_xeb_se": lin.std_error,
    }
    mono = deviation_of_ergodicity(
        P, samples, SchemeFunction.monomial(2), args.alpha
    )
    report["de_monomial2"] = mono.deviation
    report["de_monomial2_se"] = mono.std_error
    try:
        report["log_xeb"] = log_xeb(P, samples)
        plogp = deviation_of_ergodicity(
            P, samples, SchemeFunction.plogp(), args.alpha
        )
        report["de_plogp"] = plogp.deviation
        report["de_plogp_se"] = plogp.std_error
    except ZeroProbabilityError as exc:
        report["log_xeb_error"] = str(exc)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for key, val in report.items():
            print(f"{key},{val:.12g}" if isinstance(val, float)
                  else f"{key},{val}")
    return 0


def _cmd_oracle(args):
    if args.moment:
        q1, q2, n = args.moment
        value = analytic.haar_joint_moment(float(q1), float(q2), int(n))
    elif args.covariance:
        q1, q2, n = args.covariance
        value = analytic.haar_covariance(float(q1), float(q2), int(n))
    elif args.plogp_cov:
        value = analytic.plogp_covariance(args.plogp_cov)
    else:
        scheme_name, n = args.haar_mean
        scheme = parse_scheme(scheme_name)
        value = scheme.haar_mean(int(n), mode="exact")
    print(format(value, ".17g"))
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "xeb":
            return _cmd_xeb(args)
        return _cmd_oracle(args)
    except (ValueError, OSError, IndexError) as exc:
        print(f"ergoxeb: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
