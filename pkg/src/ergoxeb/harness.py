"""Experiment drivers composing simulation, noise and estimation.

Results are plain rows (lists of dicts) written as CSV plus a JSON summary;
file names embed a hash of the generating configuration, and identical
configurations produce byte-identical files.
"""

import hashlib
import json
import math
import os
import statistics
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .ensembles import EnsembleSpec, haar_state_probs, member_probs, mix64
from .estimators import (
    SchemeFunction,
    chebyshev_violation_rate,
    deviation_of_ergodicity,
    deviation_of_ergodicity_exact,
    fidelity_from_de_depolarizing,
)
from .noise import (
    NoiseModel,
    experimental_distribution,
    read_probabilities,
    read_samples,
    sample_bitstrings,
)
from .statevector import OutputDistribution, SystemDims

N_BATCHES = 10


@dataclass(frozen=True)
class ScanConfig:
    ensemble: str = "haar"
    n_range: tuple = (8,)
    instances: int = 10
    scheme: SchemeFunction = field(default_factory=SchemeFunction.neglog)
    alpha: float = 10.0
    T: int = 0  # 0 = exact correlation from P and Q, no sampling
    noise: NoiseModel = field(default_factory=NoiseModel.noiseless)
    base_seed: int = 0
    depth: int = 0  # brickwork only; 0 = default 5n
    source_path: str | None = None
    mean_mode: str = "exact"

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("need at least one instance per qubit count")
        if not self.n_range:
            raise ValueError("empty qubit range")

    def to_dict(self):
        d = {
            "ensemble": self.ensemble,
            "n_range": list(self.n_range),
            "instances": self.instances,
            "scheme": self.scheme.name,
            "alpha": self.alpha,
            "T": self.T,
            "noise": self.noise.kind,
            "fidelity": self.noise.F,
            "base_seed": self.base_seed,
            "depth": self.depth,
            "source_path": self.source_path,
            "mean_mode": self.mean_mode,
        }
        return d


@dataclass
class ScanResult:
    config: dict
    rows: list
    summary: list


def _instance_fidelity(scheme, report):
    if scheme.kind == "monomial" and scheme.degree >= 2:
        est = fidelity_from_de_depolarizing(
            report.deviation, scheme.degree, report.std_error
        )
        return est.F_hat
    if scheme.kind == "normalized_monomial":
        return 1.0 - report.deviation
    return None


def run_ergodicity_scan(cfg):
    """One ergodicity report per (qubit count, circuit instance)."""
    rows = []
    summary = []
    for n in cfg.n_range:
        dims = SystemDims(n)
        depth = cfg.depth or 5 * n
        spec = EnsembleSpec(
            kind=cfg.ensemble,
            dims=dims,
            depth=depth if cfg.ensemble == "brickwork" else 0,
            base_seed=mix64(cfg.base_seed, n),
            source_path=cfg.source_path,
        )
        deviations = []
        violations = 0
        for inst in range(cfg.instances):
            P = OutputDistribution(dims, member_probs(spec, inst))
            Q = experimental_distribution(P, cfg.noise)
            if cfg.T == 0:
                report = deviation_of_ergodicity_exact(
                    P, Q, cfg.scheme, cfg.alpha, cfg.mean_mode
                )
            else:
                samples = sample_bitstrings(
                    Q, cfg.T, seed=mix64(spec.base_seed, 10_000 + inst)
                )
                report = deviation_of_ergodicity(
                    P, samples, cfg.scheme, cfg.alpha, cfg.mean_mode
                )
            f_hat = _instance_fidelity(cfg.scheme, report)
            deviations.append(report.deviation)
            violations += report.verdict == "violated"
            row = report.to_dict()
            row["instance"] = inst
            row["f_hat"] = f_hat
            rows.append(row)
        sigma = cfg.scheme.sigma(dims.N, cfg.mean_mode)
        summary.append({
            "n": n,
            "instances": cfg.instances,
            "median_deviation": statistics.median(deviations),
            "violation_rate": violations / cfg.instances,
            "sigma_over_sqrt_n": sigma / math.sqrt(dims.N),
            "threshold": cfg.alpha * sigma / math.sqrt(dims.N),
        })
    return ScanResult(config=cfg.to_dict(), rows=rows, summary=summary)


def scan_violation_rate(result):
    """Chebyshev violation statistics over all rows of an exact scan."""
    class _R:  # row dicts quack like reports for the rate counter
        def __init__(self, verdict):
            self.verdict = verdict

    return chebyshev_violation_rate([_R(r["verdict"]) for r in result.rows])


# ---------------------------------------------------------------------------
# Monte-Carlo verification drivers
# ---------------------------------------------------------------------------

def _batched(values, reducer):
    """Mean and batch-means standard error of reducer(batch) over 10 batches."""
    batches = np.array_split(values, N_BATCHES)
    stats = np.array([reducer(b) for b in batches], dtype=np.float64)
    mean = float(stats.mean())
    se = float(stats.std(ddof=1) / math.sqrt(len(stats)))
    return mean, se


def run_moment_scaling(n_range, mc_samples=100_000, base_seed=0):
    """Monte-Carlo vs analytic E[P], E[P(x)P(y)] and Cov at each n."""
    rows = []
    for n in n_range:
        if n > 10:
            raise ValueError("moment scaling limited to n <= 10")
        N = 1 << n
        rng = np.random.Generator(np.random.PCG64(mix64(base_seed, n)))
        probs = haar_state_probs(N, rng, size=mc_samples)
        u, v = probs[:, 0], probs[:, 1]
        mean_mc, mean_se = _batched(u, np.mean)
        joint_mc, joint_se = _batched(
            np.stack([u, v], axis=1),
            lambda b: float(np.mean(b[:, 0] * b[:, 1])),
        )
        cov_mc, cov_se = _batched(
            np.stack([u, v], axis=1),
            lambda b: float(np.mean(b[:, 0] * b[:, 1])
                            - np.mean(b[:, 0]) * np.mean(b[:, 1])),
        )
        rows.append({
            "n": n,
            "N": N,
            "mean_analytic": 1.0 / N,
            "mean_mc": mean_mc,
            "mean_se": mean_se,
            "joint_analytic": analytic.haar_joint_moment(1.0, 1.0, N),
            "joint_mc": joint_mc,
            "joint_se": joint_se,
            "cov_analytic": analytic.haar_covariance(1.0, 1.0, N),
            "cov_mc": cov_mc,
            "cov_se": cov_se,
        })
    return rows


def run_covariance_verification(N, queries, mc_samples=1_000_000,
                                base_seed=0):
    """MC covariance vs the Gamma/polygamma closed forms, with z-scores.

    ``queries`` mixes (q1, q2) pairs and the string "plogp".
    """
    if N > 256:
        raise ValueError("covariance verification limited to N <= 256")
    rng = np.random.Generator(np.random.PCG64(mix64(base_seed, N)))
    probs = haar_state_probs(N, rng, size=mc_samples)
    u, v = probs[:, 0], probs[:, 1]
    rows = []
    for query in queries:
        if query == "plogp":
            a, b = u * np.log(u), v * np.log(v)
            expected = analytic.plogp_covariance(N)
            q1 = q2 = "plogp"
        else:
            q1, q2 = query
            a, b = u**q1, v**q2
            expected = analytic.haar_covariance(q1, q2, N)
        cov_mc, cov_se = _batched(
            np.stack([a, b], axis=1),
            lambda x: float(np.mean(x[:, 0] * x[:, 1])
                            - np.mean(x[:, 0]) * np.mean(x[:, 1])),
        )
        rows.append({
            "N": N,
            "q1": q1,
            "q2": q2,
            "cov_analytic": expected,
            "cov_mc": cov_mc,
            "cov_se": cov_se,
            "z": (cov_mc - expected) / cov_se if cov_se else math.inf,
        })
    return rows


def run_normalized_de(n_range, degrees, noise=None, T=50_000, base_seed=0,
                      alpha=10.0, ingest=None):
    """Normalized deviation of ergodicity per (n, degree).

    Simulated mode draws Haar instances and samples T bitstrings from the
    noisy distribution.  Ingest mode takes ``ingest`` as a list of
    (probability_csv, sample_file) pairs, one per entry of ``n_range``.
    """
    for i in degrees:
        if i < 2:
            raise ValueError("normalized deviation needs degrees >= 2")
    rows = []
    for pos, n in enumerate(n_range):
        if ingest is not None:
            probs_path, samples_path = ingest[pos]
            P = read_probabilities(probs_path)
            if P.dims.n != n:
                raise ValueError(
                    f"{probs_path}: file has n={P.dims.n}, expected {n}"
                )
            samples = read_samples(samples_path, dims=P.dims)
        else:
            dims = SystemDims(n)
            rng = np.random.Generator(
                np.random.PCG64(mix64(base_seed, n))
            )
            P = OutputDistribution(dims, haar_state_probs(dims.N, rng))
            Q = experimental_distribution(P, noise or NoiseModel.noiseless())
            samples = sample_bitstrings(Q, T, seed=mix64(base_seed, 777 + n))
        for i in degrees:
            scheme = SchemeFunction.normalized_monomial(i)
            report = deviation_of_ergodicity(P, samples, scheme, alpha)
            rows.append({
                "n": n,
                "degree": i,
                "T": samples.T,
                "deviation": report.deviation,
                "std_error": report.std_error,
                "f_hat": 1.0 - report.deviation,
                "verdict": report.verdict,
            })
    return rows


def run_depolarizing_recovery(fidelities, degrees, n=10, T=100_000,
                              instances=1000, base_seed=0):
    """Recover depolarizing fidelities from pooled deviation of ergodicity.

    The T-sample budget is spread over many circuit instances and the
    correlation estimates are pooled before inverting DE = (1-F)(i-1)!(i-1):
    a single instance's self-correlation fluctuates by O(sigma_f/sqrt(N)),
    which pooling averages away.  Reported SE comes from the scatter of
    per-instance means (it covers both sampling and ensemble noise).
    """
    per = max(1, T // instances)
    rows = []
    for F in fidelities:
        noise = NoiseModel.depolarizing(F)
        inst_means = {i: [] for i in degrees}
        for inst in range(instances):
            dims = SystemDims(n)
            rng = np.random.Generator(
                np.random.PCG64(mix64(base_seed, 31_000 + inst))
            )
            P = OutputDistribution(dims, haar_state_probs(dims.N, rng))
            Q = experimental_distribution(P, noise)
            samples = sample_bitstrings(
                Q, per, seed=mix64(base_seed, 62_000 + inst)
            )
            pvals = P.probs[samples.bitstrings]
            for i in degrees:
                g = float(dims.N) ** (i - 1) * pvals ** (i - 1)
                inst_means[i].append(float(np.mean(g)))
        for i in degrees:
            scheme = SchemeFunction.monomial(i)
            means = np.array(inst_means[i])
            pooled = float(means.mean())
            se = float(means.std(ddof=1) / math.sqrt(len(means)))
            mean_ref = scheme.haar_mean(1 << n, "exact")
            deviation = abs(mean_ref - pooled)
            est = fidelity_from_de_depolarizing(deviation, i, se)
            rows.append({
                "fidelity": F,
                "degree": i,
                "n": n,
                "T": per * instances,
                "instances": instances,
                "c_f_pooled": pooled,
                "std_error": se,
                "deviation": deviation,
                "f_hat": est.F_hat,
                "f_hat_se": est.std_error,
            })
    return rows


# ---------------------------------------------------------------------------
# result emission
# ---------------------------------------------------------------------------

def config_hash(config):
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _fmt_cell(value):
    if isinstance(value, float):
        return format(value, ".12g")
    if value is None:
        return ""
    return str(value)


def write_rows_csv(rows, path):
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(row[k]) for k in fields) + "\n")


def write_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_scan_result(result, out_dir, prefix="scan"):
    """Write rows CSV and summary JSON; returns the two paths."""
    os.makedirs(out_dir, exist_ok=True)
    tag = config_hash(result.config)
    csv_path = os.path.join(out_dir, f"{prefix}_{tag}.csv")
    json_path = os.path.join(out_dir, f"{prefix}_{tag}_summary.json")
    write_rows_csv(result.rows, csv_path)
    write_json(
        {"config": result.config, "summary": result.summary}, json_path
    )
    return csv_path, json_path
