"""Circuit ensembles: Haar, Pauli group, brickwork circuits, fixed files.

Every sampler is a pure function of (base_seed, index): per-member seeds are
derived with a splitmix64-style mixer so members can be drawn in any order
and in parallel.
"""

import math
from dataclasses import dataclass

import numpy as np

from .statevector import (
    GateProgram,
    SystemDims,
    load_programs,
    output_distribution,
    program_unitary,
)

HAAR_DENSE_CAP = 1 << 12

_PAULI = {
    0: np.eye(2, dtype=np.complex128),
    1: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    2: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    3: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def mix64(base_seed, index):
    """Mix a base seed with a member index into an independent 64-bit seed."""
    z = (int(base_seed) + 0x9E3779B97F4A7C15 * (int(index) + 1)) & (2**64 - 1)
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2**64 - 1)
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2**64 - 1)
    return z ^ (z >> 31)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str  # haar | pauli | brickwork | fixed
    dims: SystemDims
    depth: int = 0
    base_seed: int = 0
    source_path: str | None = None

    def __post_init__(self):
        if self.kind not in ("haar", "pauli", "brickwork", "fixed"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "brickwork" and self.depth < 1:
            raise ValueError("brickwork ensemble needs depth >= 1")
        if self.kind == "fixed" and not self.source_path:
            raise ValueError("fixed ensemble needs a source_path")

    def default_depth(self):
        return 5 * self.dims.n


def sample_haar_unitary(N, seed=None, rng=None):
    """Haar-random N x N unitary via Ginibre + QR with phase correction."""
    if N > HAAR_DENSE_CAP:
        raise ValueError(f"dense Haar sampling limited to N <= {HAAR_DENSE_CAP}")
    if rng is None:
        rng = _rng(seed)
    z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def haar_state_probs(N, rng, size=None):
    """Output probabilities of Haar-random circuits, all N entries at once.

    The first column of a Haar unitary is a uniformly random unit vector, so
    P(x) over all x equals the normalized squared moduli of an N-vector of
    independent complex Gaussians.  Returns shape (N,) or (size, N).
    """
    shape = (N,) if size is None else (size, N)
    z = rng.standard_normal(shape) ** 2 + rng.standard_normal(shape) ** 2
    return z / z.sum(axis=-1, keepdims=True)


def _pauli_program(dims, index):
    if not 0 <= index < 4**dims.n:
        raise IndexError(f"Pauli index {index} out of range for n={dims.n}")
    gates = []
    rem = index
    for q in range(dims.n):
        gates.append(((q,), _PAULI[rem % 4]))
        rem //= 4
    return GateProgram(dims=dims, gates=gates)


def _brickwork_program(dims, depth, rng):
    n = dims.n
    gates = []
    for layer in range(depth):
        start = layer % 2
        for a in range(start, n - 1, 2):
            block = sample_haar_unitary(4, rng=rng)
            gates.append(((a, a + 1), block))
    return GateProgram(dims=dims, gates=gates)


def sample_member(spec, index):
    """Deterministically sample the index-th member of an ensemble."""
    if spec.kind == "pauli":
        return _pauli_program(spec.dims, index)
    if spec.kind == "fixed":
        programs = load_programs(spec.source_path)
        if not 0 <= index < len(programs):
            raise IndexError(
                f"index {index} out of range for fixed ensemble of "
                f"{len(programs)} programs"
            )
        return programs[index]
    rng = _rng(mix64(spec.base_seed, index))
    if spec.kind == "haar":
        u = sample_haar_unitary(spec.dims.N, rng=rng)
        return GateProgram.from_unitary(spec.dims, u)
    return _brickwork_program(spec.dims, spec.depth, rng)


def member_probs(spec, index):
    """Ideal output distribution of one ensemble member.

    For the Haar kind this skips the dense QR: only the first unitary column
    matters, and it is distributionally a normalized Ginibre column.
    """
    if spec.kind == "haar":
        rng = _rng(mix64(spec.base_seed, index))
        return haar_state_probs(spec.dims.N, rng)
    return output_distribution(sample_member(spec, index)).probs


def pauli_ensemble_average(dims, f, x0):
    """Exact mean of f(P(x0)) over all 4^n Pauli-group circuits."""
    if dims.n > 8:
        raise ValueError(f"Pauli enumeration limited to n <= 8, got {dims.n}")
    if not 0 <= x0 < dims.N:
        raise ValueError(f"bitstring index {x0} out of range")
    func = getattr(f, "f", f)
    total = 0.0
    for index in range(4**dims.n):
        probs = output_distribution(_pauli_program(dims, index)).probs
        total += float(func(probs[x0]))
    return total / 4**dims.n


@dataclass(frozen=True)
class DesignCheckConfig:
    t: int
    mc_samples: int = 2000

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("design order t must be >= 1")
        if self.mc_samples < 20:
            raise ValueError("need at least 20 Monte-Carlo samples")


@dataclass(frozen=True)
class DesignCheckReport:
    discrepancy: float
    std_error: float

    @property
    def z_score(self):
        if self.std_error == 0.0:
            return math.inf if self.discrepancy else 0.0
        return self.discrepancy / self.std_error


def _moment_tensor(u, t):
    a = u
    for _ in range(t - 1):
        a = np.kron(a, u)
    udag = u.conj().T
    b = udag
    for _ in range(t - 1):
        b = np.kron(b, udag)
    return np.kron(a, b)


def _mc_moment_tensor(dims, t, samples, rng, unitary_source):
    """Batch-mean estimate of E[U^t (x) Udag^t]; returns (mean, per-entry SE)."""
    n_batches = 10
    per = max(1, samples // n_batches)
    dim = dims.N ** (2 * t)
    batch_means = np.zeros((n_batches, dim, dim), dtype=np.complex128)
    for b in range(n_batches):
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for _ in range(per):
            acc += _moment_tensor(unitary_source(rng), t)
        batch_means[b] = acc / per
    mean = batch_means.mean(axis=0)
    se = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    return mean, se


def haar_first_moment_tensor(N):
    """Exact Haar value of E[U (x) U^dag]: the swap operator over N."""
    swap = np.zeros((N * N, N * N), dtype=np.complex128)
    for i in range(N):
        for k in range(N):
            swap[i * N + k, k * N + i] = 1.0
    return swap / N


def design_moment_discrepancy(spec, cfg, seed=0, haar_reference="mc"):
    """Max-entry gap between an ensemble's t-th moment tensor and Haar's.

    The Pauli side is an exact 4^n-term sum; everything else is Monte-Carlo.
    The Haar reference is Monte-Carlo with the configured sample count, or
    the exact swap-operator value when haar_reference="exact" (t = 1 only).
    """
    dims = spec.dims
    if dims.N ** (2 * cfg.t) > 1 << 20:
        raise ValueError(
            f"moment tensor dimension N^(2t) = {dims.N ** (2 * cfg.t)} "
            "exceeds the 2^20 cap"
        )
    rng = _rng(mix64(seed, 0xD351))
    if haar_reference == "exact":
        if cfg.t != 1:
            raise ValueError("exact Haar reference only available for t = 1")
        haar_mean = haar_first_moment_tensor(dims.N)
        haar_se = np.zeros_like(haar_mean, dtype=np.float64)
    elif haar_reference == "mc":
        haar_mean, haar_se = _mc_moment_tensor(
            dims, cfg.t, cfg.mc_samples, rng,
            lambda r: sample_haar_unitary(dims.N, rng=r),
        )
    else:
        raise ValueError(f"unknown haar_reference {haar_reference!r}")
    if spec.kind == "pauli":
        dim = dims.N ** (2 * cfg.t)
        ens_mean = np.zeros((dim, dim), dtype=np.complex128)
        count = 4**dims.n
        for index in range(count):
            u = program_unitary(_pauli_program(dims, index))
            ens_mean += _moment_tensor(u, cfg.t)
        ens_mean /= count
        ens_se = np.zeros_like(haar_se)
    else:
        ens_rng = _rng(mix64(spec.base_seed, 0xE5EB))
        if spec.kind == "haar":
            source = lambda r: sample_haar_unitary(dims.N, rng=r)
        elif spec.kind == "brickwork":
            source = lambda r: program_unitary(
                _brickwork_program(dims, spec.depth, r)
            )
        else:
            programs = load_programs(spec.source_path)
            source = lambda r: program_unitary(
                programs[r.integers(len(programs))]
            )
        ens_mean, ens_se = _mc_moment_tensor(
            dims, cfg.t, cfg.mc_samples, ens_rng, source
        )
    gap = np.abs(ens_mean - haar_mean)
    flat = int(np.argmax(gap))
    se = float(np.sqrt(haar_se.flat[flat] ** 2 + ens_se.flat[flat] ** 2))
    return DesignCheckReport(discrepancy=float(gap.flat[flat]), std_error=se)
