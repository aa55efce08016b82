"""Dense statevector simulation of gate programs.

Bit convention: a bitstring x = (x_{n-1}, ..., x_0) maps to the integer
j = sum_k x_k 2^k, i.e. the rightmost character of the written string is the
least significant bit.  All file formats in this package use this convention.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import _accel

DEFAULT_QUBIT_CAP = 24
UNITARY_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class SystemDims:
    """Qubit count n and Hilbert dimension N = 2**n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be >= 1, got {self.n}")
        if self.n > DEFAULT_QUBIT_CAP:
            raise ValueError(
                f"qubit count {self.n} exceeds cap {DEFAULT_QUBIT_CAP}"
            )

    @property
    def N(self):
        return 1 << self.n


@dataclass
class PureState:
    """Normalized complex amplitude vector over computational basis states."""

    dims: SystemDims
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.dims.N,):
            raise ValueError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"expected ({self.dims.N},)"
            )
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 = {norm!r} deviates from 1")

    @classmethod
    def zero(cls, dims):
        amps = np.zeros(dims.N, dtype=np.complex128)
        amps[0] = 1.0
        return cls(dims, amps)


@dataclass
class OutputDistribution:
    """Probabilities P(x) = |<x|U|0^n>|^2 over all N bitstrings."""

    dims: SystemDims
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.shape != (self.dims.N,):
            raise ValueError(
                f"probability vector has shape {self.probs.shape}, "
                f"expected ({self.dims.N},)"
            )
        if np.any(self.probs < -1e-15):
            raise ValueError("probability entries below -1e-15")
        # Clamp tiny negative rounding noise, renormalize if needed.
        np.clip(self.probs, 0.0, None, out=self.probs)
        total = float(self.probs.sum())
        if abs(total - 1.0) > 1e-12:
            if abs(total - 1.0) > NORM_TOL:
                raise ValueError(f"probabilities sum to {total!r}, not 1")
            self.probs /= total


def _check_unitary(matrix, tol=UNITARY_TOL):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"gate block must be square, got shape {matrix.shape}")
    m = matrix.shape[0]
    err = np.max(np.abs(matrix.conj().T @ matrix - np.eye(m)))
    if err > tol:
        raise ValueError(f"gate block non-unitary: max |U^dag U - I| = {err:g}")
    return matrix


@dataclass
class GateProgram:
    """A circuit: either an ordered gate list or one full dense unitary.

    Each gate is (targets, block) where ``targets`` lists distinct qubit
    indices and ``block`` is a dense unitary of dimension 2**len(targets).
    Bit j of a block's row/column index is the value of qubit targets[j].
    """

    dims: SystemDims
    gates: list = field(default_factory=list)
    unitary: np.ndarray | None = None

    def __post_init__(self):
        checked = []
        for targets, block in self.gates:
            targets = tuple(int(t) for t in targets)
            if len(set(targets)) != len(targets):
                raise ValueError(f"duplicate target qubits: {targets}")
            for t in targets:
                if not 0 <= t < self.dims.n:
                    raise ValueError(
                        f"target qubit {t} out of range for n={self.dims.n}"
                    )
            block = _check_unitary(block)
            if block.shape[0] != 1 << len(targets):
                raise ValueError(
                    f"block dimension {block.shape[0]} does not match "
                    f"{len(targets)} target qubits"
                )
            checked.append((targets, block))
        self.gates = checked
        if self.unitary is not None:
            self.unitary = _check_unitary(self.unitary, tol=1e-10)
            if self.unitary.shape[0] != self.dims.N:
                raise ValueError(
                    f"full unitary dimension {self.unitary.shape[0]} != N="
                    f"{self.dims.N}"
                )

    @classmethod
    def from_unitary(cls, dims, unitary):
        return cls(dims=dims, gates=[], unitary=unitary)


def apply_block(state, targets, block):
    """Apply a dense unitary block to the target qubits of ``state``."""
    dims = state.dims
    targets = tuple(int(t) for t in targets)
    for t in targets:
        if not 0 <= t < dims.n:
            raise ValueError(f"target qubit {t} out of range for n={dims.n}")
    amps = state.amplitudes.copy()
    _apply_block_inplace(amps, dims.n, targets, np.asarray(block, np.complex128))
    return PureState(dims, amps)


def _group_indices(n, targets):
    """Flat index array (num_groups, 2**k) enumerating the target subspace.

    Column m of each row is the basis state with target-qubit bits set to the
    bits of m (bit j of m on qubit targets[j]) and the remaining qubits fixed
    to the row's pattern.
    """
    k = len(targets)
    n_rest = n - k
    rest = [q for q in range(n) if q not in targets]
    base = np.zeros(1 << n_rest, dtype=np.int64)
    for pos, q in enumerate(rest):
        bit = (np.arange(1 << n_rest, dtype=np.int64) >> pos) & 1
        base |= bit << q
    offs = np.zeros(1 << k, dtype=np.int64)
    for j, q in enumerate(targets):
        bit = (np.arange(1 << k, dtype=np.int64) >> j) & 1
        offs |= bit << q
    return base[:, None] | offs[None, :]


def _apply_block_inplace(amps, n, targets, block):
    idx = _group_indices(n, targets)
    _accel.apply_block_groups(amps, idx, block)


def output_distribution(program):
    """Ideal output distribution of ``program`` applied to |0^n>."""
    dims = program.dims
    if program.unitary is not None:
        amps = program.unitary[:, 0].copy()
        for targets, block in program.gates:
            _apply_block_inplace(amps, dims.n, targets, block)
    else:
        amps = np.zeros(dims.N, dtype=np.complex128)
        amps[0] = 1.0
        for targets, block in program.gates:
            _apply_block_inplace(amps, dims.n, targets, block)
    norm = float(np.vdot(amps, amps).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state norm drifted to {norm!r} during simulation")
    return OutputDistribution(dims, np.abs(amps) ** 2)


def program_unitary(program):
    """Dense N x N unitary of the whole program (small n only)."""
    dims = program.dims
    if dims.n > 12:
        raise ValueError("dense composition limited to n <= 12")
    u = program.unitary.copy() if program.unitary is not None else np.eye(
        dims.N, dtype=np.complex128
    )
    for targets, block in program.gates:
        full = np.empty_like(u)
        for col in range(dims.N):
            amps = u[:, col].copy()
            _apply_block_inplace(amps, dims.n, targets, block)
            full[:, col] = amps
        u = full
    return u


# ---------------------------------------------------------------------------
# JSON serialization: {"n": ..., "gates": [{"targets": [...], "matrix": ...}]}
# with matrix entries as [re, im] pairs, row-major.
# ---------------------------------------------------------------------------

def _matrix_to_json(matrix):
    return [
        [[float(v.real), float(v.imag)] for v in row] for row in matrix
    ]


def _matrix_from_json(rows):
    return np.array(
        [[complex(re, im) for re, im in row] for row in rows],
        dtype=np.complex128,
    )


def program_to_dict(program):
    doc = {
        "n": program.dims.n,
        "gates": [
            {"targets": list(t), "matrix": _matrix_to_json(b)}
            for t, b in program.gates
        ],
    }
    if program.unitary is not None:
        doc["unitary"] = _matrix_to_json(program.unitary)
    return doc


def program_from_dict(doc):
    dims = SystemDims(int(doc["n"]))
    gates = [
        (tuple(g["targets"]), _matrix_from_json(g["matrix"]))
        for g in doc.get("gates", [])
    ]
    unitary = None
    if "unitary" in doc:
        unitary = _matrix_from_json(doc["unitary"])
    return GateProgram(dims=dims, gates=gates, unitary=unitary)


def save_programs(programs, path):
    with open(path, "w") as fh:
        json.dump([program_to_dict(p) for p in programs], fh)


def load_programs(path):
    with open(path) as fh:
        docs = json.load(fh)
    if not isinstance(docs, list):
        raise ValueError(f"{path}: expected a JSON list of gate programs")
    return [program_from_dict(d) for d in docs]
