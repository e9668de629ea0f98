"""Noisy execution of compiled mirror circuits.

Two backends share a gate-located noise model:

- ``run_stabilizer``: Monte Carlo Pauli-frame propagation for stochastic
  Pauli noise.  A per-shot fault frame (X/Z bitmasks) is conjugated through
  the Clifford circuit; sampled faults XOR into it, and a shot succeeds iff
  the final frame has no X component (the noiseless output is a computational
  basis state, so only X-parts flip measurement bits).  The inner loop runs in
  a compiled Cython kernel when available, with a bit-identical numpy
  fallback (``MIRRORBENCH_PURE_PYTHON=1`` forces the fallback).
- ``run_dense``: exact survival probability by propagating the PTM coordinate
  vector of the state through every gate and channel (up to 4 qubits).

Noise placement: the two-qubit channel acts after every UZZ gate, the
single-qubit channel (optional) after every single-qubit Clifford, and
``inverse_half_override`` replaces the two-qubit channel on mirrored-half
UZZ gates.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .channels import (
    AmplitudeDamping,
    ChannelParams,
    Depolarizing,
    StochasticPauli,
    UnitaryError,
    computational_effect_vector,
    computational_state_vector,
    superop_of,
    superop_of_unitary,
)
from .circuits import CompiledCircuit, MirrorCircuitSpec, build_mirror_circuit
from .operators import CliffordGate, NativeGate, SingleQubitClifford, UZZ_MATRIX

DATASET_FORMAT_VERSION = 1

_FORCE_PY = os.environ.get("MIRRORBENCH_PURE_PYTHON", "") not in ("", "0")
if _FORCE_PY:
    from . import _fault_py as _kernel

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _fault_cy as _kernel

        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _fault_py as _kernel

        KERNEL_BACKEND = "python"

_SHOT_BLOCK = 8192  # fixed so the RNG stream does not depend on the kernel


def available_kernels() -> tuple:
    names = ["python"]
    try:
        from . import _fault_cy  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return tuple(names)


# ---------------------------------------------------------------------------
# Noise model
# ---------------------------------------------------------------------------


def _channel_arity_ok(params: ChannelParams, k: int) -> bool:
    if isinstance(params, (Depolarizing, AmplitudeDamping)):
        return True  # dimension-agnostic / per-qubit
    if isinstance(params, StochasticPauli):
        return params.n_qubits == k
    if isinstance(params, UnitaryError):
        return len(params.axis) == k
    return False


def is_pauli_stochastic(params: ChannelParams) -> bool:
    """True if the channel applies Paulis with fixed probabilities."""
    return isinstance(params, (Depolarizing, StochasticPauli))


@dataclass(frozen=True)
class NoiseModel:
    """Gate-located noise: channels attached to gate classes.

    Args:
        two_qubit: channel applied after every UZZ gate (on its pair).
        single_qubit: optional channel applied after every single-qubit gate.
        inverse_half_override: optional replacement for ``two_qubit`` on
            UZZ gates in the mirrored half.
    """

    two_qubit: Optional[ChannelParams] = None
    single_qubit: Optional[ChannelParams] = None
    inverse_half_override: Optional[ChannelParams] = None

    def __post_init__(self):
        for params, k, name in (
            (self.two_qubit, 2, "two_qubit"),
            (self.single_qubit, 1, "single_qubit"),
            (self.inverse_half_override, 2, "inverse_half_override"),
        ):
            if params is not None and not _channel_arity_ok(params, k):
                raise ValueError(f"{name} channel has the wrong qubit count")

    def stabilizer_compatible(self) -> bool:
        return all(
            p is None or is_pauli_stochastic(p)
            for p in (self.two_qubit, self.single_qubit, self.inverse_half_override)
        )


@dataclass(frozen=True)
class ShotRecord:
    """Outcome counts for one circuit."""

    circuit_id: int
    shots: int
    successes: int


@dataclass(frozen=True)
class DatasetEntry:
    """One dataset row: counts for one circuit at one length."""

    length: int
    circuit_id: int
    shots: int
    successes: int
    seed: int


@dataclass(frozen=True)
class DecayDataset:
    """Survival counts for a set of mirror circuits on ``n_qubits`` qubits."""

    n_qubits: int
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def lengths(self) -> tuple:
        return tuple(sorted({e.length for e in self.entries}))


# ---------------------------------------------------------------------------
# Fault program encoding
# ---------------------------------------------------------------------------

_OP_CLIFF = 0
_OP_UZZ = 1
_OP_FAULT1 = 2
_OP_FAULT2 = 3

_CODE_FROM_DIGIT = (0, 1, 3, 2)  # PTM digit I,X,Y,Z -> symplectic code x + 2z


def _build_cliff_code_map() -> np.ndarray:
    table = np.zeros((24, 4), dtype=np.uint8)
    for idx in range(24):
        c = SingleQubitClifford(idx)
        cx = c.x_image.x + 2 * c.x_image.z
        cz = c.z_image.x + 2 * c.z_image.z
        table[idx, 1] = cx
        table[idx, 2] = cz
        table[idx, 3] = cx ^ cz  # codes compose by XOR
    return table


_CLIFF_CODE_MAP = _build_cliff_code_map()


def kernel_pauli_probs(params: ChannelParams, k: int) -> np.ndarray:
    """Fault probabilities over the 4^k kernel Pauli codes (identity first)."""
    if not is_pauli_stochastic(params):
        raise ValueError(f"{type(params).__name__} is not stochastic Pauli noise")
    size = 4 ** k
    if isinstance(params, Depolarizing):
        probs = np.full(size, params.p / size)
        probs[0] += 1.0 - params.p
    else:
        if params.n_qubits != k:
            raise ValueError("StochasticPauli qubit count mismatch")
        full = params.full_probs()  # PTM digit order
        probs = np.zeros(size)
        for ptm_idx in range(size):
            kern = 0
            rest = ptm_idx
            # PTM digits run most-significant-first over the slot qubits;
            # kernel codes pack the first slot qubit into the low bits.
            for slot in reversed(range(k)):
                digit = rest % 4
                rest //= 4
                kern |= _CODE_FROM_DIGIT[digit] << (2 * slot)
            probs[kern] = full[ptm_idx]
    return probs


def _cumulative_table(probs: np.ndarray) -> np.ndarray:
    table = np.ones(16)
    cum = np.cumsum(probs)
    cum[-1] = 1.0  # absorb rounding so every uniform lands
    table[: len(cum)] = np.minimum(cum, 1.0)
    return table


@dataclass(frozen=True)
class FaultProgram:
    """Kernel-ready encoding of one circuit under one noise model."""

    n_qubits: int
    ops: np.ndarray
    cum_tables: np.ndarray
    n_faults: int


def compile_fault_program(circuit: CompiledCircuit, noise: NoiseModel) -> FaultProgram:
    if circuit.n_qubits > 64:
        raise ValueError("stabilizer backend limited to 64 qubits")
    rows = []
    tables = []
    table_index = {}

    def table_for(params: ChannelParams, k: int) -> int:
        key = (params, k)
        if key not in table_index:
            table_index[key] = len(tables)
            tables.append(_cumulative_table(kernel_pauli_probs(params, k)))
        return table_index[key]

    for gate_pos, gate in enumerate(circuit.gates):
        if isinstance(gate, CliffordGate):
            rows.append((_OP_CLIFF, gate.qubit, 0, gate.clifford.index))
            if noise.single_qubit is not None:
                rows.append(
                    (_OP_FAULT1, gate.qubit, 0, table_for(noise.single_qubit, 1))
                )
        else:
            a, b = gate.qubits
            rows.append((_OP_UZZ, a, b, 0))
            params = noise.two_qubit
            if (
                gate_pos >= circuit.mirror_start
                and noise.inverse_half_override is not None
            ):
                params = noise.inverse_half_override
            if params is not None:
                rows.append((_OP_FAULT2, a, b, table_for(params, 2)))
    ops = np.asarray(rows, dtype=np.int32).reshape(-1, 4)
    n_faults = int(np.sum((ops[:, 0] == _OP_FAULT1) | (ops[:, 0] == _OP_FAULT2)))
    if tables:
        cum = np.ascontiguousarray(np.stack(tables))
    else:
        cum = np.ones((1, 16))
    return FaultProgram(circuit.n_qubits, np.ascontiguousarray(ops), cum, n_faults)


def propagate_faults(program: FaultProgram, uniforms: np.ndarray) -> np.ndarray:
    """Run the active kernel on one pre-drawn uniform block."""
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return _kernel.propagate(
        program.ops, program.cum_tables, _CLIFF_CODE_MAP, program.n_qubits, uniforms
    )


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


def run_stabilizer(circuit: CompiledCircuit, noise: NoiseModel, shots: int,
                   rng: np.random.Generator) -> ShotRecord:
    """Monte Carlo survival counts under stochastic Pauli noise."""
    if not noise.stabilizer_compatible():
        raise ValueError(
            "stabilizer backend requires stochastic Pauli channels; "
            "use run_dense for coherent or amplitude-damping noise"
        )
    if shots < 1:
        raise ValueError("shots must be >= 1")
    program = compile_fault_program(circuit, noise)
    successes = 0
    done = 0
    while done < shots:
        block = min(_SHOT_BLOCK, shots - done)
        uniforms = rng.random((block, program.n_faults))
        flips = propagate_faults(program, uniforms)
        successes += int(np.count_nonzero(flips == 0))
        done += block
    return ShotRecord(circuit.circuit_id, shots, successes)


@lru_cache(maxsize=None)
def _embedding_positions(qubits: tuple, n_qubits: int) -> np.ndarray:
    """Permutation mapping full PTM indices to (rest, sub) block order."""
    size = 4 ** n_qubits
    idx = np.arange(size)
    digits = [(idx // 4 ** (n_qubits - 1 - q)) % 4 for q in range(n_qubits)]
    sub = np.zeros(size, dtype=np.int64)
    for q in qubits:
        sub = sub * 4 + digits[q]
    rest = np.zeros(size, dtype=np.int64)
    for q in range(n_qubits):
        if q not in qubits:
            rest = rest * 4 + digits[q]
    return rest * (4 ** len(qubits)) + sub


def _embed_ptm(mat: np.ndarray, qubits: tuple, n_qubits: int) -> np.ndarray:
    k = len(qubits)
    big = np.kron(np.eye(4 ** (n_qubits - k)), mat)
    pos = _embedding_positions(qubits, n_qubits)
    return big[np.ix_(pos, pos)]


@lru_cache(maxsize=None)
def _gate_ptm_embedded(kind: str, key, qubits: tuple, n_qubits: int) -> np.ndarray:
    if kind == "c1":
        mat = superop_of_unitary(
            np.asarray(SingleQubitClifford(key).unitary)
        ).mat
    elif kind == "uzz":
        mat = superop_of_unitary(UZZ_MATRIX).mat
    else:  # channel
        mat = superop_of(key, len(qubits)).mat
    out = _embed_ptm(mat, qubits, n_qubits)
    out.flags.writeable = False
    return out


def run_dense(circuit: CompiledCircuit, noise: NoiseModel) -> float:
    """Exact survival probability via PTM vector propagation (n <= 4)."""
    n = circuit.n_qubits
    if n > 4:
        raise ValueError("dense backend limited to 4 qubits")
    vec = computational_state_vector(n, 0)
    for gate_pos, gate in enumerate(circuit.gates):
        if isinstance(gate, CliffordGate):
            vec = _gate_ptm_embedded(
                "c1", gate.clifford.index, (gate.qubit,), n
            ) @ vec
            if noise.single_qubit is not None:
                vec = _gate_ptm_embedded(
                    "chan", noise.single_qubit, (gate.qubit,), n
                ) @ vec
        else:
            vec = _gate_ptm_embedded("uzz", None, tuple(gate.qubits), n) @ vec
            params = noise.two_qubit
            if (
                gate_pos >= circuit.mirror_start
                and noise.inverse_half_override is not None
            ):
                params = noise.inverse_half_override
            if params is not None:
                vec = _gate_ptm_embedded("chan", params, tuple(gate.qubits), n) @ vec
    bits = 0
    for q, bit in enumerate(circuit.expected_outcome):
        bits |= bit << q
    prob = float(computational_effect_vector(n, bits) @ vec)
    return min(max(prob, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Survival experiments
# ---------------------------------------------------------------------------


def _as_compiled(item) -> CompiledCircuit:
    if isinstance(item, CompiledCircuit):
        return item
    if isinstance(item, MirrorCircuitSpec):
        return build_mirror_circuit(item)
    raise TypeError(f"expected a circuit spec or compiled circuit, got {item!r}")


def _run_one(args):
    circuit, noise, shots, child_seed, backend = args
    rng = np.random.default_rng(np.random.SeedSequence(child_seed))
    if backend == "stabilizer":
        record = run_stabilizer(circuit, noise, shots, rng)
        successes = record.successes
    elif backend == "dense":
        successes = int(rng.binomial(shots, run_dense(circuit, noise)))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return DatasetEntry(circuit.length, circuit.circuit_id, shots, successes,
                        circuit.seed)


def simulate_survival(circuits: Sequence, noise: NoiseModel, shots: int,
                      rng: Union[int, np.random.Generator], jobs: int = 1,
                      backend: str = "stabilizer") -> DecayDataset:
    """Simulate survival counts for a batch of circuits.

    ``rng`` may be a seed or a Generator; each circuit gets a child stream
    derived from ``(master_seed, position)``, so results are independent of
    ``jobs`` and of circuit order within a job.  The dense backend computes
    the exact probability and draws binomial counts from it.
    """
    compiled = [_as_compiled(c) for c in circuits]
    if not compiled:
        raise ValueError("no circuits given")
    n = compiled[0].n_qubits
    if any(c.n_qubits != n for c in compiled):
        raise ValueError("circuits must share a qubit count")
    if isinstance(rng, np.random.Generator):
        master = int(rng.integers(0, 2 ** 63 - 1))
    else:
        master = int(rng)
    tasks = [
        (c, noise, shots, (master, pos), backend)
        for pos, c in enumerate(compiled)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_run_one, tasks, chunksize=1))
    else:
        entries = [_run_one(t) for t in tasks]
    return DecayDataset(n, tuple(entries))


# ---------------------------------------------------------------------------
# Dataset files
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ("n", "L", "circuit_id", "shots", "successes", "seed")


def write_dataset_csv(dataset: DecayDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for e in dataset.entries:
            writer.writerow(
                [dataset.n_qubits, e.length, e.circuit_id, e.shots, e.successes, e.seed]
            )


def read_dataset_csv(path) -> DecayDataset:
    entries = []
    n_values = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(_CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"dataset CSV missing columns {sorted(missing)}")
        for row in reader:
            n_values.add(int(row["n"]))
            entries.append(
                DatasetEntry(int(row["L"]), int(row["circuit_id"]),
                             int(row["shots"]), int(row["successes"]),
                             int(row["seed"]))
            )
    if len(n_values) != 1:
        raise ValueError("dataset CSV must describe a single qubit count")
    return DecayDataset(n_values.pop(), tuple(entries))


def write_dataset_json(dataset: DecayDataset, path) -> None:
    data = {
        "version": DATASET_FORMAT_VERSION,
        "n": dataset.n_qubits,
        "entries": [
            {"L": e.length, "circuit_id": e.circuit_id, "shots": e.shots,
             "successes": e.successes, "seed": e.seed}
            for e in dataset.entries
        ],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_dataset_json(path) -> DecayDataset:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("version") != DATASET_FORMAT_VERSION:
        raise ValueError(f"unsupported dataset version {data.get('version')!r}")
    entries = tuple(
        DatasetEntry(int(e["L"]), int(e["circuit_id"]), int(e["shots"]),
                     int(e["successes"]), int(e["seed"]))
        for e in data["entries"]
    )
    return DecayDataset(int(data["n"]), entries)
