"""Exact Pauli and single-qubit Clifford algebra for mirror circuits.

Conventions used throughout the package:

- An n-qubit Pauli is stored in the canonical form ``phase * X^x * Z^z`` where
  ``x`` and ``z`` are integer bitmasks (bit ``j`` belongs to qubit ``j``) and
  ``phase`` is one of ``{1, -1, 1j, -1j}``.  ``Y = 1j * X * Z``, so the
  operator usually written ``+Y`` has ``phase == 1j`` in canonical form.
- Qubit 0 is the leftmost tensor factor: ``to_matrix`` returns
  ``phase * kron(F_0, F_1, ..., F_{n-1})`` and computational basis index
  ``sum(b_j * 2**(n-1-j))`` for bits ``b_j``.
- The native two-qubit entangler is ``UZZ = exp(-1j * pi/4 * Z (x) Z)``.
- The 24 single-qubit Cliffords are enumerated once by breadth-first search
  over products of H and S starting from the identity, deduplicated by their
  action on X and Z.  Index 0 is the identity; composition and inversion are
  table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_H2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S2 = np.array([[1, 0], [0, 1j]], dtype=complex)

PAULI_MATRICES = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}

# exp(-1j*pi/4 * kron(Z, Z)) is diagonal; exact entries.
UZZ_MATRIX = np.diag(np.exp(-1j * np.pi / 4.0 * np.array([1.0, -1.0, -1.0, 1.0])))
UZZ_MATRIX.flags.writeable = False


def _canon_phase(value: complex) -> complex:
    """Snap a product of exact phase units back onto {1, -1, 1j, -1j}."""
    re = round(value.real)
    im = round(value.imag)
    cand = complex(re, im)
    if abs(value - cand) > 1e-9 or (re, im) not in {(1, 0), (-1, 0), (0, 1), (0, -1)}:
        raise ValueError(f"phase {value!r} is not a fourth root of unity")
    return _PHASES[{(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}[(re, im)]]


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli ``phase * X^x * Z^z`` with integer bitmasks.

    Args:
        n_qubits: number of qubits n >= 1.
        x: X-part bitmask, bit j for qubit j.
        z: Z-part bitmask.
        phase: one of 1, -1, 1j, -1j (canonical form; note +Y has phase 1j).
    """

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: complex = 1 + 0j

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        mask = (1 << self.n_qubits) - 1
        if not 0 <= self.x <= mask or not 0 <= self.z <= mask:
            raise ValueError("bitmask out of range for n_qubits")
        object.__setattr__(self, "phase", _canon_phase(self.phase))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOperator":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse labels like ``"XIZ"``, ``"-Y"``, ``"+iXZ"``, ``"-iYY"``."""
        body = label
        phase = 1 + 0j
        for prefix, value in (("+i", 1j), ("-i", -1j), ("+", 1 + 0j), ("-", -1 + 0j)):
            if body.startswith(prefix):
                phase = value
                body = body[len(prefix):]
                break
        if not body or any(ch not in "IXYZ" for ch in body):
            raise ValueError(f"bad Pauli label {label!r}")
        x = z = 0
        for j, ch in enumerate(body):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
            if ch == "Y":
                phase *= 1j
        return cls(len(body), x, z, phase)

    def to_label(self) -> str:
        """Inverse of :meth:`from_label`; always carries an explicit sign."""
        letters = []
        phase = self.phase
        for j in range(self.n_qubits):
            xb = (self.x >> j) & 1
            zb = (self.z >> j) & 1
            letters.append("IXZY"[xb + 2 * zb])
            if xb and zb:
                phase *= -1j  # pull the i out of Y = i X Z
        prefix = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[_canon_phase(phase)]
        return prefix + "".join(letters)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self, up_to_phase: bool = False) -> bool:
        if self.x or self.z:
            return False
        return up_to_phase or self.phase == 1

    def commutes_with(self, other: "PauliOperator") -> bool:
        sym = (self.x & other.z).bit_count() + (self.z & other.x).bit_count()
        return sym % 2 == 0

    def adjoint(self) -> "PauliOperator":
        sign = -1 if (self.x & self.z).bit_count() % 2 else 1
        return PauliOperator(self.n_qubits, self.x, self.z, sign * self.phase.conjugate())

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_multiply(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; qubit 0 is the leftmost kron factor. n <= 10."""
        if self.n_qubits > 10:
            raise ValueError("to_matrix limited to n <= 10")
        out = np.array([[self.phase]])
        for j in range(self.n_qubits):
            fac = _I2
            if (self.x >> j) & 1:
                fac = fac @ _X2
            if (self.z >> j) & 1:
                fac = fac @ _Z2
            out = np.kron(out, fac)
        return out

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_label()!r})"


def pauli_multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product of two Paulis, including the phase.

    Moving ``X^{q.x}`` through ``Z^{p.z}`` contributes ``(-1)^{|p.z & q.x|}``.
    """
    if p.n_qubits != q.n_qubits:
        raise ValueError("qubit count mismatch")
    sign = -1 if (p.z & q.x).bit_count() % 2 else 1
    return PauliOperator(p.n_qubits, p.x ^ q.x, p.z ^ q.z, sign * p.phase * q.phase)


def sample_pauli(rng: np.random.Generator, n_qubits: int) -> PauliOperator:
    """Uniform Hermitian Pauli on n qubits (4^n outcomes, phase-free)."""
    codes = rng.integers(0, 4, size=n_qubits)
    x = z = 0
    phase = 1 + 0j
    for j, c in enumerate(codes):
        if c in (1, 2):
            x |= 1 << j
        if c in (2, 3):
            z |= 1 << j
        if c == 2:
            phase *= 1j
    return PauliOperator(n_qubits, x, z, phase)


# ---------------------------------------------------------------------------
# Single-qubit Clifford group
# ---------------------------------------------------------------------------


def _classify_signed_pauli(mat: np.ndarray) -> PauliOperator:
    """Match a 2x2 matrix against the six Hermitian signed Paulis."""
    for label in ("X", "Y", "Z"):
        ref = PAULI_MATRICES[label]
        for sign, pref in ((1.0, ""), (-1.0, "-")):
            if np.allclose(mat, sign * ref, atol=1e-9):
                return PauliOperator.from_label(pref + label)
    raise ValueError("matrix is not a signed Pauli")


def _action_key(unitary: np.ndarray) -> tuple:
    udag = unitary.conj().T
    key = []
    for ref in (_X2, _Z2):
        img = _classify_signed_pauli(unitary @ ref @ udag)
        key.append((img.x, img.z, img.phase))
    return tuple(key)


def _build_clifford_table():
    gens = (("h", _H2), ("s", _S2))
    records = []  # (word, unitary, x_image, z_image)
    seen = {}
    queue = [((), np.eye(2, dtype=complex))]
    seen[_action_key(np.eye(2, dtype=complex))] = 0
    records.append(((), np.eye(2, dtype=complex)))
    while queue:
        word, mat = queue.pop(0)
        for name, gen in gens:
            new_word = word + (name,)  # time order: gen applied after word
            new_mat = gen @ mat
            key = _action_key(new_mat)
            if key not in seen:
                seen[key] = len(records)
                records.append((new_word, new_mat))
                queue.append((new_word, new_mat))
    if len(records) != 24:
        raise RuntimeError(f"Clifford enumeration found {len(records)} elements")
    words = []
    unitaries = np.empty((24, 2, 2), dtype=complex)
    x_images = []
    z_images = []
    for idx, (word, mat) in enumerate(records):
        words.append(word)
        unitaries[idx] = mat
        udag = mat.conj().T
        x_images.append(_classify_signed_pauli(mat @ _X2 @ udag))
        z_images.append(_classify_signed_pauli(mat @ _Z2 @ udag))
    unitaries.flags.writeable = False

    compose = np.empty((24, 24), dtype=np.int8)
    for i in range(24):
        for j in range(24):
            compose[i, j] = seen[_action_key(unitaries[i] @ unitaries[j])]
    inverse = np.empty(24, dtype=np.int8)
    for i in range(24):
        (js,) = np.nonzero(compose[i] == 0)
        inverse[i] = js[0]

    pauli_index = {}
    for code, mat in enumerate((_I2, _X2, _Y2, _Z2)):
        pauli_index[code] = seen[_action_key(mat)]
    return words, unitaries, x_images, z_images, compose, inverse, pauli_index


(_CLIFF_WORDS, CLIFFORD_UNITARIES, _CLIFF_X_IMAGES, _CLIFF_Z_IMAGES,
 _CLIFF_COMPOSE, _CLIFF_INVERSE, _PAULI_CLIFF_INDEX) = _build_clifford_table()


@dataclass(frozen=True, order=True)
class SingleQubitClifford:
    """One of the 24 single-qubit Cliffords, identified by table index."""

    index: int

    def __post_init__(self):
        if not 0 <= self.index < 24:
            raise ValueError("Clifford index must be in [0, 24)")

    @classmethod
    def identity(cls) -> "SingleQubitClifford":
        return cls(0)

    @classmethod
    def from_pauli_code(cls, code: int) -> "SingleQubitClifford":
        """The Clifford whose conjugation action equals Pauli I/X/Y/Z (code 0..3)."""
        return cls(_PAULI_CLIFF_INDEX[code])

    @property
    def word(self) -> tuple:
        """Generator word in application (time) order, letters 'h'/'s'."""
        return _CLIFF_WORDS[self.index]

    @property
    def unitary(self) -> np.ndarray:
        """Canonical 2x2 matrix: the product of the generator word."""
        return CLIFFORD_UNITARIES[self.index]

    @property
    def x_image(self) -> PauliOperator:
        return _CLIFF_X_IMAGES[self.index]

    @property
    def z_image(self) -> PauliOperator:
        return _CLIFF_Z_IMAGES[self.index]

    def compose(self, other: "SingleQubitClifford") -> "SingleQubitClifford":
        """self after other (matrix product self.unitary @ other.unitary)."""
        return SingleQubitClifford(int(_CLIFF_COMPOSE[self.index, other.index]))

    def inverse(self) -> "SingleQubitClifford":
        return SingleQubitClifford(int(_CLIFF_INVERSE[self.index]))

    def __repr__(self) -> str:
        return f"SingleQubitClifford({self.index})"


def clifford_named(name: str) -> SingleQubitClifford:
    """Look up I, X, Y, Z, H or S by conjugation action."""
    name = name.upper()
    if name in ("I", "X", "Y", "Z"):
        return SingleQubitClifford.from_pauli_code("IXYZ".index(name))
    if name == "H":
        return SingleQubitClifford(_HADAMARD_INDEX)
    if name == "S":
        return SingleQubitClifford(_PHASE_INDEX)
    raise ValueError(f"unknown Clifford name {name!r}")


def _find_by_action(mat: np.ndarray) -> int:
    key = _action_key(mat)
    for idx in range(24):
        if _action_key(CLIFFORD_UNITARIES[idx]) == key:
            return idx
    raise ValueError("not a Clifford action")


_HADAMARD_INDEX = _find_by_action(_H2)
_PHASE_INDEX = _find_by_action(_S2)


def sample_clifford(rng: np.random.Generator) -> SingleQubitClifford:
    """Uniform draw from the 24-element single-qubit Clifford group."""
    return SingleQubitClifford(int(rng.integers(24)))


# ---------------------------------------------------------------------------
# Conjugation rules
# ---------------------------------------------------------------------------


def _embed_1q(img: PauliOperator, qubit: int, n_qubits: int) -> PauliOperator:
    return PauliOperator(n_qubits, img.x << qubit, img.z << qubit, img.phase)


def conjugate_by_clifford(p: PauliOperator, c: SingleQubitClifford,
                          qubit: int) -> PauliOperator:
    """Exact image ``C p C^dagger`` for a single-qubit Clifford at ``qubit``."""
    if not 0 <= qubit < p.n_qubits:
        raise ValueError("qubit out of range")
    bit = 1 << qubit
    xq = p.x & bit
    zq = p.z & bit
    if not (xq or zq):
        return p
    res = PauliOperator(p.n_qubits, p.x & ~bit, p.z & ~bit, p.phase)
    if xq:
        res = pauli_multiply(res, _embed_1q(c.x_image, qubit, p.n_qubits))
    if zq:
        res = pauli_multiply(res, _embed_1q(c.z_image, qubit, p.n_qubits))
    return res


def conjugate_by_uzz(p: PauliOperator, pair: tuple) -> PauliOperator:
    """Exact image ``U p U^dagger`` for ``U = exp(-1j pi/4 ZZ)`` on ``pair``.

    Generator images: X_a -> Y_a Z_b, X_b -> Z_a Y_b, Z_a -> Z_a, Z_b -> Z_b.
    """
    a, b = pair
    n = p.n_qubits
    if a == b or not (0 <= a < n and 0 <= b < n):
        raise ValueError("bad qubit pair")
    bits = (1 << a) | (1 << b)
    res = PauliOperator(n, p.x & ~bits, p.z & ~bits, p.phase)
    both_z = (1 << a) | (1 << b)
    # canonical forms: Y_a Z_b = 1j * X_a Z_a Z_b, Z_a Y_b = 1j * X_b Z_a Z_b
    if (p.x >> a) & 1:
        res = pauli_multiply(res, PauliOperator(n, 1 << a, both_z, 1j))
    if (p.x >> b) & 1:
        res = pauli_multiply(res, PauliOperator(n, 1 << b, both_z, 1j))
    if (p.z >> a) & 1:
        res = pauli_multiply(res, PauliOperator(n, 0, 1 << a))
    if (p.z >> b) & 1:
        res = pauli_multiply(res, PauliOperator(n, 0, 1 << b))
    return res


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliffordGate:
    """A single-qubit Clifford applied at one qubit."""

    qubit: int
    clifford: SingleQubitClifford

    KIND = "cliff"


@dataclass(frozen=True)
class NativeGate:
    """The native two-qubit entangler UZZ on an ordered qubit pair."""

    qubits: tuple

    KIND = "uzz"

    def __post_init__(self):
        a, b = self.qubits
        if a == b:
            raise ValueError("UZZ needs two distinct qubits")


def invert_layer_native(gate: NativeGate) -> tuple:
    """Native-gate compilation of UZZ^{-1}: (X on first qubit) UZZ (X on first qubit).

    Returned in application order; the product equals exp(+1j pi/4 ZZ) exactly.
    """
    x_gate = CliffordGate(gate.qubits[0], clifford_named("X"))
    return (x_gate, NativeGate(gate.qubits), x_gate)


# ---------------------------------------------------------------------------
# Stabilizer tableau
# ---------------------------------------------------------------------------


@dataclass
class StabilizerTableau:
    """Images of the generators X_j, Z_j under a Clifford circuit.

    ``x_images[j]`` is the image of X_j (a signed Pauli), ``z_images[j]`` of
    Z_j.  Gates applied with :meth:`apply_clifford` / :meth:`apply_uzz`
    left-compose onto the represented unitary.
    """

    n_qubits: int
    x_images: list = field(default_factory=list)
    z_images: list = field(default_factory=list)

    @classmethod
    def identity(cls, n_qubits: int) -> "StabilizerTableau":
        xs = [PauliOperator(n_qubits, 1 << j, 0) for j in range(n_qubits)]
        zs = [PauliOperator(n_qubits, 0, 1 << j) for j in range(n_qubits)]
        return cls(n_qubits, xs, zs)

    @classmethod
    def from_gates(cls, gates: Iterable, n_qubits: int) -> "StabilizerTableau":
        tab = cls.identity(n_qubits)
        for gate in gates:
            tab.apply_gate(gate)
        return tab

    def apply_gate(self, gate) -> None:
        if isinstance(gate, CliffordGate):
            self.apply_clifford(gate.clifford, gate.qubit)
        elif isinstance(gate, NativeGate):
            self.apply_uzz(gate.qubits)
        else:
            raise TypeError(f"unknown gate {gate!r}")

    def apply_clifford(self, c: SingleQubitClifford, qubit: int) -> None:
        self.x_images = [conjugate_by_clifford(p, c, qubit) for p in self.x_images]
        self.z_images = [conjugate_by_clifford(p, c, qubit) for p in self.z_images]

    def apply_uzz(self, pair: tuple) -> None:
        self.x_images = [conjugate_by_uzz(p, pair) for p in self.x_images]
        self.z_images = [conjugate_by_uzz(p, pair) for p in self.z_images]

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """Image of an arbitrary Pauli under the represented circuit."""
        if p.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        res = PauliOperator(self.n_qubits, 0, 0, p.phase)
        for j in range(self.n_qubits):
            if (p.x >> j) & 1:
                res = pauli_multiply(res, self.x_images[j])
        for j in range(self.n_qubits):
            if (p.z >> j) & 1:
                res = pauli_multiply(res, self.z_images[j])
        return res

    def compose(self, other: "StabilizerTableau") -> "StabilizerTableau":
        """Tableau of self applied after other."""
        xs = [self.conjugate(p) for p in other.x_images]
        zs = [self.conjugate(p) for p in other.z_images]
        return StabilizerTableau(self.n_qubits, xs, zs)

    def is_identity(self, up_to_signs: bool = False) -> bool:
        for j in range(self.n_qubits):
            xi = self.x_images[j]
            zi = self.z_images[j]
            if (xi.x, xi.z) != (1 << j, 0) or (zi.x, zi.z) != (0, 1 << j):
                return False
            if not up_to_signs and (xi.phase != 1 or zi.phase != 1):
                return False
        return True

    def check_valid(self) -> None:
        """Verify the images satisfy the generator (anti)commutation relations."""
        for j in range(self.n_qubits):
            for k in range(self.n_qubits):
                if self.x_images[j].commutes_with(self.z_images[k]) != (j != k):
                    raise ValueError("tableau images violate commutation relations")
                if j < k and not (
                    self.x_images[j].commutes_with(self.x_images[k])
                    and self.z_images[j].commutes_with(self.z_images[k])
                ):
                    raise ValueError("tableau images violate commutation relations")
