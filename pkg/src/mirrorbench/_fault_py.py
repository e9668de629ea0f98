"""Pure-numpy Pauli-frame fault propagation kernel.

This is the fallback implementation of the contract shared with the compiled
kernel in ``_fault_cy``: both consume the same pre-drawn uniform block in the
same operation order, so for a given RNG stream the two produce bit-identical
results.

Program encoding (one int32 row per operation, ``[kind, a, b, aux]``):

- kind 0: single-qubit Clifford at qubit ``a``; ``aux`` is the Clifford index.
- kind 1: UZZ on qubits ``(a, b)`` (Z-parts flip when the X-bits differ).
- kind 2: one-qubit Pauli fault at ``a``; ``aux`` is a cumulative-table row.
- kind 3: two-qubit Pauli fault at ``(a, b)``; ``aux`` as above.

Fault table rows are cumulative probabilities over Pauli codes
``k = (x_a + 2 z_a) + 4 (x_b + 2 z_b)`` (one-qubit tables use codes 0..3 and
pad the remainder with 1.0).  A uniform ``r`` selects the first code whose
cumulative value exceeds it.  The returned array holds each shot's final
X-bitmask: a shot succeeds iff no measurement flip remains, i.e. the mask is 0.
"""

from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)
_TWO = np.uint64(2)
_THREE = np.uint64(3)


def propagate(ops: np.ndarray, cum_tables: np.ndarray, cliff_map: np.ndarray,
              n_qubits: int, uniforms: np.ndarray) -> np.ndarray:
    """Propagate a block of Pauli frames; see the module docstring."""
    shots = uniforms.shape[0]
    x = np.zeros(shots, dtype=np.uint64)
    z = np.zeros(shots, dtype=np.uint64)
    cliff_map = cliff_map.astype(np.uint64, copy=False)
    u_idx = 0
    for row in ops:
        kind = int(row[0])
        a = np.uint64(int(row[1]))
        b = np.uint64(int(row[2]))
        aux = int(row[3])
        if kind == 0:
            code = ((x >> a) & _ONE) | (((z >> a) & _ONE) << _ONE)
            new_code = cliff_map[aux][code]
            keep = ~(_ONE << a)
            x = (x & keep) | ((new_code & _ONE) << a)
            z = (z & keep) | (((new_code >> _ONE) & _ONE) << a)
        elif kind == 1:
            t = ((x >> a) ^ (x >> b)) & _ONE
            z ^= (t << a) | (t << b)
        else:
            r = uniforms[:, u_idx]
            u_idx += 1
            k = np.searchsorted(cum_tables[aux], r, side="right").astype(np.uint64)
            if kind == 2:
                x ^= (k & _ONE) << a
                z ^= ((k >> _ONE) & _ONE) << a
            else:
                x ^= ((k & _ONE) << a) | (((k >> _TWO) & _ONE) << b)
                z ^= (((k >> _ONE) & _ONE) << a) | (((k >> _THREE) & _ONE) << b)
    return x
