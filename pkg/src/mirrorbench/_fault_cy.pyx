# cython: boundscheck=False, wraparound=False, initializedcheck=False
# cython: cdivision=True, language_level=3
"""Compiled Pauli-frame fault propagation kernel.

Same program encoding and RNG-consumption contract as ``_fault_py``; see that
module's docstring.  The uniform block is indexed ``uniforms[shot, fault]`` in
both implementations, so results are bit-identical for the same stream.
"""

import numpy as np

from libc.stdint cimport int32_t, uint8_t, uint64_t


def propagate(const int32_t[:, ::1] ops, const double[:, ::1] cum_tables,
              const uint8_t[:, ::1] cliff_map, int n_qubits,
              const double[:, ::1] uniforms):
    """Propagate a block of Pauli frames; returns the per-shot X-bitmask."""
    cdef Py_ssize_t shots = uniforms.shape[0]
    cdef Py_ssize_t n_ops = ops.shape[0]
    out_arr = np.zeros(shots, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef Py_ssize_t s, t, u_idx
    cdef int kind, a, b, aux, code, k
    cdef uint64_t x, z, one = 1
    cdef double r
    for s in range(shots):
        x = 0
        z = 0
        u_idx = 0
        for t in range(n_ops):
            kind = ops[t, 0]
            a = ops[t, 1]
            b = ops[t, 2]
            aux = ops[t, 3]
            if kind == 0:
                code = <int> (((x >> a) & 1) | (((z >> a) & 1) << 1))
                code = cliff_map[aux, code]
                x = (x & ~(one << a)) | ((<uint64_t> (code & 1)) << a)
                z = (z & ~(one << a)) | ((<uint64_t> ((code >> 1) & 1)) << a)
            elif kind == 1:
                if ((x >> a) ^ (x >> b)) & 1:
                    z ^= (one << a) | (one << b)
            else:
                r = uniforms[s, u_idx]
                u_idx += 1
                k = 0
                while r >= cum_tables[aux, k]:
                    k += 1
                if kind == 2:
                    x ^= (<uint64_t> (k & 1)) << a
                    z ^= (<uint64_t> ((k >> 1) & 1)) << a
                else:
                    x ^= ((<uint64_t> (k & 1)) << a) | ((<uint64_t> ((k >> 2) & 1)) << b)
                    z ^= ((<uint64_t> ((k >> 1) & 1)) << a) | ((<uint64_t> ((k >> 3) & 1)) << b)
        out[s] = x
    return out_arr
