"""Benchmark the fault-propagation kernel: compiled extension vs pure numpy.

Runs the same compiled fault program through both kernel implementations on
identical pre-drawn uniform blocks and reports shots/second plus speedup.

Usage:
    python benchmarks/bench_fault_kernel.py [--n 10] [--length 16]
                                            [--shots 200000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from mirrorbench import _fault_py
from mirrorbench.channels import Depolarizing, StochasticPauli
from mirrorbench.circuits import build_mirror_circuit, mirror_circuit_spec
from mirrorbench.simulator import (
    _CLIFF_CODE_MAP,
    NoiseModel,
    compile_fault_program,
)

try:
    from mirrorbench import _fault_cy
except ImportError:
    _fault_cy = None


def bench_kernel(kernel, program, uniforms, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = kernel.propagate(program.ops, program.cum_tables,
                                  _CLIFF_CODE_MAP, program.n_qubits, uniforms)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--length", type=int, default=16)
    parser.add_argument("--shots", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    spec = mirror_circuit_spec(args.seed, args.n, args.length)
    circuit = build_mirror_circuit(spec)
    noise = NoiseModel(
        two_qubit=Depolarizing(0.01),
        single_qubit=StochasticPauli((0.001, 0.001, 0.001)),
    )
    program = compile_fault_program(circuit, noise)
    uniforms = rng.random((args.shots, program.n_faults))

    print(f"n={args.n} L={args.length} shots={args.shots} "
          f"faults/shot={program.n_faults} ops={len(program.ops)}")

    t_py, out_py = bench_kernel(_fault_py, program, uniforms, args.repeat)
    print(f"python kernel: {t_py:8.3f} s   {args.shots / t_py:12,.0f} shots/s")

    if _fault_cy is None:
        print("cython kernel: not built (run pip install -e . to compile)")
        return

    t_cy, out_cy = bench_kernel(_fault_cy, program, uniforms, args.repeat)
    print(f"cython kernel: {t_cy:8.3f} s   {args.shots / t_cy:12,.0f} shots/s")
    if not np.array_equal(out_py, out_cy):
        raise SystemExit("kernel outputs disagree")
    print(f"outputs identical; speedup {t_py / t_cy:.1f}x")


if __name__ == "__main__":
    main()
