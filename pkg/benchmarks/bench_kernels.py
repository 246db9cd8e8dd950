"""Compare the numba and numpy backends of the generator kernels.

Usage: python3 benchmarks/bench_kernels.py [--max-qubits 8] [--repeat 20]
"""

import argparse
import time

import numpy as np

from resetent import kernels
from resetent.liouvillian import Liouvillian
from resetent.models import pairwise_ising
from resetent.qstate import random_density_matrix


def best_of(fn, repeat):
    fn()  # warm-up, triggers JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-qubits", type=int, default=3)
    parser.add_argument("--max-qubits", type=int, default=7)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; only the numpy backend can be timed")
    rng = np.random.default_rng(0)
    print(f"{'N':>2} {'kernel':>13} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for n in range(args.min_qubits, args.max_qubits + 1):
        liou = Liouvillian(pairwise_ising(n, 5.0, 1.0, 10.0))
        rho = random_density_matrix(n, rng).data.astype(complex)
        out = np.zeros_like(rho)
        cases = {
            "local_action": (kernels.local_action_numpy, getattr(kernels, "local_action_numba", None),
                             (rho, liou.kops, out)),
            "commutator": (kernels.diagonal_commutator_numpy, getattr(kernels, "diagonal_commutator_numba", None),
                           (liou.h_diag, rho, out)),
        }
        for name, (np_fn, nb_fn, fargs) in cases.items():
            t_np = best_of(lambda: np_fn(*fargs), args.repeat)
            if nb_fn is not None and kernels.HAVE_NUMBA:
                t_nb = best_of(lambda: nb_fn(*fargs), args.repeat)
                print(f"{n:>2} {name:>13} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.2f}")
            else:
                print(f"{n:>2} {name:>13} {1e3 * t_np:11.3f} {'-':>11} {'-':>8}")
        t_apply = best_of(lambda: liou.apply(rho), args.repeat)
        print(f"{n:>2} {'apply (' + kernels.BACKEND + ')':>13} {1e3 * t_apply:11.3f}")


if __name__ == "__main__":
    main()
