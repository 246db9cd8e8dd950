"""Hot loops of the matrix-free Liouvillian.

Every non-Hamiltonian term of the master equation (noise channel and reset
channel) acts on one qubit at a time, so its action on a density matrix is a
contraction of a 2x2x2x2 local superoperator against the row and column bit
of that site.  Two interchangeable implementations live here: a numba
``@njit`` loop over matrix entries and a pure-numpy tensordot path.

The numba path is used when numba imports and the environment variable
``RESETENT_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are always
importable so they can be compared against each other.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("RESETENT_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by RESETENT_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def local_action_numpy(rho: np.ndarray, kops: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Add ``sum_i K_i(rho)`` to ``out`` using tensordot.

    ``kops[i, a', a, b', b]`` maps entry ``(b', b)`` of site ``i`` to entry
    ``(a', a)``.  Site 0 is the most significant bit.
    """
    n = kops.shape[0]
    t = rho.reshape((2,) * (2 * n))
    acc = np.zeros_like(t)
    for i in range(n):
        # contracted axes go to the front, then land back at (i, n + i)
        moved = np.tensordot(kops[i], t, axes=([2, 3], [i, n + i]))
        acc += np.moveaxis(moved, [0, 1], [i, n + i])
    out += acc.reshape(rho.shape)
    return out


def diagonal_commutator_numpy(h: np.ndarray, rho: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Add ``-i[H, rho]`` for diagonal ``H = diag(h)``."""
    out += -1j * (h[:, None] - h[None, :]) * rho
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _local_action_nb(rho, kops, out):  # pragma: no cover - compiled
        n = kops.shape[0]
        d = rho.shape[0]
        for row in range(d):
            for col in range(d):
                acc = 0j
                for i in range(n):
                    sh = n - 1 - i
                    ap = (row >> sh) & 1
                    a = (col >> sh) & 1
                    r0 = row & ~(1 << sh)
                    c0 = col & ~(1 << sh)
                    for bp in range(2):
                        rr = r0 | (bp << sh)
                        for b in range(2):
                            acc += kops[i, ap, a, bp, b] * rho[rr, c0 | (b << sh)]
                out[row, col] += acc
        return out

    @njit(cache=True)
    def _diagonal_commutator_nb(h, rho, out):  # pragma: no cover - compiled
        d = rho.shape[0]
        for row in range(d):
            for col in range(d):
                out[row, col] += -1j * (h[row] - h[col]) * rho[row, col]
        return out

    def local_action_numba(rho, kops, out):
        return _local_action_nb(np.ascontiguousarray(rho), np.ascontiguousarray(kops), out)

    def diagonal_commutator_numba(h, rho, out):
        return _diagonal_commutator_nb(np.ascontiguousarray(h), np.ascontiguousarray(rho), out)

    local_action = local_action_numba
    diagonal_commutator = diagonal_commutator_numba
else:
    local_action_numba = None
    diagonal_commutator_numba = None
    local_action = local_action_numpy
    diagonal_commutator = diagonal_commutator_numpy
