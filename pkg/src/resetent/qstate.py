"""Dense multi-qubit operators and density matrices.

Basis states are bit strings ``s_1 ... s_N`` with qubit 1 the most
significant bit, and ``sigma_z |0> = +|0>``.  Operators are plain complex
``numpy`` arrays; :class:`DensityMatrix` wraps one with validation.  Qubit
indices in the public API are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
POSITIVITY_ATOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# (sigma_x +/- i sigma_y) / 2; sigma_+ takes |1> to |0>
SIGMA_PLUS = (SIGMA_X + 1j * SIGMA_Y) / 2
SIGMA_MINUS = (SIGMA_X - 1j * SIGMA_Y) / 2

PAULI = {
    "i": IDENTITY,
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "+": SIGMA_PLUS,
    "-": SIGMA_MINUS,
}

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


class StateError(ValueError):
    """Raised when an array is not a valid density matrix."""


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def tensor(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of ``factors`` in list order."""
    if len(factors) == 0:
        raise ValueError("tensor() needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def embed(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Place a single-qubit ``op`` on ``site`` (1-based) of ``n_qubits``."""
    if not 1 <= site <= n_qubits:
        raise ValueError(f"site {site} out of range 1..{n_qubits}")
    return tensor([op if k == site else IDENTITY for k in range(1, n_qubits + 1)])


def embed_pauli(which: str, site: int, n_qubits: int) -> np.ndarray:
    """Pauli or ladder operator ``which`` in {x, y, z, +, -} on one site."""
    key = which.lower()
    if key not in PAULI or key == "i":
        raise ValueError(f"unknown Pauli operator {which!r}")
    return embed(PAULI[key], site, n_qubits)


def pauli_word(word: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``"XZI"`` (one letter per qubit)."""
    return tensor([PAULI[c.lower()] for c in word])


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def check_density(data: np.ndarray) -> None:
    """Raise :class:`StateError` unless ``data`` is a valid density matrix."""
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise StateError(f"density matrix must be square, got shape {data.shape}")
    n_qubits_of(data.shape[0])
    herm = np.max(np.abs(data - data.conj().T))
    if herm > HERMITIAN_ATOL:
        raise StateError(f"not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(data)
    if abs(tr - 1) > TRACE_ATOL:
        raise StateError(f"trace is {tr:.12g}, expected 1")
    lam = np.linalg.eigvalsh((data + data.conj().T) / 2)[0]
    if lam < -POSITIVITY_ATOL:
        raise StateError(f"not positive semidefinite (min eigenvalue {lam:.3g})")


class DensityMatrix:
    """Validated, read-only density matrix on ``n_qubits`` qubits.

    Accepts a matrix, or a state vector which is turned into a projector.
    ``np.asarray(rho)`` gives the underlying array.
    """

    __slots__ = ("data", "n_qubits")

    def __init__(self, data, *, validate: bool = True):
        if isinstance(data, DensityMatrix):
            arr = data.data
        else:
            arr = np.array(data, dtype=complex)
            if arr.ndim == 1:
                arr = ket_to_dm(arr)
        if validate:
            check_density(arr)
        arr = np.array(arr, dtype=complex)
        arr.setflags(write=False)
        self.data = arr
        self.n_qubits = n_qubits_of(arr.shape[0])

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def validate(self) -> "DensityMatrix":
        check_density(self.data)
        return self

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    d = 2**n_qubits
    return DensityMatrix(np.eye(d) / d)


def product_state(states: Iterable) -> DensityMatrix:
    """Tensor product of single-qubit kets or 2x2 density matrices."""
    mats = []
    for s in states:
        s = np.asarray(s, dtype=complex)
        mats.append(ket_to_dm(s) if s.ndim == 1 else s)
    return DensityMatrix(tensor(mats))


def random_density_matrix(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random state from a Ginibre matrix (full rank unless ``rank`` given)."""
    d = 2**n_qubits
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def trace_distance(a, b) -> float:
    diff = np.asarray(a) - np.asarray(b)
    diff = (diff + diff.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


@dataclass(frozen=True)
class Bipartition:
    """Split of qubits ``1..n_qubits`` into ``members`` (side A) and the rest."""

    n_qubits: int
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(m) for m in self.members)))
        if not members:
            raise ValueError("side A of a bipartition must be nonempty")
        if len(members) >= self.n_qubits:
            raise ValueError("side A of a bipartition must be a proper subset")
        if members[0] < 1 or members[-1] > self.n_qubits:
            raise ValueError(f"qubit indices must lie in 1..{self.n_qubits}")
        object.__setattr__(self, "members", members)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(k for k in range(1, self.n_qubits + 1) if k not in self.members)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.n_qubits, self.complement)

    def canonical(self) -> "Bipartition":
        """Same split, with A chosen as the side not containing qubit N."""
        return self.swapped() if self.n_qubits in self.members else self


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the (1-based) qubits in ``keep``, in ascending order."""
    arr = np.asarray(rho)
    n = n_qubits_of(arr.shape[0])
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"qubit indices must lie in 1..{n}")
    drop = [k - 1 for k in range(1, n + 1) if k not in keep]
    kept = [k - 1 for k in keep]
    t = arr.reshape((2,) * (2 * n))
    t = np.transpose(t, kept + drop + [n + k for k in kept] + [n + k for k in drop])
    dk, dd = 2 ** len(kept), 2 ** len(drop)
    red = np.einsum("ajbj->ab", t.reshape(dk, dd, dk, dd))
    return DensityMatrix(red, validate=False)


def partial_transpose(rho, split: Bipartition) -> np.ndarray:
    """Transpose the row/column indices of the qubits on side A of ``split``."""
    arr = np.asarray(rho)
    n = n_qubits_of(arr.shape[0])
    if split.n_qubits != n:
        raise ValueError(f"bipartition is for {split.n_qubits} qubits, state has {n}")
    axes = list(range(2 * n))
    for k in split.members:
        axes[k - 1], axes[n + k - 1] = axes[n + k - 1], axes[k - 1]
    t = np.transpose(arr.reshape((2,) * (2 * n)), axes)
    return t.reshape(arr.shape).copy()
