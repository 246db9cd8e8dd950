"""Negativity-based entanglement measures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .qstate import Bipartition, DensityMatrix, partial_trace, partial_transpose


def _pt_eigenvalues(rho, split: Bipartition) -> np.ndarray:
    pt = partial_transpose(rho, split)
    return np.linalg.eigvalsh((pt + pt.conj().T) / 2)


def negativity(rho, split: Bipartition | None = None) -> float:
    """``(||rho^T_A||_1 - 1) / 2``; defaults to the split {1} | rest."""
    if split is None:
        split = Bipartition(np.asarray(rho).shape[0].bit_length() - 1, (1,))
    lam = _pt_eigenvalues(rho, split)
    return max(0.0, (float(np.abs(lam).sum()) - 1) / 2)


def negativity_from_negative_eigenvalues(rho, split: Bipartition) -> float:
    """Same quantity as :func:`negativity`, from the negative spectrum only."""
    lam = _pt_eigenvalues(rho, split)
    return max(0.0, -float(lam[lam < 0].sum()))


def enumerate_bipartitions(n_qubits: int) -> list[Bipartition]:
    """All ``2^(N-1) - 1`` unordered splits; side A never contains qubit N."""
    if n_qubits < 2:
        raise ValueError("bipartitions need at least two qubits")
    others = range(1, n_qubits)
    return [
        Bipartition(n_qubits, members)
        for k in range(1, n_qubits)
        for members in itertools.combinations(others, k)
    ]


def average_negativity(rho) -> float:
    """Arithmetic mean of the negativity over all bipartitions."""
    n = np.asarray(rho).shape[0].bit_length() - 1
    splits = enumerate_bipartitions(n)
    return float(np.mean([negativity(rho, s) for s in splits]))


def reduced_pair(rho, i: int, j: int) -> DensityMatrix:
    """Two-qubit reduced state of qubits ``i`` and ``j`` (in ascending order)."""
    if i == j:
        raise ValueError("reduced_pair needs two distinct qubits")
    return partial_trace(rho, {i, j})


@dataclass(frozen=True)
class MixtureSpec:
    """Poisson(lambda) weights truncated to ``n_min..n_max`` and renormalized."""

    lam: float = 4.0
    n_min: int = 2
    n_max: int = 6
    weights: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"Poisson mean must be positive, got {self.lam}")
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        ns = range(self.n_min, self.n_max + 1)
        # log-space pmf; the common factor exp(-lambda) drops out
        logs = {n: n * math.log(self.lam) - math.lgamma(n + 1) for n in ns}
        top = max(logs.values())
        raw = {n: math.exp(v - top) for n, v in logs.items()}
        total = sum(raw.values())
        object.__setattr__(self, "weights", {n: w / total for n, w in raw.items()})


def poisson_mixture(states: Mapping[int, object], spec: MixtureSpec) -> DensityMatrix:
    """``sum_N p_N rho^(N)`` for two-qubit states indexed by particle number."""
    missing = [n for n in spec.weights if n not in states]
    if missing:
        raise ValueError(f"missing states for N = {missing}")
    mix = sum(p * np.asarray(states[n]) for n, p in spec.weights.items())
    if mix.shape != (4, 4):
        raise ValueError("poisson_mixture expects two-qubit states")
    return DensityMatrix(mix)
