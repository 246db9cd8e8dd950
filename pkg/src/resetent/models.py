"""Model definitions: Hamiltonians, noise channels and reset channels.

All rates share one unit.  The sweep tools fix the dephasing rate (or the
reference rate of a general noise channel) to 1, so ``g`` and ``r`` are
then the dimensionless ratios ``g/gamma`` and ``r/gamma``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .qstate import KET_0, KET_1, KET_MINUS, KET_PLUS, StateError, check_density, ket_to_dm, pauli_word

HERMITIAN_ATOL = 1e-12

NAMED_KETS = {"0": KET_0, "1": KET_1, "+": KET_PLUS, "-": KET_MINUS}


class ValidationError(ValueError):
    """A model invariant is violated; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class NoiseParams:
    """General single-qubit noise channel.

    ``B`` is the inversion decay rate, ``C`` the polarization decay rate and
    ``s`` the asymptotic population of ``|0>`` (``s = 1/2`` is infinite
    temperature).
    """

    B: float
    C: float
    s: float = 0.5

    def as_noise(self) -> "NoiseParams":
        return self


@dataclass(frozen=True)
class DephasingParams:
    """Pure dephasing at rate ``gamma``: ``gamma/2 (Z rho Z - rho)`` per qubit."""

    gamma: float

    def as_noise(self) -> NoiseParams:
        return NoiseParams(B=0.0, C=self.gamma, s=0.5)


Noise = Union[NoiseParams, DephasingParams]


def reset_state(chi) -> np.ndarray:
    """Normalize a reset-state description to a 2x2 density matrix.

    Accepts a name (``"0"``, ``"1"``, ``"+"``, ``"-"``), a ket, or a matrix.
    """
    if isinstance(chi, str):
        if chi not in NAMED_KETS:
            raise ValueError(f"unknown reset state {chi!r}")
        return ket_to_dm(NAMED_KETS[chi])
    arr = np.asarray(chi, dtype=complex)
    if arr.shape == (2,):
        return ket_to_dm(arr)
    return arr


def mixed_reset_state(name: str, fidelity: float) -> np.ndarray:
    """``fidelity |psi><psi| + (1 - fidelity) |psi_perp><psi_perp|``."""
    perp = {"0": "1", "1": "0", "+": "-", "-": "+"}[name]
    return fidelity * reset_state(name) + (1 - fidelity) * reset_state(perp)


@dataclass(frozen=True, eq=False)
class ResetSpec:
    """Reset at rate ``r`` to ``chi`` on every site, unless ``per_site`` overrides."""

    r: float
    chi: object = "+"
    per_site: tuple | None = None

    def site_states(self, n_qubits: int) -> list[np.ndarray]:
        if self.per_site is not None:
            if len(self.per_site) != n_qubits:
                raise ValueError(f"{len(self.per_site)} per-site states given for {n_qubits} qubits")
            return [reset_state(c) for c in self.per_site]
        return [reset_state(self.chi)] * n_qubits

    def _key(self):
        sites = None if self.per_site is None else [reset_state(c) for c in self.per_site]
        return self.r, reset_state(self.chi), sites

    def __eq__(self, other):
        if not isinstance(other, ResetSpec):
            return NotImplemented
        (r1, c1, s1), (r2, c2, s2) = self._key(), other._key()
        if r1 != r2 or not np.array_equal(c1, c2) or (s1 is None) != (s2 is None):
            return False
        return s1 is None or (len(s1) == len(s2) and all(np.array_equal(a, b) for a, b in zip(s1, s2)))

    __hash__ = None


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H = g * sum_k coef_k * word_k`` with Pauli words like ``"ZZI"``."""

    n_qubits: int
    terms: tuple[tuple[float, str], ...]
    g: float = 1.0

    def matrix(self) -> np.ndarray:
        d = 2**self.n_qubits
        h = np.zeros((d, d), dtype=complex)
        for coef, word in self.terms:
            h += coef * pauli_word(word)
        return self.g * h

    def is_diagonal(self) -> bool:
        return all(set(word.upper()) <= {"I", "Z"} for _, word in self.terms)

    def with_coupling(self, g: float) -> "HamiltonianSpec":
        return replace(self, g=g)


@dataclass(frozen=True)
class ModelConfig:
    n_qubits: int
    hamiltonian: HamiltonianSpec
    noise: Noise
    reset: ResetSpec = field(default_factory=lambda: ResetSpec(0.0))

    def with_rates(self, g: float | None = None, r: float | None = None) -> "ModelConfig":
        cfg = self
        if g is not None:
            cfg = replace(cfg, hamiltonian=cfg.hamiltonian.with_coupling(g))
        if r is not None:
            cfg = replace(cfg, reset=replace(cfg.reset, r=r))
        return cfg


def _word(n_qubits: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(k, "I") for k in range(1, n_qubits + 1))


def _check_pairs(pairs, n_qubits):
    seen = set()
    for i, j in pairs:
        if not (1 <= i <= n_qubits and 1 <= j <= n_qubits) or i == j:
            raise ValueError(f"invalid qubit pair ({i}, {j}) for {n_qubits} qubits")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate qubit pair {key}")
        seen.add(key)


def all_pairs(n_qubits: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n_qubits + 1), 2))


def ising(g: float, pairs: Sequence[tuple[int, int]] | None, n_qubits: int) -> HamiltonianSpec:
    """``g sum_(i,j) Z_i Z_j`` over ``pairs`` (all pairs when ``None``)."""
    pairs = all_pairs(n_qubits) if pairs is None else [tuple(p) for p in pairs]
    _check_pairs(pairs, n_qubits)
    terms = tuple((1.0, _word(n_qubits, {i: "Z", j: "Z"})) for i, j in pairs)
    return HamiltonianSpec(n_qubits, terms, g)


def heisenberg(g: float) -> HamiltonianSpec:
    """Two-qubit isotropic exchange ``g (XX + YY + ZZ)``."""
    return HamiltonianSpec(2, ((1.0, "XX"), (1.0, "YY"), (1.0, "ZZ")), g)


def xyz_field(g: float) -> HamiltonianSpec:
    """Anisotropic XYZ coupling with a transverse field on both qubits."""
    return HamiltonianSpec(2, ((0.7, "XX"), (0.3, "YY"), (1.0, "ZZ"), (0.5, "XI"), (0.5, "IX")), g)


def xx_coupling(g: float) -> HamiltonianSpec:
    return HamiltonianSpec(2, ((1.0, "XX"),), g)


def validate(config: ModelConfig) -> ModelConfig:
    """Return ``config`` unchanged, or raise :class:`ValidationError`."""
    n = config.n_qubits
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError("system.n_qubits", f"must be a positive integer, got {n!r}")
    _validate_hamiltonian(config.hamiltonian, n)
    _validate_noise(config.noise)
    _validate_reset(config.reset, n)
    return config


def _validate_hamiltonian(h: HamiltonianSpec, n: int) -> None:
    if h.n_qubits != n:
        raise ValidationError("hamiltonian.n_qubits", f"{h.n_qubits} does not match system size {n}")
    if not np.isfinite(h.g) or h.g < 0:
        raise ValidationError("hamiltonian.g", f"coupling must be >= 0, got {h.g}")
    for k, (coef, word) in enumerate(h.terms):
        if isinstance(coef, complex) or np.iscomplexobj(coef):
            raise ValidationError(f"hamiltonian.terms[{k}]", "coefficients must be real")
        if len(word) != n or not set(word.upper()) <= set("IXYZ"):
            raise ValidationError(f"hamiltonian.terms[{k}]", f"bad Pauli word {word!r} for {n} qubits")
    mat = h.matrix()
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITIAN_ATOL:
        raise ValidationError("hamiltonian", "matrix is not Hermitian")


def _validate_noise(noise: Noise) -> None:
    if isinstance(noise, DephasingParams):
        if not noise.gamma >= 0:
            raise ValidationError("noise.gamma", f"must be >= 0, got {noise.gamma}")
        return
    if not isinstance(noise, NoiseParams):
        raise ValidationError("noise", f"unsupported noise type {type(noise).__name__}")
    if not noise.B >= 0:
        raise ValidationError("noise.B", f"must be >= 0, got {noise.B}")
    if not noise.C >= 0:
        raise ValidationError("noise.C", f"must be >= 0, got {noise.C}")
    if not 0 <= noise.s <= 1:
        raise ValidationError("noise.s", f"must lie in [0, 1], got {noise.s}")
    if 2 * noise.C < noise.B:
        raise ValidationError("noise.C", f"2C >= B violated (B={noise.B}, C={noise.C})")


def _validate_reset(reset: ResetSpec, n: int) -> None:
    if not reset.r >= 0:
        raise ValidationError("reset.r", f"must be >= 0, got {reset.r}")
    try:
        states = reset.site_states(n)
    except ValueError as exc:
        raise ValidationError("reset.per_site", str(exc)) from exc
    for k, chi in enumerate(states):
        if chi.shape != (2, 2):
            raise ValidationError(f"reset.chi[{k}]", f"expected a single-qubit state, got shape {chi.shape}")
        try:
            check_density(chi)
        except StateError as exc:
            raise ValidationError(f"reset.chi[{k}]", str(exc)) from exc


# Presets used by the CLI and the acceptance tests.


def two_qubit_ising(g: float, gamma: float, r: float, chi="+") -> ModelConfig:
    """Ising coupling, pure dephasing and reset on two qubits."""
    return ModelConfig(2, ising(g, [(1, 2)], 2), DephasingParams(gamma), ResetSpec(r, chi))


def pairwise_ising(n_qubits: int, g: float, gamma: float, r: float, chi="+") -> ModelConfig:
    """Permutation-symmetric all-pairs Ising model with dephasing and reset."""
    return ModelConfig(n_qubits, ising(g, None, n_qubits), DephasingParams(gamma), ResetSpec(r, chi))


def xyz_preset(r: float, s: float, g: float = 10.0, polarization_rate: float = 1.0, chi="+") -> ModelConfig:
    """XYZ + field model with general noise at ``C = polarization_rate``, ``B = 2C``."""
    c = polarization_rate
    return ModelConfig(2, xyz_field(g), NoiseParams(B=2 * c, C=c, s=s), ResetSpec(r, chi))


def decay_preset(g: float, s: float = 1.0, gamma: float = 1.0, r: float = 0.0) -> ModelConfig:
    """``g XX`` coupling with a decay channel ``B/2 = C = gamma``."""
    return ModelConfig(2, xx_coupling(g), NoiseParams(B=2 * gamma, C=gamma, s=s), ResetSpec(r, "+"))
