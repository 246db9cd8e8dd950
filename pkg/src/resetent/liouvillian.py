"""Generator of the reset-augmented master equation.

``L rho = -i[H, rho] + L_noise rho + r sum_i (chi_i (x) tr_i rho - rho)``

The noise and reset terms act on one qubit at a time and are stored as
per-site tensors ``K[i, a', a, b', b]``.  The matrix-free action never forms
a ``4^N x 4^N`` object; the dense and sparse forms use column stacking,
``vec(rho)[r + d*c] = rho[r, c]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from . import kernels
from .models import HamiltonianSpec, ModelConfig, NoiseParams, ResetSpec
from .qstate import IDENTITY, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z

DENSE_MAX_QUBITS = 6
CHOI_ATOL = 1e-8
FULL_CHOI_MAX_QUBITS = 3


class CapacityError(RuntimeError):
    """The requested dense object would be too large."""


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(dim, dim, order="F")


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Local tensor of ``rho -> a rho b``."""
    return np.einsum("pq,uv->pvqu", a, b)


def dissipator(op: np.ndarray) -> np.ndarray:
    """Local tensor of ``L rho L^dag - {L^dag L, rho}/2``."""
    lhl = op.conj().T @ op
    return sandwich(op, op.conj().T) - 0.5 * sandwich(lhl, IDENTITY) - 0.5 * sandwich(IDENTITY, lhl)


def noise_tensor(noise) -> np.ndarray:
    """Single-site tensor of the noise channel for one qubit."""
    p: NoiseParams = noise.as_noise()
    k = p.B * (1 - p.s) * dissipator(SIGMA_MINUS) + p.B * p.s * dissipator(SIGMA_PLUS)
    k = k + (2 * p.C - p.B) / 4 * (sandwich(SIGMA_Z, SIGMA_Z) - sandwich(IDENTITY, IDENTITY))
    return k


def reset_tensor(r: float, chi: np.ndarray) -> np.ndarray:
    """Single-site tensor of ``r (chi tr(rho) - rho)``."""
    return r * (np.einsum("pv,qu->pvqu", chi, IDENTITY) - sandwich(IDENTITY, IDENTITY))


def local_tensors(config: ModelConfig, *, noise: bool = True, reset: bool = True) -> np.ndarray:
    n = config.n_qubits
    ks = np.zeros((n, 2, 2, 2, 2), dtype=complex)
    if noise:
        ks += noise_tensor(config.noise)
    if reset and config.reset.r != 0:
        for i, chi in enumerate(config.reset.site_states(n)):
            ks[i] += reset_tensor(config.reset.r, chi)
    return ks


class Liouvillian:
    """Superoperator of one model, usable matrix-free or assembled.

    Parameters select which parts of the generator are included, which the
    tests use to probe the Hamiltonian, noise and reset terms separately.
    """

    def __init__(self, config: ModelConfig, *, hamiltonian: bool = True, noise: bool = True, reset: bool = True):
        self.config = config
        self.n_qubits = config.n_qubits
        self.dim = 2**self.n_qubits
        h = config.hamiltonian.matrix() if hamiltonian else np.zeros((self.dim, self.dim), dtype=complex)
        self.diagonal_h = bool(config.hamiltonian.is_diagonal() or not hamiltonian)
        self.h = h
        self.h_diag = np.ascontiguousarray(np.real(np.diag(h))) if self.diagonal_h else None
        self.kops = local_tensors(config, noise=noise, reset=reset)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim**2, self.dim**2)

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got shape {rho.shape}")
        out = np.zeros_like(rho)
        if self.diagonal_h:
            kernels.diagonal_commutator(self.h_diag, rho, out)
        else:
            out += -1j * (self.h @ rho - rho @ self.h)
        kernels.local_action(rho, self.kops, out)
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return vec(self.apply(unvec(v, self.dim)))

    def linear_operator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.matvec, dtype=complex)

    def diagonal(self) -> np.ndarray:
        """Diagonal of the superoperator matrix (column-stacked order)."""
        d, n = self.dim, self.n_qubits
        hd = np.real(np.diag(self.h))
        diag = -1j * (hd[:, None] - hd[None, :])
        bits = (np.arange(d)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
        for i in range(n):
            kd = np.einsum("abab->ab", self.kops[i])
            diag = diag + kd[bits[:, i][:, None], bits[:, i][None, :]]
        return vec(diag)

    def sparse(self) -> sp.csr_matrix:
        """Sparse superoperator assembled from index arithmetic, without :meth:`apply`."""
        d, n = self.dim, self.n_qubits
        eye = sp.identity(d, dtype=complex, format="csr")
        hs = sp.csr_matrix(self.h)
        total = -1j * (sp.kron(eye, hs) - sp.kron(hs.T, eye))
        r_idx, c_idx = np.divmod(np.arange(d * d), d)[::-1]  # vec index k = r + d*c
        rows, cols, vals = [], [], []
        for i in range(n):
            sh = n - 1 - i
            ap, a = (r_idx >> sh) & 1, (c_idx >> sh) & 1
            r0, c0 = r_idx & ~(1 << sh), c_idx & ~(1 << sh)
            for bp in range(2):
                for b in range(2):
                    coef = self.kops[i][ap, a, bp, b]
                    keep = coef != 0
                    rows.append((r_idx + d * c_idx)[keep])
                    cols.append(((r0 | (bp << sh)) + d * (c0 | (b << sh)))[keep])
                    vals.append(coef[keep])
        local = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(d * d, d * d)
        )
        return (total + local.tocsr()).tocsr()

    def dense(self) -> np.ndarray:
        if self.n_qubits > DENSE_MAX_QUBITS:
            raise CapacityError(
                f"dense Liouvillian limited to {DENSE_MAX_QUBITS} qubits; use the matrix-free solvers"
            )
        return self.sparse().toarray()


def apply(config: ModelConfig, rho) -> np.ndarray:
    """``L rho`` for the model ``config``."""
    return Liouvillian(config).apply(rho)


def assemble_dense(config: ModelConfig) -> np.ndarray:
    """Dense ``4^N x 4^N`` matrix with ``L @ vec(rho) = vec(apply(config, rho))``."""
    if config.n_qubits > DENSE_MAX_QUBITS:
        raise CapacityError(f"dense Liouvillian limited to {DENSE_MAX_QUBITS} qubits; use the matrix-free solvers")
    return Liouvillian(config).dense()


def choi_matrix(propagator: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` of a column-stacked superoperator."""
    d = int(round(np.sqrt(propagator.shape[0])))
    p4 = propagator.reshape(d, d, d, d)  # [l, k, j, i] with row k + d*l, column i + d*j
    return p4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def default_dt(config: ModelConfig) -> float:
    p = config.noise.as_noise()
    scale = max(abs(config.hamiltonian.g), abs(p.B), abs(p.C), abs(config.reset.r), 1.0)
    return 1e-3 / scale


@dataclass
class LindbladCheck:
    ok: bool
    min_choi_eigenvalue: float
    dt: float
    checked: int
    method: str

    def __bool__(self) -> bool:
        return self.ok


def _min_choi_eig(superop: np.ndarray, dt: float) -> float:
    choi = choi_matrix(scipy.linalg.expm(superop * dt))
    return float(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0])


def _check_one(config: ModelConfig, dt: float | None) -> tuple[float, float, str]:
    dt = default_dt(config) if dt is None else dt
    if config.n_qubits <= FULL_CHOI_MAX_QUBITS:
        return _min_choi_eig(assemble_dense(config), dt), dt, "full"
    # The unitary part is always CP and the local terms act on disjoint sites,
    # so checking each single-site generator is equivalent.
    worst = np.inf
    for k in local_tensors(config):
        # column-stacked single-qubit matrix: row a' + 2a, column b' + 2b
        superop = k.transpose(1, 0, 3, 2).reshape(4, 4)
        worst = min(worst, _min_choi_eig(superop, dt))
    return worst, dt, "per-site"


def random_config(rng: np.random.Generator, max_qubits: int = 2) -> ModelConfig:
    """Random valid model: real Pauli Hamiltonian, general noise, mixed reset."""
    n = int(rng.integers(1, max_qubits + 1))
    words = ["".join(rng.choice(list("IXYZ"), size=n)) for _ in range(3)]
    terms = tuple((float(rng.normal()), w) for w in words)
    b = float(rng.uniform(0, 2))
    c = float(rng.uniform(b / 2, b / 2 + 2))
    noise = NoiseParams(B=b, C=c, s=float(rng.uniform(0, 1)))
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    q = float(rng.uniform(0.5, 1))
    chi = q * np.outer(psi, psi.conj()) + (1 - q) * np.eye(2) / 2
    return ModelConfig(n, HamiltonianSpec(n, terms, float(rng.uniform(0, 3))), noise, ResetSpec(float(rng.uniform(0, 3)), chi))


def check_lindblad(
    config: ModelConfig | None = None,
    dt: float | None = None,
    trials: int = 1,
    rng: np.random.Generator | None = None,
) -> LindbladCheck:
    """Numerically test complete positivity of ``exp(L dt)`` via its Choi matrix.

    With ``config=None`` the check runs over ``trials`` random valid models.
    Returns a truthy :class:`LindbladCheck`; never raises for a failed check.
    """
    if config is not None:
        configs = [config]
    else:
        rng = np.random.default_rng() if rng is None else rng
        configs = [random_config(rng) for _ in range(trials)]
    worst, used_dt, method = np.inf, 0.0, "full"
    for cfg in configs:
        m, step, how = _check_one(cfg, dt)
        if m < worst:
            worst, used_dt, method = m, step, how
    return LindbladCheck(bool(worst >= -CHOI_ATOL), worst, used_dt, len(configs), method)
