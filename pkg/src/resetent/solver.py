"""Steady states, time evolution and spectra of the master equation."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import LinearOperator, gmres, splu

from .liouvillian import Liouvillian, unvec, vec
from .models import ModelConfig
from .qstate import DensityMatrix, maximally_mixed

log = logging.getLogger(__name__)

# largest system the automatic dispatcher sends to the dense eigensolver
DENSE_AUTO_MAX_QUBITS = 5
NULL_RTOL = 1e-9
INTEGRATOR_RTOL = 1e-10
INTEGRATOR_ATOL = 1e-13


class SolverError(RuntimeError):
    """No steady state could be extracted."""


class IntegrationError(SolverError):
    """The ODE integrator failed."""


class ConvergenceTimeout(SolverError):
    """Propagation hit ``t_max`` before the residual reached tolerance."""

    def __init__(self, message: str, residual: float, state: DensityMatrix):
        super().__init__(message)
        self.residual = residual
        self.state = state


@dataclass
class SteadyStateResult:
    state: DensityMatrix
    residual: float
    unique: bool | None
    spectral_gap: float | None = None
    method: str = ""


def _as_state(mat: np.ndarray) -> np.ndarray:
    mat = (mat + mat.conj().T) / 2
    return mat / np.trace(mat).real


def _residual(liou: Liouvillian, rho: np.ndarray) -> float:
    return float(np.linalg.norm(liou.apply(rho)))


def _scale(liou: Liouvillian) -> float:
    """Rough magnitude of the generator, for relative tolerances."""
    h = np.abs(np.linalg.eigvalsh(liou.h)).max(initial=0.0) if liou.dim <= 256 else np.abs(liou.h).sum(axis=1).max()
    return max(1.0, 2 * h + np.abs(liou.kops).sum(axis=(1, 2)).max(initial=0.0) * liou.n_qubits)


def steady_state_dense(config: ModelConfig, tol: float = 1e-10) -> SteadyStateResult:
    """Null vector of the dense Liouvillian via full eigendecomposition.

    ``tol`` bounds the residual ``||L rho||_F`` relative to the generator
    scale.  For a degenerate null space the orthogonal projection of the
    maximally mixed state onto it is returned with ``unique=False``.
    """
    liou = Liouvillian(config)
    mat = liou.dense()
    w, v = np.linalg.eig(mat)
    scale = max(1.0, float(np.abs(w).max()))
    null = np.abs(w) <= NULL_RTOL * scale
    if not null.any():
        raise SolverError(f"no eigenvalue within {NULL_RTOL * scale:.3g} of zero (smallest {np.abs(w).min():.3g})")
    rest = w[~null]
    gap = float(-rest.real.max()) if rest.size else None
    if null.sum() == 1:
        rho = unvec(v[:, int(np.argmin(np.abs(w)))], liou.dim)
        unique = True
    else:
        # orthonormal basis of the numerical null space from the SVD
        _, sv, vh = np.linalg.svd(mat)
        basis = vh[-int(null.sum()) :].conj().T
        mixed = vec(np.eye(liou.dim) / liou.dim)
        rho = unvec(basis @ (basis.conj().T @ mixed), liou.dim)
        unique = False
    rho = _as_state(rho)
    res = _residual(liou, rho)
    if res > tol * scale:
        raise SolverError(f"steady-state residual {res:.3g} above tolerance {tol * scale:.3g}")
    return SteadyStateResult(DensityMatrix(rho), res, unique, gap, "dense-eig")


def steady_state_lu(config: ModelConfig) -> SteadyStateResult:
    """Sparse LU on the Liouvillian with one population row replaced by the trace.

    Cross-check for :func:`steady_state_dense`; assumes a unique steady state.
    """
    liou = Liouvillian(config)
    d = liou.dim
    mat = liou.sparse().tolil()
    # the trace row is a combination of the population rows, so row 0 is redundant
    mat[0, :] = 0
    mat[0, np.arange(d) * (d + 1)] = 1
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1
    x = splu(mat.tocsc()).solve(rhs)
    rho = _as_state(unvec(x, d))
    return SteadyStateResult(DensityMatrix(rho), _residual(liou, rho), True, None, "sparse-lu")


def steady_state_krylov(config: ModelConfig, tol: float = 1e-10, maxiter: int = 2000) -> SteadyStateResult:
    """Matrix-free steady state from GMRES on ``x -> L x + w tr(x)``.

    With ``tr(w) != 0`` this map is invertible whenever the steady state is
    unique, and ``rho_ss`` solves it with right-hand side ``w``.  A Jacobi
    preconditioner from the diagonal of ``L`` is used.
    """
    liou = Liouvillian(config)
    d = liou.dim
    scale = _scale(liou)
    w = vec(np.eye(d) / d) * scale
    diag_idx = np.arange(d) * (d + 1)

    def mv(x):
        return liou.matvec(x) + w * x[diag_idx].sum()

    pdiag = liou.diagonal()
    pdiag[diag_idx] += w[diag_idx]
    small = np.abs(pdiag) < 1e-12 * scale
    pdiag[small] = scale
    op = LinearOperator((d * d, d * d), matvec=mv, dtype=complex)
    pre = LinearOperator((d * d, d * d), matvec=lambda x: x / pdiag, dtype=complex)
    x0 = vec(np.eye(d) / d)
    x, info = gmres(op, w, x0=x0, M=pre, rtol=tol * 1e-2, atol=0.0, restart=200, maxiter=maxiter)
    rho = _as_state(unvec(x, d))
    res = _residual(liou, rho)
    if res > tol * scale:
        raise SolverError(f"GMRES stopped (info={info}) with residual {res:.3g} > {tol * scale:.3g}")
    return SteadyStateResult(DensityMatrix(rho, validate=True), res, None, None, "krylov")


def _rhs(liou: Liouvillian):
    d = liou.dim

    def f(_t, y):
        return vec(liou.apply(unvec(y, d)))

    return f


def _integrate(liou: Liouvillian, y0: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        return y0.copy()
    sol = solve_ivp(
        _rhs(liou), (0.0, t), y0, method="DOP853", rtol=INTEGRATOR_RTOL, atol=INTEGRATOR_ATOL, dense_output=False
    )
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    return sol.y[:, -1]


def propagate(config: ModelConfig, rho0, t: float) -> DensityMatrix:
    """``exp(L t) rho0`` by adaptive 8th-order Runge-Kutta (DOP853)."""
    if t < 0:
        raise ValueError("propagation time must be >= 0")
    liou = Liouvillian(config)
    y = _integrate(liou, vec(np.asarray(rho0, dtype=complex)), float(t))
    return DensityMatrix(unvec(y, liou.dim), validate=False)


def default_t_max(config: ModelConfig) -> float:
    """About 100 relaxation times of the slowest local decay process."""
    p = config.noise.as_noise()
    rates = [config.reset.r, p.B, p.C]
    positive = [x for x in rates if x > 0]
    return 100.0 / min(positive) if positive else 1e4


def steady_state_evolve(
    config: ModelConfig,
    rho0=None,
    tol: float = 1e-10,
    t_max: float | None = None,
    chunk: float | None = None,
) -> SteadyStateResult:
    """Propagate until ``||L rho||_F <= tol`` (checked between chunks)."""
    liou = Liouvillian(config)
    t_max = default_t_max(config) if t_max is None else t_max
    rho = maximally_mixed(config.n_qubits).data if rho0 is None else np.asarray(rho0, dtype=complex)
    if chunk is None:
        chunk = t_max / 100
    y = vec(rho)
    t = 0.0
    res = _residual(liou, unvec(y, liou.dim))
    while res > tol:
        if t >= t_max:
            state = DensityMatrix(_as_state(unvec(y, liou.dim)), validate=False)
            raise ConvergenceTimeout(f"no convergence by t={t_max:g} (residual {res:.3g})", res, state)
        step = min(chunk, t_max - t)
        y = _integrate(liou, y, step)
        t += step
        res = _residual(liou, unvec(y, liou.dim))
        log.debug("t=%g residual=%.3g", t, res)
    rho = _as_state(unvec(y, liou.dim))
    return SteadyStateResult(DensityMatrix(rho), _residual(liou, rho), None, None, "evolve")


def steady_state(config: ModelConfig, tol: float = 1e-10) -> SteadyStateResult:
    """Dense eigensolver up to ``DENSE_AUTO_MAX_QUBITS`` qubits, matrix-free beyond."""
    if config.n_qubits <= DENSE_AUTO_MAX_QUBITS:
        return steady_state_dense(config, tol)
    try:
        return steady_state_krylov(config, tol)
    except SolverError as exc:
        log.info("Krylov solve failed (%s); falling back to propagation", exc)
        return steady_state_evolve(config, tol=tol * _scale(Liouvillian(config)))


def spectrum(config: ModelConfig) -> np.ndarray:
    """All ``4^N`` Liouvillian eigenvalues, real part descending."""
    w = scipy.linalg.eigvals(Liouvillian(config).dense())
    return sort_spectrum(w)


def sort_spectrum(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    order = np.lexsort((np.round(w.imag, 9), -np.round(w.real, 9)))
    return w[order]


def spectral_gap(eigenvalues: np.ndarray, atol: float = 1e-9) -> float:
    """Smallest ``|Re|`` among eigenvalues away from zero."""
    w = np.asarray(eigenvalues)
    nonzero = w[np.abs(w) > atol]
    return float(np.abs(nonzero.real).min()) if nonzero.size else 0.0
