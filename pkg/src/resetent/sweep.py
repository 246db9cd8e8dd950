"""Parameter sweeps, entanglement boundaries and figure data.

Rates are expressed in units of the noise rate: ``gamma`` for dephasing,
the reference rate 1 for a general noise channel.  Every function takes
dimensionless ``g/gamma`` and ``r/gamma`` values.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import analytic2q
from .entanglement import MixtureSpec, average_negativity, negativity, poisson_mixture, reduced_pair
from .models import DephasingParams, ModelConfig, pairwise_ising, xyz_preset
from .solver import SolverError, steady_state, steady_state_dense, steady_state_krylov

ENTANGLED_ATOL = 1e-9
BISECT_RTOL = 1e-6


def parse_range(text: str, default_scale: str = "log") -> np.ndarray:
    """``lo:hi:steps[:log|lin]`` to a strictly increasing grid."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"range {text!r} must look like lo:hi:steps[:log|lin]")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    scale = parts[3] if len(parts) == 4 else default_scale
    if steps < 1:
        raise ValueError("a grid needs at least one point")
    if steps == 1:
        return np.array([lo])
    if not hi > lo:
        raise ValueError(f"range {text!r} must have hi > lo")
    if scale == "log":
        if lo <= 0:
            raise ValueError("log-spaced ranges need lo > 0")
        return np.geomspace(lo, hi, steps)
    if scale == "lin":
        return np.linspace(lo, hi, steps)
    raise ValueError(f"unknown spacing {scale!r}")


def gamma_unit(config: ModelConfig) -> float:
    if isinstance(config.noise, DephasingParams) and config.noise.gamma > 0:
        return config.noise.gamma
    return 1.0


def at_point(config: ModelConfig, g_t: float, r_t: float) -> ModelConfig:
    unit = gamma_unit(config)
    return config.with_rates(g=g_t * unit, r=r_t * unit)


@dataclass
class Row:
    g_over_gamma: float
    r_over_gamma: float
    negativity: float
    avg_negativity: float | None
    residual: float
    wall_time_s: float

    @property
    def failed(self) -> bool:
        return math.isnan(self.negativity)


def measure(config: ModelConfig, tol: float = 1e-10, method: str = "auto") -> tuple[float, float | None, float]:
    """Steady-state (pair) negativity, average negativity, residual.

    For more than two qubits ``negativity`` is that of the reduced state of
    qubits 1 and 2.
    """
    res = _solve(config, tol, method)
    rho = res.state
    if config.n_qubits == 2:
        return negativity(rho), None, res.residual
    return negativity(reduced_pair(rho, 1, 2)), average_negativity(rho), res.residual


def _solve(config, tol, method):
    if method == "dense":
        return steady_state_dense(config, tol)
    if method == "krylov":
        return steady_state_krylov(config, tol)
    return steady_state(config, tol)


def _point(args, config: ModelConfig, tol: float, method: str) -> Row:
    g_t, r_t = args
    t0 = time.perf_counter()
    try:
        neg, avg, res = measure(at_point(config, g_t, r_t), tol, method)
    except (SolverError, np.linalg.LinAlgError):
        neg, avg, res = math.nan, (math.nan if config.n_qubits > 2 else None), math.nan
    return Row(float(g_t), float(r_t), neg, avg, res, time.perf_counter() - t0)


def map_points(fn, items, workers: int = 1):
    """Order-preserving map, in-process for ``workers <= 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def run_sweep(
    config: ModelConfig,
    g_axis,
    r_axis,
    workers: int = 1,
    tol: float = 1e-10,
    method: str = "auto",
) -> list[Row]:
    """Negativity on the grid ``g_axis x r_axis``, ``g`` varying slowest."""
    grid = [(g, r) for g in g_axis for r in r_axis]
    return map_points(partial(_point, config=config, tol=tol, method=method), grid, workers)


def is_two_qubit_ising(config: ModelConfig) -> bool:
    """True for the model with a closed-form solution."""
    h = config.hamiltonian
    chi = config.reset.chi
    return (
        config.n_qubits == 2
        and [w for _, w in h.terms] == ["ZZ"]
        and h.terms[0][0] == 1.0
        and isinstance(config.noise, DephasingParams)
        and config.noise.gamma > 0
        and config.reset.per_site is None
        and isinstance(chi, str)
        and chi == "+"
    )


@dataclass
class BoundaryRow:
    g_over_gamma: float
    r_star: float  # nan when not found
    r_star_closed_form: float | None
    found: bool


def boundary(
    config: ModelConfig,
    g_t: float,
    r_lo: float = 1e-2,
    r_hi: float = 1e6,
    scan_points: int = 161,
    rtol: float = BISECT_RTOL,
    tol: float = 1e-10,
) -> BoundaryRow:
    """Smallest ``r/gamma`` with negativity above ``ENTANGLED_ATOL``.

    A log-spaced scan brackets the first entangled grid point, then
    bisection narrows the bracket to ``rtol`` (absolute in ``r/gamma``).
    """
    closed = None
    if is_two_qubit_ising(config):
        try:
            closed = analytic2q.threshold_r(g_t)
        except analytic2q.DomainError:
            closed = math.nan

    def entangled(r_t):
        return measure(at_point(config, g_t, r_t), tol)[0] > ENTANGLED_ATOL

    grid = np.geomspace(r_lo, r_hi, scan_points)
    hit = next((k for k, r in enumerate(grid) if entangled(r)), None)
    if hit is None:
        return BoundaryRow(g_t, math.nan, closed, False)
    if hit == 0:
        return BoundaryRow(g_t, float(grid[0]), closed, True)
    lo, hi = float(grid[hit - 1]), float(grid[hit])
    while hi - lo > rtol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            hi = mid
        else:
            lo = mid
    return BoundaryRow(g_t, 0.5 * (lo + hi), closed, True)


def fig2a_rows(r_axis, g_t: float = 10.0, polarization_rate: float = 1.0, workers: int = 1, tol: float = 1e-10):
    """Negativity of the XYZ + field model at zero (s=0) and infinite (s=1/2) temperature."""
    items = [(r, s) for r in r_axis for s in (0.0, 0.5)]
    fn = partial(_fig2a_point, g_t=g_t, c=polarization_rate, tol=tol)
    vals = map_points(fn, items, workers)
    return [(float(r), vals[2 * k], vals[2 * k + 1]) for k, r in enumerate(r_axis)]


def _fig2a_point(item, g_t, c, tol):
    r, s = item
    try:
        return negativity(steady_state(xyz_preset(r, s, g=g_t, polarization_rate=c), tol).state)
    except SolverError:
        return math.nan


@dataclass
class Fig2bRow:
    r_over_gamma: float
    avg_negativity: float
    pair_negativity: float
    pair_negativity_poisson: float
    pair_states: dict


def _fig2b_point(r, g_t, n_qubits, mix: MixtureSpec, tol, method):
    pairs = {}
    avg = math.nan
    for n in sorted(set(mix.weights) | {n_qubits}):
        cfg = pairwise_ising(n, g_t, 1.0, r)
        rho = _solve(cfg, tol, method).state
        pairs[n] = reduced_pair(rho, 1, 2) if n > 2 else rho
        if n == n_qubits:
            avg = average_negativity(rho)
    mixed = poisson_mixture({n: pairs[n] for n in mix.weights}, mix)
    return Fig2bRow(float(r), avg, negativity(pairs[n_qubits]), negativity(mixed), pairs)


def _fig2b_point_safe(r, **kw):
    try:
        return _fig2b_point(r, **kw)
    except SolverError:
        return Fig2bRow(float(r), math.nan, math.nan, math.nan, {})


def fig2b_rows(
    r_axis,
    g_t: float = 5.0,
    n_qubits: int = 5,
    mix: MixtureSpec | None = None,
    workers: int = 1,
    tol: float = 1e-10,
    method: str = "krylov",
) -> list[Fig2bRow]:
    """Symmetric pairwise-Ising systems: average, pair and Poisson-mixed pair negativity."""
    mix = MixtureSpec() if mix is None else mix
    fn = partial(_fig2b_point_safe, g_t=g_t, n_qubits=n_qubits, mix=mix, tol=tol, method=method)
    return map_points(fn, list(r_axis), workers)
