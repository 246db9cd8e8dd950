import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from resetent import analytic2q
from resetent.liouvillian import Liouvillian, random_config, vec
from resetent.models import DephasingParams, ModelConfig, NoiseParams, ResetSpec, ising, pairwise_ising, two_qubit_ising
from resetent.qstate import (
    KET_PLUS,
    DensityMatrix,
    embed_pauli,
    product_state,
    random_density_matrix,
    trace_distance,
)
from resetent.solver import (
    ConvergenceTimeout,
    SolverError,
    propagate,
    spectral_gap,
    spectrum,
    steady_state,
    steady_state_dense,
    steady_state_evolve,
    steady_state_krylov,
    steady_state_lu,
)


def multiset_error(a, b):
    cost = np.abs(np.subtract.outer(np.asarray(a), np.asarray(b)))
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols].max()


def test_dense_reference_point():
    res = steady_state_dense(two_qubit_ising(2.5, 1.0, 5.0))
    rho = res.state.data
    np.testing.assert_allclose(np.diag(rho), 0.25, atol=1e-12)
    assert rho[0, 1] == pytest.approx(0.15110 - 0.06868j, abs=5e-6)
    assert res.unique and res.residual < 1e-12
    assert res.spectral_gap == pytest.approx(5.0)


def test_dense_nonunique_without_reset():
    res = steady_state_dense(two_qubit_ising(2.5, 1.0, 0.0))
    assert res.unique is False
    np.testing.assert_allclose(res.state.data, np.eye(4) / 4, atol=1e-12)


def test_dense_oracle_equivalence(rng):
    for _ in range(100):
        g, gamma, r = rng.uniform(0.05, 20, size=3)
        got = steady_state_dense(two_qubit_ising(g, gamma, r)).state
        want = analytic2q.steady_state(analytic2q.TwoQubitParams(g, gamma, r))
        assert trace_distance(got, want) <= 1e-8


def test_lu_and_krylov_cross_checks(rng):
    for cfg in [two_qubit_ising(2.5, 1.0, 5.0), pairwise_ising(4, 5.0, 1.0, 30.0), random_config(rng, 3)]:
        ref = steady_state_dense(cfg).state
        assert trace_distance(steady_state_lu(cfg).state, ref) < 1e-10
        if cfg.reset.r > 0:
            assert trace_distance(steady_state_krylov(cfg).state, ref) < 1e-9


def test_evolve_matches_dense():
    cfg = two_qubit_ising(2.5, 1.0, 5.0)
    start = product_state([KET_PLUS, KET_PLUS])
    res = steady_state_evolve(cfg, start)
    assert res.residual <= 1e-10
    assert trace_distance(res.state, steady_state_dense(cfg).state) <= 1e-8


def test_evolve_independent_of_initial_state(rng):
    cfg = two_qubit_ising(3.0, 0.7, 2.0)
    a = steady_state_evolve(cfg, random_density_matrix(2, rng)).state
    b = steady_state_evolve(cfg, random_density_matrix(2, rng)).state
    assert trace_distance(a, b) <= 1e-7


def test_evolve_reset_only_reaches_product_of_reset_states(rng):
    chis = [random_density_matrix(1, rng).data for _ in range(3)]
    cfg = ModelConfig(3, ising(0.0, None, 3), DephasingParams(0.0), ResetSpec(1.5, per_site=tuple(chis)))
    res = steady_state_evolve(cfg, random_density_matrix(3, rng))
    target = product_state(chis)
    assert trace_distance(res.state, target) < 1e-9


def test_evolve_five_qubits_converges():
    cfg = pairwise_ising(5, 5.0, 1.0, 2.0)
    res = steady_state_evolve(cfg, product_state([KET_PLUS] * 5), tol=1e-7)
    assert res.residual <= 1e-7
    assert trace_distance(res.state, steady_state_krylov(cfg).state) < 1e-6


def test_evolve_timeout_carries_residual():
    with pytest.raises(ConvergenceTimeout) as err:
        steady_state_evolve(two_qubit_ising(2.5, 1.0, 0.01), product_state([KET_PLUS] * 2), t_max=0.5)
    assert err.value.residual > 1e-10


def test_auto_dispatch_uses_matrix_free_above_five_qubits():
    res = steady_state(pairwise_ising(6, 5.0, 1.0, 20.0))
    assert res.method == "krylov"
    assert res.residual < 1e-8


def test_propagate_zero_time(rng):
    rho = random_density_matrix(2, rng)
    np.testing.assert_allclose(propagate(two_qubit_ising(1, 1, 1), rho, 0.0).data, rho.data)
    with pytest.raises(ValueError):
        propagate(two_qubit_ising(1, 1, 1), rho, -1.0)


def test_propagate_preserves_trace_and_hermiticity(rng):
    rho = propagate(two_qubit_ising(2.5, 1.0, 0.7), random_density_matrix(2, rng), 50.0).data
    assert abs(np.trace(rho) - 1) < 1e-9
    assert np.abs(rho - rho.conj().T).max() < 1e-9


def test_propagate_positive_for_random_configs(rng):
    for _ in range(5):
        cfg = random_config(rng, 2)
        rho = propagate(cfg, random_density_matrix(cfg.n_qubits, rng, rank=1), 3.0).data
        assert np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() > -1e-8


def test_relaxation_exponents():
    g, gamma, r = 2.0, 1.0, 0.8
    cfg = two_qubit_ising(g, gamma, r)
    z1 = embed_pauli("z", 1, 2)
    zz = z1 @ embed_pauli("z", 2, 2)
    times = np.linspace(0.5, 6.0, 12)
    rho0 = DensityMatrix(np.diag([1.0, 0, 0, 0]))
    states = [propagate(cfg, rho0, t).data for t in times]
    for op, rate in [(z1, r), (zz, 2 * r)]:
        vals = np.array([np.trace(op @ s).real for s in states])
        slope = np.polyfit(times, np.log(np.abs(vals)), 1)[0]
        assert slope == pytest.approx(-rate, rel=0.02)


def test_scale_covariance(rng):
    rho0 = random_density_matrix(2, rng)
    base = propagate(two_qubit_ising(1.5, 0.8, 1.1), rho0, 2.0).data
    for lam in (0.1, 10.0):
        scaled = propagate(two_qubit_ising(1.5 * lam, 0.8 * lam, 1.1 * lam), rho0, 2.0 / lam).data
        np.testing.assert_allclose(scaled, base, atol=1e-9)


def test_spectrum_reference_point():
    w = spectrum(two_qubit_ising(1.0, 1.0, 1.0))
    expected = analytic2q.spectrum(analytic2q.TwoQubitParams(1.0, 1.0, 1.0))
    assert multiset_error(w, expected) < 1e-8
    assert w[0] == pytest.approx(0, abs=1e-12)


def test_spectrum_real_branch_and_stability(rng):
    g, gamma, r = 0.5, 1.0, 6.0
    w = spectrum(two_qubit_ising(g, gamma, r))
    assert multiset_error(w, analytic2q.spectrum(analytic2q.TwoQubitParams(g, gamma, r))) < 1e-8
    assert np.abs(w.imag).max() < 1e-8
    for _ in range(5):
        w = spectrum(random_config(rng, 2))
        assert w.real.max() <= 1e-9
        assert np.abs(w).min() < 1e-9


def test_single_zero_eigenvalue_with_reset(rng):
    for _ in range(10):
        g, gamma, r = rng.uniform(0.1, 10, size=3)
        w = spectrum(two_qubit_ising(g, gamma, r))
        assert np.sum(np.abs(w) < 1e-9) == 1
        assert spectral_gap(w) > 0


def test_general_noise_relaxes_to_thermal_populations():
    # no coupling, no reset: each qubit relaxes to population s in |0>
    s = 0.8
    cfg = ModelConfig(1, ising(0.0, [], 1), NoiseParams(B=1.0, C=0.7, s=s), ResetSpec(0.0))
    rho = steady_state_dense(cfg).state.data
    np.testing.assert_allclose(rho, np.diag([s, 1 - s]), atol=1e-12)


def test_solver_error_on_bad_tolerance():
    with pytest.raises(SolverError):
        steady_state_dense(two_qubit_ising(2.5, 1.0, 5.0), tol=1e-30)
