import itertools

import numpy as np
import pytest

from resetent import liouvillian
from resetent.models import (
    DephasingParams,
    HamiltonianSpec,
    ModelConfig,
    NoiseParams,
    ResetSpec,
    ValidationError,
    heisenberg,
    ising,
    pairwise_ising,
    validate,
    xyz_field,
)
from resetent.qstate import embed_pauli


def test_ising_two_qubits():
    g = 1.7
    np.testing.assert_allclose(ising(g, [(1, 2)], 2).matrix(), np.diag([g, -g, -g, g]))
    assert not ising(0.0, [(1, 2)], 2).matrix().any()


def test_ising_all_pairs_term_count():
    assert len(ising(1.0, None, 5).terms) == 10


@pytest.mark.parametrize("pairs", [[(1, 1)], [(0, 2)], [(1, 3)], [(1, 2), (2, 1)]])
def test_ising_invalid_pairs(pairs):
    with pytest.raises(ValueError):
        ising(1.0, pairs, 2)


def test_ising_all_pairs_permutation_invariant(rng):
    n = 4
    h = ising(1.3, None, n).matrix()
    perm = rng.permutation(n)
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    permuted = (bits[:, perm] << (n - 1 - np.arange(n))).sum(axis=1)
    np.testing.assert_array_equal(h[np.ix_(permuted, permuted)], h)


def test_heisenberg_spectrum():
    g = 0.8
    lam = np.linalg.eigvalsh(heisenberg(g).matrix())
    np.testing.assert_allclose(lam, [-3 * g, g, g, g], atol=1e-14)
    assert not heisenberg(0.0).matrix().any()
    h = heisenberg(g).matrix()
    sz = embed_pauli("z", 1, 2) + embed_pauli("z", 2, 2)
    np.testing.assert_allclose(h @ sz, sz @ h, atol=1e-14)


def test_xyz_field_entries():
    g = 2.0
    h = xyz_field(g).matrix()
    assert abs(np.trace(h)) < 1e-14
    # <00|XX|11> = 1 and <00|YY|11> = -1
    assert h[0, 3] == pytest.approx(0.4 * g)
    np.testing.assert_allclose(h, h.conj().T)


def test_noise_validation():
    assert validate(ModelConfig(2, ising(1, None, 2), NoiseParams(B=2, C=1, s=0.5)))
    with pytest.raises(ValidationError, match="2C >= B"):
        validate(ModelConfig(2, ising(1, None, 2), NoiseParams(B=2, C=0.5, s=0.5)))
    with pytest.raises(ValidationError) as err:
        validate(ModelConfig(2, ising(1, None, 2), NoiseParams(B=0, C=1, s=1.5)))
    assert err.value.field == "noise.s"
    with pytest.raises(ValidationError):
        validate(ModelConfig(2, ising(1, None, 2), DephasingParams(-1)))


def test_reset_validation():
    cfg = ModelConfig(2, ising(1, None, 2), DephasingParams(1), ResetSpec(1, np.diag([0.9, 0.1])))
    assert validate(cfg) is cfg
    bad = ModelConfig(2, ising(1, None, 2), DephasingParams(1), ResetSpec(1, np.diag([0.9, 0.2])))
    with pytest.raises(ValidationError) as err:
        validate(bad)
    assert err.value.field == "reset.chi[0]"
    with pytest.raises(ValidationError):
        validate(ModelConfig(2, ising(1, None, 2), DephasingParams(1), ResetSpec(-1)))
    with pytest.raises(ValidationError):
        validate(ModelConfig(2, ising(1, None, 2), DephasingParams(1), ResetSpec(1, per_site=("+",))))


def test_hamiltonian_validation():
    with pytest.raises(ValidationError):
        validate(ModelConfig(2, HamiltonianSpec(2, ((1j, "XX"),)), DephasingParams(1)))
    with pytest.raises(ValidationError):
        validate(ModelConfig(2, HamiltonianSpec(2, ((1.0, "XQ"),)), DephasingParams(1)))
    with pytest.raises(ValidationError):
        validate(ModelConfig(3, ising(1, None, 2), DephasingParams(1)))


@pytest.mark.parametrize("spec", [ising(2.0, None, 3), heisenberg(1.1), xyz_field(0.3)])
def test_hamiltonians_hermitian(spec):
    h = spec.matrix()
    assert np.abs(h - h.conj().T).max() <= 1e-12


@pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
def test_dephasing_equals_general_noise_with_b_zero(s):
    gamma = 0.7
    a = ModelConfig(2, ising(1.0, None, 2), DephasingParams(gamma), ResetSpec(0.4))
    b = ModelConfig(2, ising(1.0, None, 2), NoiseParams(B=0.0, C=gamma, s=s), ResetSpec(0.4))
    np.testing.assert_array_equal(liouvillian.assemble_dense(a), liouvillian.assemble_dense(b))


def test_with_rates_replaces_only_g_and_r():
    cfg = pairwise_ising(3, 1.0, 2.0, 3.0)
    new = cfg.with_rates(g=5.0, r=7.0)
    assert (new.hamiltonian.g, new.reset.r, new.noise.gamma) == (5.0, 7.0, 2.0)
    assert cfg.hamiltonian.g == 1.0
