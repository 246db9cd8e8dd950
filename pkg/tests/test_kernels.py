import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from resetent import kernels
from resetent.liouvillian import Liouvillian, random_config
from resetent.models import pairwise_ising

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable or disabled")


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_numba_and_numpy_local_action_agree(rng, n):
    kops = rng.normal(size=(n, 2, 2, 2, 2)) + 1j * rng.normal(size=(n, 2, 2, 2, 2))
    rho = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    a = kernels.local_action_numpy(rho, kops, np.zeros_like(rho))
    b = kernels.local_action_numba(rho, kops, np.zeros_like(rho))
    np.testing.assert_allclose(a, b, atol=1e-12)


@needs_numba
def test_numba_and_numpy_commutator_agree(rng):
    h = rng.normal(size=16)
    rho = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    np.testing.assert_allclose(
        kernels.diagonal_commutator_numpy(h, rho, np.zeros_like(rho)),
        kernels.diagonal_commutator_numba(h, rho, np.zeros_like(rho)),
        atol=1e-13,
    )


def test_kernels_accumulate_into_out(rng):
    kops = rng.normal(size=(2, 2, 2, 2, 2)).astype(complex)
    rho = rng.normal(size=(4, 4)).astype(complex)
    out = np.ones((4, 4), dtype=complex)
    expected = 1 + kernels.local_action_numpy(rho, kops, np.zeros_like(rho))
    np.testing.assert_allclose(kernels.local_action(rho, kops, out), expected, atol=1e-13)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, RESETENT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from resetent import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_apply_matches_dense(rng, monkeypatch):
    monkeypatch.setattr(kernels, "local_action", kernels.local_action_numpy)
    monkeypatch.setattr(kernels, "diagonal_commutator", kernels.diagonal_commutator_numpy)
    for cfg in [random_config(rng, 3), pairwise_ising(3, 1.5, 1.0, 0.7)]:
        liou = Liouvillian(cfg)
        rho = rng.normal(size=(liou.dim,) * 2) + 1j * rng.normal(size=(liou.dim,) * 2)
        np.testing.assert_allclose(liou.dense() @ rho.ravel(order="F"), liou.apply(rho).ravel(order="F"), atol=1e-12)


def test_benchmark_script_runs():
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    proc = subprocess.run([sys.executable, str(script), "--min-qubits", "2", "--max-qubits", "3", "--repeat", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "local_action" in proc.stdout
