"""Closed-form results for two qubits with Ising coupling, dephasing and reset.

Model: ``H = g Z1 Z2``, dephasing rate ``gamma``, reset to ``|+>`` at rate
``r``.  Everything here is written from the closed-form expressions and is
deliberately independent of :mod:`resetent.liouvillian`, so it can serve as
an oracle for the numerical pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import DensityMatrix


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class TwoQubitParams:
    g: float
    gamma: float
    r: float

    def __post_init__(self):
        if min(self.g, self.gamma, self.r) < 0:
            raise DomainError(f"rates must be nonnegative, got {self}")

    @property
    def reduced(self) -> tuple[float, float]:
        """``(g/gamma, r/gamma)``."""
        if self.gamma <= 0:
            raise DomainError("reduced coordinates need gamma > 0")
        return self.g / self.gamma, self.r / self.gamma


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def coefficient_rhs(coeffs, p: TwoQubitParams) -> np.ndarray:
    """Time derivative of the coefficients ``C[s1', s2', s1, s2]``.

    ``coeffs`` may be a 4x4 density matrix or any array with 16 entries in
    the order ``(s1', s2', s1, s2)``; the result has the same shape.
    """
    arr = np.asarray(coeffs, dtype=complex)
    c = arr.reshape(2, 2, 2, 2)
    out = np.empty_like(c)
    g, gam, r = p.g, p.gamma, p.r
    for s1p in range(2):
        for s2p in range(2):
            for s1 in range(2):
                for s2 in range(2):
                    rate = (
                        -1j * g * (_sign(s1p + s2p) - _sign(s1 + s2))
                        + gam / 2 * (_sign(s1p + s1) + _sign(s2p + s2) - 2)
                        - 2 * r
                    )
                    feed = c[0, s2p, 0, s2] + c[1, s2p, 1, s2] + c[s1p, 0, s1, 0] + c[s1p, 1, s1, 1]
                    out[s1p, s2p, s1, s2] = rate * c[s1p, s2p, s1, s2] + r / 2 * feed
    return out.reshape(arr.shape)


def _common(p: TwoQubitParams) -> float:
    return 2 * p.g**2 + (p.r + p.gamma / 2) * (p.r + p.gamma)


def off_diagonal_entry(p: TwoQubitParams) -> complex:
    """Steady value of ``C_0001 = C_0010 = C_0111^* = C_1011^*``."""
    return p.r * (-1j * p.g + p.r + p.gamma / 2) / (4 * _common(p))


def anti_diagonal_entry(p: TwoQubitParams) -> float:
    return p.r**2 * (p.r + p.gamma / 2) / (4 * (p.r + p.gamma) * _common(p))


def steady_state(p: TwoQubitParams) -> DensityMatrix:
    """Unique steady state for ``r > 0``."""
    if p.r <= 0:
        raise DomainError("the steady state is not unique for r = 0")
    x = off_diagonal_entry(p)
    a = anti_diagonal_entry(p)
    # upper triangle in basis order 00, 01, 10, 11; the rest by Hermiticity
    upper = np.zeros((4, 4), dtype=complex)
    upper[0, 1] = upper[0, 2] = x
    upper[1, 3] = upper[2, 3] = np.conj(x)
    upper[0, 3] = upper[1, 2] = a
    return DensityMatrix(np.eye(4) / 4 + upper + upper.conj().T)


def negativity_numerator(p: TwoQubitParams) -> float:
    g, gam, r = p.g, p.gamma, p.r
    return gam * (r + gam / 2) ** 2 + g**2 * (r + gam) - r * g * (r + gam)


def negativity(p: TwoQubitParams) -> float:
    """Closed-form steady-state negativity, in ``[0, 1/2]``."""
    den = 2 * (p.r + p.gamma) * _common(p)
    if den == 0:
        return 0.0
    return max(0.0, -negativity_numerator(p) / den)


def negativity_reduced(g_over_gamma: float, r_over_gamma: float) -> float:
    return negativity(TwoQubitParams(g_over_gamma, 1.0, r_over_gamma))


def spectrum(p: TwoQubitParams) -> np.ndarray:
    """The 16 Liouvillian eigenvalues with multiplicity.

    For ``g < r/4`` the complex pair continues onto the real axis.
    """
    g, gam, r = p.g, p.gamma, p.r
    root = 2 * np.sqrt(complex(g**2 - r**2 / 16))
    centre = -(1.5 * r + gam)
    values = [0.0] + [-r] * 2 + [-2 * r] + [-2 * (r + gam)] * 4 + [centre - 1j * root] * 4 + [centre + 1j * root] * 4
    return np.array(values, dtype=complex)


def threshold_r(g_over_gamma: float) -> float:
    """Reset rate ``r/gamma`` above which the steady state is entangled.

    Positive root of the negativity numerator at ``gamma = 1``, a quadratic
    ``(1 - g) r^2 + (1 - g + g^2) r + (g^2 + 1/4)`` in ``r``.
    """
    g = float(g_over_gamma)
    if g <= 1:
        raise DomainError(f"no entangled region for g/gamma = {g} <= 1")
    a = 1 - g
    b = 1 - g + g * g
    c = g * g + 0.25
    return (-b - math.sqrt(b * b - 4 * a * c)) / (2 * a)


MIDDLE_LINE_SLOPE = 1 / (1 + math.sqrt(3))
