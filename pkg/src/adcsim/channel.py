"""Amplitude-damping channel: Kraus operators and a Lindblad RK4 integrator.

Time enters only through the dimensionless product ``kappa_t``. The two
evolution routes are written independently so that each can check the
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .fock import FockDensityMatrix
from .specfun import log_factorial, xlogy

__all__ = ["KrausFamily", "kraus_family", "apply_channel", "lindblad_rhs", "lindblad_rk4"]


def _kraus_diagonals(kappa_t: float, cutoff: int) -> list[np.ndarray]:
    """``k_n[m] = <m|M_n|m+n>`` for ``n = 0..cutoff``."""
    t_prime = -math.expm1(-2 * kappa_t)
    out = []
    for n in range(cutoff + 1):
        m = np.arange(cutoff + 1 - n)
        log_k = 0.5 * (
            xlogy(n, t_prime)
            - log_factorial(n)
            + log_factorial(m + n)
            - log_factorial(m)
        ) - kappa_t * m
        out.append(np.exp(log_k))
    return out


@dataclass(frozen=True)
class KrausFamily:
    """Truncated Kraus operators ``M_n = sqrt(T'^n/n!) exp(-kt a^dag a) a^n``."""

    kappa_t: float
    t_prime: float
    operators: tuple

    @property
    def cutoff(self) -> int:
        return self.operators[0].shape[0] - 1

    def completeness_defect(self) -> float:
        """``max |sum_n M_n^dag M_n - I|`` over the truncated space."""
        total = sum(m.conj().T @ m for m in self.operators)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def kraus_family(kappa_t: float, cutoff: int) -> KrausFamily:
    if not (math.isfinite(kappa_t) and kappa_t >= 0):
        raise ValueError("kappa_t must be finite and nonnegative")
    ops = []
    for n, diag in enumerate(_kraus_diagonals(kappa_t, cutoff)):
        ops.append(np.diag(diag, n).astype(complex))
    return KrausFamily(kappa_t=kappa_t, t_prime=-math.expm1(-2 * kappa_t), operators=tuple(ops))


def apply_channel(rho0: FockDensityMatrix, kappa_t: float) -> FockDensityMatrix:
    """Operator-sum evolution ``sum_n M_n rho0 M_n^dag``.

    Each ``M_n`` is a single shifted diagonal, so the sum is accumulated
    blockwise in a fixed order; the result is bit-reproducible.
    """
    if not (math.isfinite(kappa_t) and kappa_t >= 0):
        raise ValueError("kappa_t must be finite and nonnegative")
    if kappa_t == 0:
        return rho0
    r = rho0.elements
    d = rho0.dim
    out = np.zeros_like(r)
    for n, k in enumerate(_kraus_diagonals(kappa_t, rho0.cutoff)):
        out[: d - n, : d - n] += np.outer(k, k) * r[n:, n:]
    return FockDensityMatrix(out, tail=rho0.tail)


def lindblad_rhs(rho: np.ndarray) -> np.ndarray:
    """``2 a rho a^dag - a^dag a rho - rho a^dag a`` on the truncated space."""
    d = rho.shape[0]
    n = np.arange(d, dtype=float)
    out = -(n[:, None] + n[None, :]) * rho
    s = np.sqrt(n[1:])
    out[:-1, :-1] += 2 * np.outer(s, s) * rho[1:, 1:]
    return out


def lindblad_rk4(
    rho0: FockDensityMatrix,
    kappa_t: float,
    dt: float = 1e-3,
    pos_tol: float = 1e-8,
) -> FockDensityMatrix:
    """Integrate the master equation in ``s = kappa t`` with classic RK4.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on ``kappa_t``.

    Raises
    ------
    PositivityError
        If the final state has an eigenvalue below ``-pos_tol``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not (math.isfinite(kappa_t) and kappa_t >= 0):
        raise ValueError("kappa_t must be finite and nonnegative")
    if kappa_t == 0:
        return rho0
    steps = math.ceil(kappa_t / dt - 1e-12)
    h = kappa_t / steps
    y = np.array(rho0.elements)
    for _ in range(steps):
        k1 = lindblad_rhs(y)
        k2 = lindblad_rhs(y + 0.5 * h * k1)
        k3 = lindblad_rhs(y + 0.5 * h * k2)
        k4 = lindblad_rhs(y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    out = FockDensityMatrix(y, tail=rho0.tail)
    lo = out.min_eigenvalue()
    if lo < -pos_tol:
        raise PositivityError(
            f"RK4 lost positivity (min eigenvalue {lo:.2e}); reduce dt={dt}"
        )
    return out
