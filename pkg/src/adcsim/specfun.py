"""Special functions and quadrature helpers.

Everything here is a pure function of its arguments. Factorials are only
ever handled through their logarithms so that sums over photon numbers up to
a few hundred never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, QuadratureError

__all__ = [
    "LogFactorialTable",
    "LOG_FACTORIAL",
    "log_factorial",
    "hermite_h",
    "legendre_p",
    "mehler_closed_form",
    "mehler_series",
    "legendre_power_series",
    "gaussian_integral_closed_form",
    "gauss_quad_2d",
    "xlogy",
]

_TABLE_SIZE = 1025


@dataclass(frozen=True)
class LogFactorialTable:
    """Read-only table of ``ln(n!)`` for ``0 <= n < size``."""

    size: int = _TABLE_SIZE
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array([math.lgamma(n + 1.0) for n in range(self.size)])
        values[:2] = 0.0
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __call__(self, n):
        n = np.asarray(n)
        if np.any(n < 0):
            raise ValueError("log_factorial is defined for n >= 0 only")
        if n.ndim == 0:
            k = int(n)
            return float(self.values[k]) if k < self.size else math.lgamma(k + 1.0)
        if n.size and n.max() >= self.size:
            return np.array([self(int(k)) for k in n.ravel()]).reshape(n.shape)
        return self.values[n.astype(np.intp)]


LOG_FACTORIAL = LogFactorialTable()


def log_factorial(n):
    """Return ``ln(n!)`` for a nonnegative integer or integer array."""
    return LOG_FACTORIAL(n)


def xlogy(k, x):
    """``k * ln(x)`` with the convention ``0 * ln(0) = 0``.

    Powers ``x**k`` of a zero base appear whenever a channel or squeezing
    parameter vanishes; this keeps those terms finite in log space.
    """
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = k * np.log(x)
    out = np.where(k == 0, 0.0, out)
    return out if out.ndim else float(out)


def hermite_h(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)`` by three-term recurrence.

    ``x`` may be real, complex, or an array of either.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return h_prev if h_prev.ndim else h_prev[()]
    h = 2 * x * h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h if h.ndim else h[()]


def legendre_p(n: int, x):
    """Legendre polynomial ``P_n(x)`` by Bonnet's recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p if p.ndim else float(p)


def mehler_closed_form(t, x, y):
    """Resummed bilinear Hermite series.

    Returns ``(1 - t^2)^(-1/2) exp[(t^2 (x^2 + y^2) - 2 t x y) / (t^2 - 1)]``,
    the value of ``sum_n t^n / (2^n n!) H_n(x) H_n(y)`` for ``|t| < 1``.
    """
    t2 = t * t
    return (1.0 - t2) ** -0.5 * np.exp((t2 * (x * x + y * y) - 2.0 * t * x * y) / (t2 - 1.0))


def mehler_series(t, x, y, n_terms: int = 200):
    """Partial sum ``sum_{n<=n_terms} t^n / (2^n n!) H_n(x) H_n(y)``.

    ``t``, ``x`` and ``y`` broadcast elementwise.

    Each term is built from the normalized functions
    ``H_n / sqrt(2^n n!)``, which obey a recurrence free of overflow.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hx_prev, hx = np.ones_like(x), math.sqrt(2.0) * x
    hy_prev, hy = np.ones_like(y), math.sqrt(2.0) * y
    total = hx_prev * hy_prev
    tn = np.ones_like(np.asarray(t, dtype=float))
    for n in range(1, n_terms + 1):
        tn *= t
        total = total + tn * hx * hy
        c1, c2 = math.sqrt(2.0 / (n + 1)), math.sqrt(n / (n + 1))
        hx_prev, hx = hx, c1 * x * hx - c2 * hx_prev
        hy_prev, hy = hy, c1 * y * hy - c2 * hy_prev
    return total


def legendre_power_series(n: int, x):
    """``x^n sum_m n!/(2^{2m} (m!)^2 (n-2m)!) (1 - 1/x^2)^m``, equal to ``P_n(x)``.

    Valid for ``|x| >= 1`` where every term is nonnegative.
    """
    x = np.asarray(x, dtype=float)
    u = 1.0 - 1.0 / (x * x)
    total = np.zeros_like(x)
    for m in range(n // 2 + 1):
        c = math.comb(n, 2 * m) * math.comb(2 * m, m) / 4.0**m
        total = total + c * u**m
    out = x**n * total
    return out if out.ndim else float(out)


def gaussian_integral_closed_form(zeta, xi, eta, f, g):
    """Closed form of ``int d^2z/pi exp(zeta|z|^2 + xi z + eta z* + f z^2 + g z*^2)``.

    Raises
    ------
    ConvergenceError
        If ``Re(zeta +- f +- g) < 0`` or ``Re((zeta^2 - 4fg)/(zeta +- f +- g)) < 0``
        fails for any sign choice.
    """
    det = zeta * zeta - 4.0 * f * g
    for s1 in (1, -1):
        for s2 in (1, -1):
            d = zeta + s1 * f + s2 * g
            if not (np.real(d) < 0 and np.real(det / d) < 0):
                raise ConvergenceError(
                    f"Gaussian integral diverges: zeta={zeta}, f={f}, g={g}"
                )
    return np.exp((-zeta * xi * eta + f * eta * eta + g * xi * xi) / det) / np.sqrt(det)


def _gauss_tensor(f: Callable, radius: float, nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = x * radius
    w = w * radius
    z = x[:, None] + 1j * x[None, :]
    vals = np.asarray(f(z))
    return np.einsum("i,ij,j->", w, vals, w)


def gauss_quad_2d(
    f: Callable[[np.ndarray], np.ndarray],
    radius: float = 7.0,
    nodes: int = 201,
    tol: float | None = None,
) -> complex:
    """Integrate ``f`` over the box ``|Re z|, |Im z| <= radius``.

    Uses a tensor-product Gauss-Legendre rule with ``nodes`` points per real
    axis. ``f`` receives a 2D complex array of nodes and must return values
    of the same shape. The measure is ``d^2z = d(Re z) d(Im z)``.

    When ``tol`` is given the rule is repeated with twice as many nodes and
    the finer result is returned; a change larger than ``tol`` raises
    :class:`QuadratureError`.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if nodes < 32:
        raise ValueError("at least 32 nodes per axis are required")
    coarse = _gauss_tensor(f, radius, nodes)
    if tol is None:
        return complex(coarse)
    fine = _gauss_tensor(f, radius, 2 * nodes)
    if abs(fine - coarse) > tol:
        raise QuadratureError(
            f"2D quadrature not converged: |I({2 * nodes}) - I({nodes})| = "
            f"{abs(fine - coarse):.3e} > {tol:.1e}"
        )
    return complex(fine)
