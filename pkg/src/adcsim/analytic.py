"""Closed-form description of a squeezed vacuum after the amplitude-damping channel.

After a dimensionless decay time ``kt`` the state is the squeezed chaotic
state

    rho = W exp(beta/2 a^dag^2) exp(a^dag a ln g) exp(beta/2 a^2)

with ``T' = 1 - exp(-2 kt)``, ``g = beta T' tanh(lam)`` and ``beta``, ``W``
given by :func:`evolved_params`. Every observable below is evaluated from
these three numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .fock import FockDensityMatrix, QuadratureFrame
from .specfun import log_factorial, xlogy

__all__ = [
    "ChannelPoint",
    "EvolvedParams",
    "PhotonDistribution",
    "evolved_params",
    "trace_identity",
    "mean_photon",
    "photon_prob",
    "photon_dist",
    "evolved_density_matrix",
    "wigner_analytic",
    "tomogram_analytic",
]

_LOG_TINY = math.log(np.finfo(float).tiny)


@dataclass(frozen=True)
class ChannelPoint:
    """Squeezing parameter ``lam`` and dimensionless decay time ``kappa_t``."""

    lam: float
    kappa_t: float

    def __post_init__(self):
        for name in ("lam", "kappa_t"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")


@dataclass(frozen=True)
class EvolvedParams:
    t_prime: float
    beta_s: float
    w: float
    g: float


@dataclass(frozen=True)
class PhotonDistribution:
    probs: np.ndarray
    tail: float
    underflow: bool = False

    @property
    def n_max(self) -> int:
        return self.probs.size - 1


def _point(p) -> ChannelPoint:
    return p if isinstance(p, ChannelPoint) else ChannelPoint(*p)


def evolved_params(p: ChannelPoint) -> EvolvedParams:
    p = _point(p)
    t_prime = -math.expm1(-2 * p.kappa_t)
    th = math.tanh(p.lam)
    den = 1.0 - (t_prime * th) ** 2
    beta = math.exp(-2 * p.kappa_t) * th / den
    w = 1.0 / (math.cosh(p.lam) * math.sqrt(den))
    return EvolvedParams(t_prime=t_prime, beta_s=beta, w=w, g=beta * t_prime * th)


def trace_identity(ep: EvolvedParams) -> float:
    """``Tr rho`` from the coherent-state Gaussian integral; equals 1."""
    radicand = (ep.g - 1.0) ** 2 - ep.beta_s**2
    if radicand <= 0:
        raise ConvergenceError(f"trace integral diverges: radicand {radicand:.3e}")
    return ep.w / math.sqrt(radicand)


def mean_photon(p: ChannelPoint) -> float:
    ep = evolved_params(p)
    return (1.0 - ep.g) / ((ep.g - 1.0) ** 2 - ep.beta_s**2) - 1.0


def _log_photon_prob(n: int, p: ChannelPoint) -> float:
    ep = evolved_params(p)
    if n == 0:
        return math.log(ep.w)
    if p.kappa_t == 0:
        # T' -> 0 limit: only the m = n/2 term survives
        if n % 2:
            return -math.inf
        k = n // 2
        return (
            log_factorial(n) - n * math.log(2.0) - 2 * log_factorial(k)
            - math.log(math.cosh(p.lam)) + xlogy(n, math.tanh(p.lam))
        )
    m = np.arange(n // 2 + 1)
    x = ep.t_prime * math.tanh(p.lam)
    logs = (
        math.log(ep.w)
        + xlogy(n, ep.beta_s)
        + xlogy(n - 2 * m, x)
        + log_factorial(n)
        - 2 * m * math.log(2.0)
        - 2 * log_factorial(m)
        - log_factorial(n - 2 * m)
    )
    top = np.max(logs)
    if not np.isfinite(top):
        return -math.inf
    return float(top + math.log(np.sum(np.exp(logs - top))))


def photon_prob(n: int, p: ChannelPoint) -> float:
    """Probability of ``n`` photons; 0 when the value underflows."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    lp = _log_photon_prob(n, _point(p))
    return math.exp(lp) if lp > _LOG_TINY else 0.0


def photon_dist(p: ChannelPoint, n_max: int | None = None, tol: float = 1e-12) -> PhotonDistribution:
    """Photon-number distribution up to ``n_max``.

    With ``n_max=None`` the range grows until the unaccounted probability
    drops below ``tol``.
    """
    p = _point(p)
    if n_max is not None:
        if n_max < 0:
            raise ValueError("n_max must be nonnegative")
        logs = np.array([_log_photon_prob(n, p) for n in range(n_max + 1)])
    else:
        logs = []
        total = 0.0
        n = 0
        while True:
            lp = _log_photon_prob(n, p)
            logs.append(lp)
            total += math.exp(lp) if lp > _LOG_TINY else 0.0
            if n % 2 and 1.0 - total < tol or n >= 4000:
                break
            n += 1
        logs = np.array(logs)
    underflow = bool(np.any(np.isfinite(logs) & (logs <= _LOG_TINY)))
    probs = np.where(logs > _LOG_TINY, np.exp(np.minimum(logs, 0.0)), 0.0)
    return PhotonDistribution(probs=probs, tail=1.0 - float(probs.sum()), underflow=underflow)


def evolved_density_matrix(p: ChannelPoint, cutoff: int) -> FockDensityMatrix:
    """Fock matrix elements of the evolved state from its normal-ordered form.

    ``rho[m, n] = W sum_l g^l/l! u_l(m) u_l(n)`` with
    ``u_l(l + 2j) = (beta/2)^j sqrt((l+2j)!)/j!``; each term is positive so
    the sum is assembled from log-domain factors without cancellation.
    """
    p = _point(p)
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    ep = evolved_params(p)
    rho = np.zeros((cutoff + 1, cutoff + 1))
    half_beta = ep.beta_s / 2
    for l in range(cutoff + 1):
        lead = math.log(ep.w) + xlogy(l, ep.g) - log_factorial(l)
        if lead < _LOG_TINY:
            continue
        j = np.arange((cutoff - l) // 2 + 1)
        levels = l + 2 * j
        log_u = xlogy(j, half_beta) + 0.5 * log_factorial(levels) - log_factorial(j)
        u = np.exp(log_u + 0.5 * lead)
        rho[np.ix_(levels, levels)] += np.outer(u, u)
    trace = float(np.trace(rho))
    return FockDensityMatrix(rho.astype(complex), tail=max(1.0 - trace, 0.0))


def wigner_analytic(alpha, p: ChannelPoint):
    """Closed-form Wigner function (vacuum peak ``1/pi``, total integral 1/2)."""
    ep = evolved_params(p)
    alpha = np.asarray(alpha, dtype=complex)
    a2 = np.abs(alpha) ** 2
    d = (1 + ep.g) ** 2 - ep.beta_s**2
    expo = 2 * a2 + 2 * (-2 * (1 + ep.g) * a2 + ep.beta_s * 2 * (alpha * alpha).real) / d
    out = ep.w / (math.pi * math.sqrt(d)) * np.exp(expo)
    return float(out) if out.ndim == 0 else out


def tomogram_analytic(q, frame: QuadratureFrame, p: ChannelPoint):
    """Closed-form distribution of the quadrature ``f X + g P``.

    Raises
    ------
    ConvergenceError
        If the Gaussian-integral determinant ``E`` is not positive.
    """
    p = _point(p)
    ep = evolved_params(p)
    q = np.asarray(q, dtype=float)
    B = frame.B
    s = frame.norm2
    x = ep.t_prime * math.tanh(p.lam)
    b = ep.beta_s
    e = abs(1 + b * B / B.conjugate()) ** 2 - (b * x) ** 2
    if e <= 0:
        raise ConvergenceError(f"tomogram integral diverges: E = {e:.3e}")
    q2 = q * q
    expo = (
        -q2 / s
        + q2 * b / (e * s * s) * 2 * (B * B).real
        + 2 * q2 * b / (e * s) * (x + b - b * x * x)
    )
    out = ep.w / math.sqrt(math.pi * s * e) * np.exp(expo)
    return float(out) if out.ndim == 0 else out
