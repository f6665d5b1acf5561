"""Truncated Fock-space states and the numerical observables used as oracles.

A :class:`FockDensityMatrix` holds ``<m|rho|n>`` for ``0 <= m, n <= cutoff``
together with the population known to lie above the cutoff. Nothing in this
module renormalizes a state behind the caller's back.

The Wigner function follows the coherent-state convention

    W(alpha) = exp(2|alpha|^2) int d^2beta/pi^2 <-beta|rho|beta> exp(-2(beta alpha* - beta* alpha)),

under which the vacuum peaks at ``1/pi`` and every state integrates to 1/2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffError, QuadratureError
from .specfun import gauss_quad_2d, log_factorial, xlogy

__all__ = [
    "FockDensityMatrix",
    "QuadratureFrame",
    "annihilation",
    "vacuum",
    "number_state",
    "squeezed_vacuum",
    "squeezed_vacuum_tail",
    "adaptive_cutoff",
    "coherent_amplitudes",
    "qstate_amplitudes",
    "expect_number",
    "purity",
    "quadrature_variance",
    "wigner_numeric",
    "wigner_numeric_grid",
    "tomogram_numeric",
]

DEFAULT_MAX_TAIL = 1e-6


@dataclass(frozen=True)
class FockDensityMatrix:
    """Density matrix on the Fock levels ``0..cutoff``.

    Parameters
    ----------
    elements : array_like
        ``(cutoff+1, cutoff+1)`` complex matrix, ``elements[m, n] = <m|rho|n>``.
    tail : float
        Population of the untruncated state that lies above the cutoff.
        It is bookkeeping only; ``trace() + tail`` is 1 for a normalized
        state.
    """

    elements: np.ndarray
    tail: float = 0.0
    _eigvals: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        rho = np.array(self.elements, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        herm = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
        if herm > 1e-12:
            raise ValueError(f"density matrix is not Hermitian (defect {herm:.2e})")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    @property
    def cutoff(self) -> int:
        return self.elements.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def diagonal(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def eigenvalues(self) -> np.ndarray:
        if not self._eigvals:
            self._eigvals.append(np.linalg.eigvalsh(self.elements))
        return self._eigvals[0]

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def renormalized(self) -> "FockDensityMatrix":
        """Return the state scaled to unit trace on the truncated space."""
        return FockDensityMatrix(self.elements / self.trace(), tail=0.0)

    def check(self, pos_tol: float = 1e-10, trace_tol: float = 1e-10) -> "FockDensityMatrix":
        """Raise ``ValueError`` unless positivity and trace bookkeeping hold."""
        lo = self.min_eigenvalue()
        if lo < -pos_tol:
            raise ValueError(f"negative eigenvalue {lo:.3e}")
        defect = abs(self.trace() + self.tail - 1.0)
        if defect > trace_tol:
            raise ValueError(f"trace + tail deviates from 1 by {defect:.3e}")
        return self


@dataclass(frozen=True)
class QuadratureFrame:
    """Mixing coefficients of the rotated quadrature ``f X + g P``."""

    f: float
    g: float

    def __post_init__(self):
        if not (self.f * self.f + self.g * self.g > 0):
            raise ValueError("quadrature frame needs f^2 + g^2 > 0")

    @property
    def B(self) -> complex:
        return complex(self.f, -self.g)

    @property
    def norm2(self) -> float:
        return self.f * self.f + self.g * self.g

    @property
    def phi(self) -> float:
        b = self.B
        return float(np.angle(b / b.conjugate()) / 2)


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator on levels ``0..cutoff``."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def vacuum(cutoff: int) -> FockDensityMatrix:
    return number_state(0, cutoff)


def number_state(n: int, cutoff: int) -> FockDensityMatrix:
    if not 0 <= n <= cutoff:
        raise ValueError("number state outside the truncated space")
    rho = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    rho[n, n] = 1.0
    return FockDensityMatrix(rho)


def _log_sv_populations(lam: float, k: np.ndarray) -> np.ndarray:
    # ln p(2k) for the squeezed vacuum
    return (
        -math.log(math.cosh(lam))
        + log_factorial(2 * k)
        - 2 * k * math.log(2.0)
        - 2 * log_factorial(k)
        + xlogy(2 * k, math.tanh(lam))
    )


def squeezed_vacuum_tail(lam: float, cutoff: int) -> float:
    """Population of the squeezed vacuum above Fock level ``cutoff``.

    Summed directly term by term, so tiny tails are resolved to full
    relative precision.
    """
    if lam == 0:
        return 0.0
    k0 = cutoff // 2 + 1
    total = 0.0
    while True:
        k = np.arange(k0, k0 + 2048)
        terms = np.exp(_log_sv_populations(lam, k))
        total += float(terms.sum())
        if terms[-1] <= 1e-18 * total or terms[-1] < 1e-300:
            return total
        k0 += 2048


def adaptive_cutoff(lam: float, tol: float = 1e-12, minimum: int = 2) -> int:
    """Smallest even cutoff whose squeezed-vacuum tail is below ``tol``."""
    cutoff = max(2, minimum + (minimum % 2))
    while squeezed_vacuum_tail(lam, cutoff) >= tol:
        cutoff += 2
    return cutoff


def squeezed_vacuum(lam: float, cutoff: int, max_tail: float = DEFAULT_MAX_TAIL) -> FockDensityMatrix:
    """Pure squeezed vacuum ``sech^(1/2)(lam) exp(tanh(lam)/2 a^dag^2)|0>``.

    Raises
    ------
    CutoffError
        If the population discarded above ``cutoff`` exceeds ``max_tail``.
    """
    if lam < 0:
        raise ValueError("squeezing parameter must be nonnegative")
    if cutoff < 2 or cutoff % 2:
        raise ValueError("cutoff must be even and >= 2")
    tail = squeezed_vacuum_tail(lam, cutoff)
    if tail > max_tail:
        raise CutoffError(
            f"cutoff {cutoff} leaves population {tail:.2e} above the cutoff at "
            f"lambda={lam} (limit {max_tail:.0e}); try cutoff >= "
            f"{adaptive_cutoff(lam, max_tail, cutoff)}"
        )
    k = np.arange(cutoff // 2 + 1)
    amp = np.zeros(cutoff + 1)
    amp[::2] = np.exp(0.5 * _log_sv_populations(lam, k))
    return FockDensityMatrix(np.outer(amp, amp), tail=tail)


def expect_number(rho: FockDensityMatrix) -> float:
    """Mean photon number ``sum_n n rho[n, n]``."""
    return float(np.arange(rho.dim) @ rho.diagonal())


def purity(rho: FockDensityMatrix) -> float:
    """``Tr(rho^2)``."""
    return float(np.sum(np.abs(rho.elements) ** 2))


def _moments(rho: FockDensityMatrix):
    r = rho.elements
    n = np.arange(rho.dim)
    a1 = np.sum(np.sqrt(n[1:]) * r.diagonal(-1))
    a2 = np.sum(np.sqrt(n[1:-1] * n[2:]) * r.diagonal(-2))
    return a1, a2, expect_number(rho)


def quadrature_variance(rho: FockDensityMatrix, theta: float) -> float:
    """Variance of ``X_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2)``.

    Built from ``<a>``, ``<a^2>`` and ``<a^dag a>`` with the canonical
    commutator, so the truncation edge does not distort ``<a a^dag>``.
    """
    a1, a2, nbar = _moments(rho)
    e = np.exp(-1j * theta)
    mean = math.sqrt(2.0) * (a1 * e).real
    second = ((a2 * e * e).real * 2 + 2 * nbar + 1) / 2
    return float(second - mean * mean)


def coherent_amplitudes(z, cutoff: int) -> np.ndarray:
    """Fock amplitudes ``<m|z>`` of normalized coherent states.

    Returns an array of shape ``np.shape(z) + (cutoff + 1,)``.
    """
    z = np.asarray(z, dtype=complex)[..., None]
    m = np.arange(cutoff + 1)
    logmag = -0.5 * np.abs(z) ** 2 + xlogy(m, np.abs(z)) - 0.5 * log_factorial(m)
    return np.exp(logmag + 1j * m * np.angle(z))


def qstate_amplitudes(q, frame: QuadratureFrame, cutoff: int) -> np.ndarray:
    """Fock amplitudes ``<n|q>_{f,g}`` of the rotated-quadrature eigenstate.

    The state is ``A exp[u a^dag + w a^dag^2]|0>`` with ``u = sqrt(2) q/B`` and
    ``w = -B*/(2B)``. Its power-series coefficients obey
    ``(n+1) c_{n+1} = u c_n + 2 w c_{n-1}``, so the normalized amplitudes
    ``v_n = sqrt(n!) c_n`` follow

        v_{n+1} = (u v_n + 2 w sqrt(n) v_{n-1}) / sqrt(n+1),

    which is forward stable. Summing the double series term by term is not:
    it cancels to nothing for ``n >~ 60`` once ``|q| >~ 2``.

    Returns shape ``np.shape(q) + (cutoff + 1,)``.
    """
    q = np.asarray(q, dtype=float)
    B = frame.B
    u = math.sqrt(2.0) * q / B
    w = -B.conjugate() / (2 * B)
    out = np.zeros(q.shape + (cutoff + 1,), dtype=complex)
    out[..., 0] = (math.pi * frame.norm2) ** -0.25 * np.exp(-q * q / (2 * frame.norm2))
    if cutoff >= 1:
        out[..., 1] = u * out[..., 0]
    for n in range(1, cutoff):
        out[..., n + 1] = (u * out[..., n] + 2 * w * math.sqrt(n) * out[..., n - 1]) / math.sqrt(n + 1)
    return out


def tomogram_numeric(rho: FockDensityMatrix, q, frame: QuadratureFrame, tol: float = 1e-8):
    """Quadrature distribution ``<q|rho|q>_{f,g}`` from the Fock matrix.

    Raises
    ------
    CutoffError
        If the terms involving the top Fock level contribute more than
        ``tol`` at any requested ``q``: the state is then not resolved by
        its cutoff.
    """
    scalar = np.ndim(q) == 0
    v = qstate_amplitudes(np.atleast_1d(q), frame, rho.cutoff)
    rv = v @ rho.elements.T  # (rho v)_m for each q
    edge = 2 * np.abs(v[:, -1]) * np.abs(rv[:, -1])
    if np.max(edge) > tol:
        raise CutoffError(
            f"top Fock level contributes {np.max(edge):.2e} to the tomogram "
            f"(limit {tol:.0e}); increase the cutoff"
        )
    r = np.einsum("qm,qm->q", v.conj(), rv).real
    return float(r[0]) if scalar else r


# --- Wigner function -----------------------------------------------------
#
# The defining integral carries the prefactor exp(2|alpha|^2), so summing it
# as written cancels catastrophically away from the origin. The default path
# evaluates the same integral for D(alpha)^dag rho D(alpha) at the origin,
#
#     W(alpha) = int d^2gamma/pi^2 <gamma|rho|2 alpha - gamma> exp(alpha* gamma - alpha gamma*),
#
# whose integrand is bounded by 1, with the trapezoid rule on a lattice that
# is shared by every alpha on a compatible grid.

_SUPPORT_EPS = 1e-26
_DEFAULT_STEP = 0.1


class _CoherentLattice:
    """Coherent-state overlaps of ``rho`` on the lattice ``origin + h Z^2``."""

    def __init__(self, rho: FockDensityMatrix, origin: complex, h: float):
        self.origin = complex(origin)
        self.h = h
        w, v = np.linalg.eigh(rho.elements)
        keep = np.abs(w) > 1e-15
        self.weights = w[keep]
        self.vectors = v[:, keep]
        self.cutoff = rho.cutoff
        nbar = max(expect_number(rho), 0.0)
        radius = math.sqrt((2 * nbar + 1) * math.log(1 / _SUPPORT_EPS)) + 1.0
        while not self._build(radius):
            radius *= 1.4

    def _overlaps(self, z: np.ndarray) -> np.ndarray:
        # <z|v_k> for every kept eigenvector
        return coherent_amplitudes(z, self.cutoff).conj() @ self.vectors

    def _build(self, radius: float) -> bool:
        h = self.h
        c = np.round(self.origin.real / h), np.round(self.origin.imag / h)
        # the lattice is indexed relative to ``origin``; the box covers |z| <= radius
        m = int(np.ceil(radius / h)) + 1
        lo_i, hi_i = int(-m - c[0]), int(m - c[0])
        lo_j, hi_j = int(-m - c[1]), int(m - c[1])
        ii = np.arange(lo_i, hi_i + 1)
        jj = np.arange(lo_j, hi_j + 1)
        index = np.full((ii.size, jj.size), -1, dtype=np.intp)
        kept_ij, kept_f = [], []
        edge_max = 0.0
        count = 0
        for row, i in enumerate(ii):
            z = self.origin + h * (i + 1j * jj)
            f = self._overlaps(z)
            q = (np.abs(f) ** 2) @ self.weights
            if row in (0, ii.size - 1):
                edge_max = max(edge_max, float(np.max(q)))
            else:
                edge_max = max(edge_max, float(q[0]), float(q[-1]))
            sel = np.nonzero(q > _SUPPORT_EPS)[0]
            index[row, sel] = count + np.arange(sel.size)
            count += sel.size
            kept_ij.append(np.stack([np.full(sel.size, i), jj[sel]], axis=1))
            kept_f.append(f[sel])
        if edge_max > _SUPPORT_EPS:
            return False
        self.lo = (lo_i, lo_j)
        self.index = index
        self.ij = np.concatenate(kept_ij)
        self.points = self.origin + h * (self.ij[:, 0] + 1j * self.ij[:, 1])
        self.f = np.concatenate(kept_f)
        self.fw = self.f * self.weights
        return True

    def wigner(self, alpha: complex, tol: float | None) -> float:
        h = self.h
        kk = 2 * (alpha - self.origin) / h
        k = np.round([kk.real, kk.imag]).astype(np.intp)
        if abs(kk.real - k[0]) > 1e-6 or abs(kk.imag - k[1]) > 1e-6:
            raise ValueError("alpha is not on the half-lattice of this quadrature")
        partner = k[None, :] - self.ij
        pi = partner[:, 0] - self.lo[0]
        pj = partner[:, 1] - self.lo[1]
        ok = (pi >= 0) & (pi < self.index.shape[0]) & (pj >= 0) & (pj < self.index.shape[1])
        sel = np.nonzero(ok)[0]
        rows = self.index[pi[sel], pj[sel]]
        good = rows >= 0
        sel, rows = sel[good], rows[good]
        gamma = self.points[sel]
        # <gamma|rho|delta> = sum_k w_k <gamma|v_k> <v_k|delta>
        kernel = np.einsum("pk,pk->p", self.fw[sel], self.f[rows].conj())
        phase = np.exp(np.conj(alpha) * gamma - alpha * np.conj(gamma))
        terms = kernel * phase
        fine = terms.sum() * h * h / math.pi**2
        if abs(fine.imag) > 1e-9:
            raise QuadratureError(f"Wigner value has imaginary residue {fine.imag:.2e}")
        if tol is not None:
            even = ((self.ij[sel, 0] % 2) == 0) & ((self.ij[sel, 1] % 2) == 0)
            coarse = terms[even].sum() * 4 * h * h / math.pi**2
            if abs(coarse.real - fine.real) > tol:
                raise QuadratureError(
                    f"Wigner quadrature not converged at alpha={alpha}: step change "
                    f"{abs(coarse.real - fine.real):.2e} > {tol:.0e}"
                )
        return float(fine.real)


def _wigner_direct(rho: FockDensityMatrix, alpha: complex, radius: float, nodes: int, tol):
    a = complex(alpha)

    def integrand(beta):
        amp_p = coherent_amplitudes(beta, rho.cutoff)
        amp_m = coherent_amplitudes(-beta, rho.cutoff)
        elem = np.einsum("...m,mn,...n->...", amp_m.conj(), rho.elements, amp_p)
        return elem * np.exp(-2 * (beta * a.conjugate() - beta.conjugate() * a))

    val = math.exp(2 * abs(a) ** 2) * gauss_quad_2d(integrand, radius, nodes, tol) / math.pi**2
    if abs(val.imag) > 1e-9:
        raise QuadratureError(f"Wigner value has imaginary residue {val.imag:.2e}")
    return float(val.real)


def wigner_numeric(
    rho: FockDensityMatrix,
    alpha: complex,
    *,
    method: str = "displaced",
    step: float = _DEFAULT_STEP,
    tol: float | None = 1e-8,
    radius: float = 7.0,
    nodes: int = 201,
) -> float:
    """Wigner function of ``rho`` at ``alpha`` by 2D quadrature over beta.

    ``method="displaced"`` (default) integrates the coherent-state kernel of
    the displaced state with a trapezoid rule of spacing ``step`` and checks
    it against the rule of spacing ``2*step``. ``method="direct"`` sums the
    defining integral literally with :func:`gauss_quad_2d`; it is only
    accurate while ``exp(2|alpha|^2)`` stays modest (``|alpha| <~ 1.5``).

    Raises
    ------
    QuadratureError
        If the step-doubling check differs by more than ``tol``.
    """
    if method == "direct":
        return _wigner_direct(rho, alpha, radius, nodes, tol)
    if method != "displaced":
        raise ValueError(f"unknown method {method!r}")
    return _CoherentLattice(rho, complex(alpha), step).wigner(complex(alpha), tol)


def _lattice_step(spacings, step: float) -> float | None:
    """Largest ``h <= step`` with every spacing a multiple of ``h/2``."""
    spacings = [s for s in spacings if s > 0]
    if not spacings:
        return step
    base = spacings[0]
    for div in range(int(np.ceil(2 * base / step)), int(np.ceil(2 * base / step)) + 64):
        h = 2 * base / div
        if all(abs(2 * s / h - round(2 * s / h)) < 1e-9 for s in spacings):
            return h
    return None


def wigner_numeric_grid(
    rho: FockDensityMatrix,
    re_alpha,
    im_alpha,
    *,
    step: float = _DEFAULT_STEP,
    tol: float | None = 1e-8,
    threads: int | None = None,
) -> np.ndarray:
    """Wigner function on the tensor grid ``re_alpha x im_alpha``.

    Returns an array of shape ``(len(re_alpha), len(im_alpha))``. Uniform
    grids share one quadrature lattice; results are identical to pointwise
    calls with the same step.
    """
    re_alpha = np.atleast_1d(np.asarray(re_alpha, dtype=float))
    im_alpha = np.atleast_1d(np.asarray(im_alpha, dtype=float))
    spacings = [abs(d) for d in np.diff(re_alpha)] + [abs(d) for d in np.diff(im_alpha)]
    h = _lattice_step(spacings, step)
    points = [complex(x, y) for x in re_alpha for y in im_alpha]
    if h is None:
        values = [wigner_numeric(rho, a, step=step, tol=tol) for a in points]
    else:
        lattice = _CoherentLattice(rho, complex(re_alpha[0], im_alpha[0]), h)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda a: lattice.wigner(a, tol), points))
    return np.array(values).reshape(re_alpha.size, im_alpha.size)
