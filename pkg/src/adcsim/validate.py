"""Closed form against Fock-space oracles: the checks behind ``adc-sim validate``.

Every check reduces to one nonnegative defect compared with a declared
tolerance. Boolean properties (monotonicity, parity) report the number of
violations with tolerance 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic, channel, fock, specfun
from .analytic import ChannelPoint

__all__ = ["Check", "ValidationConfig", "validation_cutoff", "run_checks", "SCHEMA"]

SCHEMA = "adc-validate/1"


@dataclass(frozen=True)
class Check:
    name: str
    max_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tol)

    def as_dict(self) -> dict:
        return {"max_error": float(self.max_error), "tol": self.tol, "pass": self.passed}


@dataclass(frozen=True)
class ValidationConfig:
    lambdas: tuple = (0.0, 0.3, 0.5, 1.0, 1.5)
    kappa_ts: tuple = (0.0, 0.1, 0.5, 1.0, 2.0)
    figure_lambda: float = 1.0
    figure_kappa_ts: tuple = (0.0, 0.5, 1.0, 2.0)
    cutoff: int | None = None
    wigner_axis: tuple = (-3.0, 3.0, 21)
    threads: int | None = None
    max_tail: float = fock.DEFAULT_MAX_TAIL
    seed: int = 20240611


def validation_cutoff(lam: float, cutoff: int | None = None, tail: float = 1e-12) -> int:
    """Fixed ``cutoff`` if given, otherwise ``max(64, adaptive_cutoff(lam, tail))``."""
    if cutoff is not None:
        return cutoff
    return max(64, fock.adaptive_cutoff(lam, tail))


def _violations_decreasing(values) -> int:
    return int(np.sum(np.diff(np.asarray(values)) >= 0))


def _random_state(dim: int, rng: np.random.Generator) -> fock.FockDensityMatrix:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return fock.FockDensityMatrix(rho / np.trace(rho).real)


def _wigner_t0(alpha, lam):
    a2 = np.abs(alpha) ** 2
    return np.exp(-2 * a2 * math.cosh(2 * lam) + 2 * (alpha * alpha).real * math.sinh(2 * lam)) / math.pi


def check_specfun(cfg: ValidationConfig) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    t = rng.uniform(-0.9, 0.9, 100)
    x = rng.uniform(-1.0, 1.0, 100)
    y = rng.uniform(-1.0, 1.0, 100)
    mehler = np.abs(specfun.mehler_series(t, x, y, 200) - specfun.mehler_closed_form(t, x, y))
    xs = rng.uniform(1.05, 3.0, 100)
    leg = max(
        float(np.max(np.abs(specfun.legendre_power_series(n, xs) / specfun.legendre_p(n, xs) - 1)))
        for n in range(13)
    )
    return [
        Check("mehler_identity", float(mehler.max()), 1e-9),
        Check("legendre_identity_rel", leg, 1e-10),
    ]


def check_analytic(cfg: ValidationConfig) -> list[Check]:
    trace = dist = 0.0
    negative = 0
    parity_t0 = 0.0
    parity_pos = 0
    t0_formula = 0.0
    decay = 0.0
    for lam in cfg.lambdas:
        for kt in sorted(set(cfg.kappa_ts) | {5.0}):
            p = ChannelPoint(lam, kt)
            trace = max(trace, abs(analytic.trace_identity(analytic.evolved_params(p)) - 1))
            d = analytic.photon_dist(p)
            dist = max(dist, abs(d.probs.sum() - 1))
            negative += int(np.sum(d.probs < 0))
            decay = max(decay, abs(analytic.mean_photon(p) - math.exp(-2 * kt) * math.sinh(lam) ** 2))
            odd = d.probs[1::2]
            if kt == 0:
                parity_t0 = max(parity_t0, float(np.max(np.abs(odd), initial=0.0)))
                k = np.arange(d.probs[::2].size)
                ref = np.array([
                    math.comb(2 * j, j) / 4.0**j / math.cosh(lam) * math.tanh(lam) ** (2 * j) for j in k
                ])
                t0_formula = max(t0_formula, float(np.max(np.abs(d.probs[::2] - ref))))
            elif lam > 0:
                parity_pos += int(np.sum(odd[: min(odd.size, 10)] <= 0))

    # monotone decay and lambda ordering on the default figure grid
    kts = np.linspace(0.0, 3.0, 301)
    fig_lams = (0.0, 0.1, 0.3, 0.5, 1.0)
    curves = np.array([[analytic.mean_photon((lam, kt)) for kt in kts] for lam in fig_lams])
    curve_decay = float(np.max(np.abs(curves - np.exp(-2 * kts) * np.sinh(np.array(fig_lams))[:, None] ** 2)))
    mono = sum(_violations_decreasing(c) for c in curves[1:])
    order = int(np.sum(np.diff(curves[:, 1:], axis=0) <= 0))

    # squeezing parameter of the output state
    beta_viol = 0
    for lam in (lam for lam in cfg.lambdas if lam > 0):
        grid = np.linspace(0.0, 5.0, 51)[1:]
        betas = np.array([analytic.evolved_params((lam, kt)).beta_s for kt in grid])
        beta_viol += int(np.sum(betas >= math.tanh(lam))) + _violations_decreasing(betas)

    return [
        Check("trace_identity", trace, 1e-12),
        Check("photon_dist_normalization", dist, 1e-9),
        Check("photon_prob_negative_count", negative, 0),
        Check("parity_t0_odd_max", parity_t0, 0.0),
        Check("parity_odd_nonpositive_count", parity_pos, 0),
        Check("t0_photon_formula", t0_formula, 1e-12),
        Check("mean_photon_decay_law", max(decay, curve_decay), 1e-12),
        Check("mean_photon_monotone_violations", mono, 0),
        Check("mean_photon_ordering_violations", order, 0),
        Check("beta_squeezing_violations", beta_viol, 0),
    ]


def check_channel(cfg: ValidationConfig) -> tuple[list[Check], float]:
    completeness = 0.0
    for cutoff in sorted({64, 128} | ({cfg.cutoff} if cfg.cutoff else set())):
        for kt in sorted(set(cfg.kappa_ts) | {5.0}):
            completeness = max(completeness, channel.kraus_family(kt, cutoff).completeness_defect())

    closed = rk4 = trace_k = trace_r = positivity = variance = even = 0.0
    diag = 0.0
    for lam in cfg.lambdas:
        cutoff = validation_cutoff(lam, cfg.cutoff)
        sv = fock.squeezed_vacuum(lam, cutoff, max_tail=cfg.max_tail)
        # RK4 and Kraus propagate the same truncated dynamics; a modest
        # cutoff is enough to compare them
        small = fock.squeezed_vacuum(lam, min(cutoff, 128), max_tail=1.0)
        for kt in cfg.kappa_ts:
            kraus = channel.apply_channel(sv, kt)
            closed_rho = analytic.evolved_density_matrix((lam, kt), cutoff)
            closed = max(closed, float(np.max(np.abs(kraus.elements - closed_rho.elements))))
            trace_k = max(trace_k, abs(kraus.trace() - sv.trace()))
            positivity = max(positivity, -kraus.min_eigenvalue(), -closed_rho.min_eigenvalue())
            even = max(even, float(np.max(np.abs(kraus.elements[::2, 1::2]), initial=0.0)))
            want = math.exp(-2 * kt) * math.exp(-2 * lam) / 2 + (1 - math.exp(-2 * kt)) / 2
            variance = max(variance, abs(fock.quadrature_variance(kraus, math.pi / 2) - want))
            if lam == cfg.figure_lambda and kt in cfg.figure_kappa_ts:
                probs = analytic.photon_dist((lam, kt), n_max=20).probs
                diag = max(diag, float(np.max(np.abs(probs - kraus.diagonal()[:21]))))
            if kt > 0:
                k_small = channel.apply_channel(small, kt)
                r_small = channel.lindblad_rk4(small, kt)
                rk4 = max(rk4, float(np.max(np.abs(k_small.elements - r_small.elements))))
                trace_r = max(trace_r, abs(r_small.trace() - small.trace()))

    rng = np.random.default_rng(cfg.seed)
    rho0 = _random_state(33, rng)
    semigroup = number_law = 0.0
    for s, t in ((0.1, 0.4), (0.5, 1.0), (1.0, 2.0)):
        twice = channel.apply_channel(channel.apply_channel(rho0, s), t)
        once = channel.apply_channel(rho0, s + t)
        semigroup = max(semigroup, float(np.max(np.abs(twice.elements - once.elements))))
        number_law = max(
            number_law,
            abs(fock.expect_number(once) - math.exp(-2 * (s + t)) * fock.expect_number(rho0)),
        )

    checks = [
        Check("kraus_completeness", completeness, 1e-12),
        Check("closed_form_vs_kraus", closed, 1e-8),
        Check("kraus_vs_rk4", rk4, 1e-8),
        Check("kraus_trace_preservation", trace_k, 1e-12),
        Check("rk4_trace_preservation", trace_r, 1e-10),
        Check("positivity", max(positivity, 0.0), 1e-10),
        Check("even_coherence_support", even, 0.0),
        Check("semigroup", semigroup, 1e-10),
        Check("number_decay_law", number_law, 1e-10),
        Check("photon_dist_vs_kraus_diagonal", diag, 1e-8),
        Check("quadrature_variance_law", variance, 1e-8),
    ]
    return checks, completeness


def check_wigner(cfg: ValidationConfig) -> list[Check]:
    lam = cfg.figure_lambda
    lo, hi, count = cfg.wigner_axis
    axis = np.linspace(lo, hi, int(count))
    alpha = axis[:, None] + 1j * axis[None, :]
    cutoff = validation_cutoff(lam, cfg.cutoff)
    pointwise = t0 = 0.0
    for kt in cfg.figure_kappa_ts:
        rho = analytic.evolved_density_matrix((lam, kt), cutoff)
        num = fock.wigner_numeric_grid(rho, axis, axis, threads=cfg.threads)
        pointwise = max(pointwise, float(np.max(np.abs(num - analytic.wigner_analytic(alpha, (lam, kt))))))
        if kt == 0:
            t0 = float(np.max(np.abs(num - _wigner_t0(alpha, lam))))

    quad = coarse = 0.0
    coarse_axis = np.linspace(-6.0, 6.0, 61)
    coarse_alpha = coarse_axis[:, None] + 1j * coarse_axis[None, :]
    cell = (coarse_axis[1] - coarse_axis[0]) ** 2
    for kt in cfg.figure_kappa_ts:
        p = (lam, kt)
        total = specfun.gauss_quad_2d(lambda z: analytic.wigner_analytic(z, p), 8.0, 201, tol=1e-9).real
        quad = max(quad, abs(total - 0.5))
        coarse = max(coarse, abs(analytic.wigner_analytic(coarse_alpha, p).sum() * cell - 0.5))
    return [
        Check("wigner_analytic_vs_numeric", pointwise, 1e-6),
        Check("wigner_t0_closed_form", t0, 1e-7),
        Check("wigner_integral_quadrature", quad, 1e-6),
        Check("wigner_integral_coarse_grid", coarse, 1e-4),
    ]


def check_tomogram(cfg: ValidationConfig) -> list[Check]:
    lam = cfg.figure_lambda
    # the top-level guard of tomogram_numeric needs a deeper cutoff than the
    # matrix comparisons
    cutoff = validation_cutoff(lam, cfg.cutoff, tail=1e-16)
    q = np.linspace(-6.0, 6.0, 121)
    wide = np.linspace(-20.0, 20.0, 801)
    agree = norm = negative = 0.0
    frames = [fock.QuadratureFrame(1.0, 0.0), fock.QuadratureFrame(0.0, 1.0),
              fock.QuadratureFrame(math.sqrt(0.5), math.sqrt(0.5))]
    scaled = [fock.QuadratureFrame(0.5, 0.0), fock.QuadratureFrame(1.2, -1.6)]
    for kt in cfg.figure_kappa_ts:
        rho = analytic.evolved_density_matrix((lam, kt), cutoff)
        for frame in frames:
            # guard disabled: a shallow cutoff shows up as disagreement instead
            num = fock.tomogram_numeric(rho, q, frame, tol=math.inf)
            agree = max(agree, float(np.max(np.abs(num - analytic.tomogram_analytic(q, frame, (lam, kt))))))
        for frame in frames + scaled:
            r = fock.tomogram_numeric(rho, wide, frame, tol=math.inf)
            norm = max(norm, abs(np.trapezoid(r, wide) - 1))
            negative = max(negative, -float(r.min()))

    limit = 0.0
    for frame in frames + scaled:
        a2 = np.exp(-q * q / frame.norm2) / math.sqrt(math.pi * frame.norm2)
        limit = max(limit, float(np.max(np.abs(analytic.tomogram_analytic(q, frame, (lam, 20.0)) - a2))))
    return [
        Check("tomogram_analytic_vs_numeric", agree, 1e-6),
        Check("tomogram_normalization", norm, 1e-6),
        Check("tomogram_negativity", max(negative, 0.0), 1e-12),
        Check("tomogram_vacuum_limit", limit, 1e-8),
    ]


def run_checks(cfg: ValidationConfig | None = None) -> dict:
    """Run the whole suite and return the JSON-ready report."""
    cfg = cfg or ValidationConfig()
    checks = check_specfun(cfg) + check_analytic(cfg)
    channel_checks, completeness = check_channel(cfg)
    checks += channel_checks + check_wigner(cfg) + check_tomogram(cfg)
    return {
        "schema": SCHEMA,
        "config": {
            "lambdas": list(cfg.lambdas),
            "kappa_ts": list(cfg.kappa_ts),
            "cutoffs": {str(lam): validation_cutoff(lam, cfg.cutoff) for lam in cfg.lambdas},
        },
        "kraus_completeness_max_defect": completeness,
        "checks": {c.name: c.as_dict() for c in checks},
        "all_pass": all(c.passed for c in checks),
    }
