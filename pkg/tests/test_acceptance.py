"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary.
"""

import math
import subprocess
import sys
import time

import numpy as np

from adcsim import analytic, channel, fock, specfun
from adcsim.cli import RunConfig, run_fig1, run_fig2, run_wigner

LAMBDAS = (0.3, 0.5, 1.0, 1.5)
KAPPA_TS = (0.0, 0.1, 0.5, 1.0, 2.0)
FIGURE_KTS = (0.0, 0.5, 1.0, 2.0)


def _grid_cutoff(lam):
    return 128 if lam == 1.5 else 64


def test_criterion_01_closed_form_vs_kraus(criterion):
    worst, where = 0.0, None
    for lam in LAMBDAS:
        n = _grid_cutoff(lam)
        sv = fock.squeezed_vacuum(lam, n)
        for kt in KAPPA_TS:
            err = np.max(np.abs(
                analytic.evolved_density_matrix((lam, kt), n).elements
                - channel.apply_channel(sv, kt).elements
            ))
            if err > worst:
                worst, where = float(err), (lam, kt)
    criterion(1, worst <= 1e-8,
              f"closed form vs Kraus at cutoff 64/128: max {worst:.2e} at (lam, kt)={where} (tol 1e-8)")


def test_criterion_02_kraus_vs_rk4(criterion):
    worst = 0.0
    for lam in LAMBDAS:
        sv = fock.squeezed_vacuum(lam, _grid_cutoff(lam))
        for kt in KAPPA_TS[1:]:
            err = np.max(np.abs(
                channel.apply_channel(sv, kt).elements - channel.lindblad_rk4(sv, kt, dt=1e-3).elements
            ))
            worst = max(worst, float(err))
    small = fock.FockDensityMatrix(fock.squeezed_vacuum(1.0, 64).elements[:17, :17])
    ref = channel.apply_channel(small, 1.0).elements
    errs = [np.max(np.abs(channel.lindblad_rk4(small, 1.0, dt=dt).elements - ref)) for dt in (0.02, 0.01, 0.005)]
    order = min(math.log2(a / b) for a, b in zip(errs, errs[1:]))
    criterion(2, worst <= 1e-8 and order >= 3.8,
              f"Kraus vs RK4(dt=1e-3) max {worst:.2e} (tol 1e-8); RK4 order {order:.3f} (>= 3.8)")


def test_criterion_03_kraus_completeness(criterion):
    worst = max(
        channel.kraus_family(kt, n).completeness_defect()
        for kt in KAPPA_TS + (5.0,)
        for n in (8, 32, 64, 128)
    )
    criterion(3, worst <= 1e-12, f"Kraus completeness defect max {worst:.2e} (tol 1e-12)")


def test_criterion_04_trace_and_distribution(criterion):
    trace = dist = 0.0
    for lam in (0.0,) + LAMBDAS:
        for kt in KAPPA_TS + (5.0,):
            trace = max(trace, abs(analytic.trace_identity(analytic.evolved_params((lam, kt))) - 1))
            dist = max(dist, abs(analytic.photon_dist((lam, kt)).probs.sum() - 1))
    criterion(4, trace <= 1e-12 and dist <= 1e-9,
              f"trace identity max |.-1| {trace:.2e} (tol 1e-12); photon_dist sum {dist:.2e} (tol 1e-9)")


def test_criterion_05_figure1(criterion):
    cfg = RunConfig(command="fig1", lambdas=(0.0, 0.1, 0.3, 0.5, 1.0),
                    kappa_ts=tuple(np.linspace(0, 3, 301)))
    _, rows = run_fig1(cfg)
    data = np.array(rows)
    law = np.max(np.abs(data[:, 2] - np.exp(-2 * data[:, 0]) * np.sinh(data[:, 1]) ** 2))
    curves = data[:, 2].reshape(5, 301)
    decreasing = all(np.all(np.diff(c) < 0) for c in curves[1:]) and np.all(curves[0] == 0)
    far = analytic.mean_photon((1.0, 40.0))
    ordered = bool(np.all(np.diff(curves[:, 1:], axis=0) > 0))
    ok = law <= 1e-12 and decreasing and ordered and far < 1e-30
    criterion(5, ok,
              f"mean photon law max {law:.2e} (tol 1e-12); decreasing={decreasing}; "
              f"n(kt=40)={far:.1e}; ordered bottom-to-top={ordered}")


def test_criterion_06_figure2(criterion):
    lam = 1.0
    _, rows = run_fig2(RunConfig(command="fig2", lambdas=(lam,), kappa_ts=FIGURE_KTS))
    data = np.array(rows)
    t0 = data[data[:, 0] == 0]
    odd_zero = bool(np.all(t0[1::2, 2] == 0.0))
    k = range(11)
    ref = np.array([math.factorial(2 * j) / (4**j * math.factorial(j) ** 2) / math.cosh(lam) * math.tanh(lam) ** (2 * j)
                    for j in k])
    even = float(np.max(np.abs(t0[::2, 2] - ref)))
    sv = fock.squeezed_vacuum(lam, fock.adaptive_cutoff(lam, 1e-12))
    oracle = 0.0
    for kt in FIGURE_KTS:
        panel = data[data[:, 0] == kt][:, 2]
        oracle = max(oracle, float(np.max(np.abs(panel - channel.apply_channel(sv, kt).diagonal()[:21]))))
    criterion(6, odd_zero and even <= 1e-12 and oracle <= 1e-8,
              f"odd p(n, 0) exactly 0: {odd_zero}; t=0 even formula {even:.2e} (tol 1e-12); "
              f"Kraus diagonal {oracle:.2e} (tol 1e-8)")


def test_criterion_07_figure3(criterion):
    lam = 1.0
    axis = np.linspace(-3, 3, 21)
    alpha = axis[:, None] + 1j * axis[None, :]
    cutoff = fock.adaptive_cutoff(lam, 1e-12)
    pointwise = 0.0
    for kt in FIGURE_KTS:
        rho = analytic.evolved_density_matrix((lam, kt), cutoff)
        num = fock.wigner_numeric_grid(rho, axis, axis)
        pointwise = max(pointwise, float(np.max(np.abs(num - analytic.wigner_analytic(alpha, (lam, kt))))))
    # coarse grid: the default figure grid as emitted by the CLI
    _, rows = run_wigner(RunConfig(command="fig3", lambdas=(lam,), kappa_ts=FIGURE_KTS))
    data = np.array(rows)
    cell = (12 / 60) ** 2
    coarse = max(abs(data[data[:, 0] == kt][:, 3].sum() * cell - 0.5) for kt in FIGURE_KTS)
    quad = max(
        abs(specfun.gauss_quad_2d(lambda z: analytic.wigner_analytic(z, (lam, kt)), 8.0, 201, tol=1e-9).real - 0.5)
        for kt in FIGURE_KTS
    )
    criterion(7, pointwise <= 1e-6 and coarse <= 1e-4 and quad <= 1e-6,
              f"Wigner analytic vs numeric {pointwise:.2e} (tol 1e-6); integral-1/2 coarse grid {coarse:.2e} "
              f"(tol 1e-4), quadrature {quad:.2e} (tol 1e-6)")


def test_criterion_08_tomogram(criterion):
    lam = 1.0
    cutoff = fock.adaptive_cutoff(lam, 1e-16)
    q = np.linspace(-6, 6, 121)
    wide = np.linspace(-20, 20, 801)
    frames = [fock.QuadratureFrame(1, 0), fock.QuadratureFrame(0, 1),
              fock.QuadratureFrame(math.sqrt(0.5), math.sqrt(0.5))]
    agree = norm = 0.0
    for kt in FIGURE_KTS:
        rho = analytic.evolved_density_matrix((lam, kt), cutoff)
        for fr in frames:
            agree = max(agree, float(np.max(np.abs(fock.tomogram_numeric(rho, q, fr)
                                                   - analytic.tomogram_analytic(q, fr, (lam, kt))))))
            norm = max(norm, abs(np.trapezoid(fock.tomogram_numeric(rho, wide, fr), wide) - 1))
    limit = max(
        float(np.max(np.abs(analytic.tomogram_analytic(q, fr, (lam, 20.0))
                            - np.exp(-q * q / fr.norm2) / math.sqrt(math.pi * fr.norm2))))
        for fr in frames
    )
    criterion(8, agree <= 1e-6 and norm <= 1e-6 and limit <= 1e-8,
              f"tomogram analytic vs Fock {agree:.2e} (tol 1e-6); normalization {norm:.2e} (tol 1e-6); "
              f"vacuum limit {limit:.2e} (tol 1e-8)")


def test_criterion_09_squeezing_decay(criterion):
    grid = np.linspace(0, 5, 51)[1:]
    below = decreasing = True
    for lam in LAMBDAS:
        betas = np.array([analytic.evolved_params((lam, kt)).beta_s for kt in grid])
        below &= bool(np.all(betas < math.tanh(lam)))
        decreasing &= bool(np.all(np.diff(betas) < 0))
    var = 0.0
    for lam in LAMBDAS:
        sv = fock.squeezed_vacuum(lam, fock.adaptive_cutoff(lam, 1e-12))
        for kt in KAPPA_TS:
            want = math.exp(-2 * kt) * math.exp(-2 * lam) / 2 + (1 - math.exp(-2 * kt)) / 2
            var = max(var, abs(fock.quadrature_variance(channel.apply_channel(sv, kt), math.pi / 2) - want))
    criterion(9, below and decreasing and var <= 1e-8,
              f"beta < tanh(lam): {below}; strictly decreasing on 50 points: {decreasing}; "
              f"variance law {var:.2e} (tol 1e-8)")


def test_criterion_10_specfun_properties(criterion):
    rng = np.random.default_rng(10)
    t = rng.uniform(-0.9, 0.9, 100)
    x = rng.uniform(-1, 1, 100)
    y = rng.uniform(-1, 1, 100)
    mehler = float(np.max(np.abs(specfun.mehler_series(t, x, y, 200) - specfun.mehler_closed_form(t, x, y))))
    xs = rng.uniform(1.05, 3.0, 100)
    leg = max(float(np.max(np.abs(specfun.legendre_power_series(n, xs) / specfun.legendre_p(n, xs) - 1)))
              for n in range(13))
    criterion(10, mehler <= 1e-9 and leg <= 1e-10,
              f"Mehler N=200 {mehler:.2e} (tol 1e-9); Legendre identity rel {leg:.2e} (tol 1e-10)")


def test_criterion_11_validate_command(criterion):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "adcsim.cli", "validate"], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    criterion(11, proc.returncode == 0 and elapsed < 60,
              f"adc-sim validate exit {proc.returncode} in {elapsed:.1f} s (limit 60 s)")
