"""``adc-sim``: figure data and the validation suite from the command line.

Exit codes: 0 success, 1 validation or numerical failure, 2 usage or
configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analytic, channel, fock
from .errors import AdcSimError, CutoffError
from .validate import ValidationConfig, run_checks

__all__ = ["RunConfig", "main", "run_fig1", "run_fig2", "run_wigner", "run_tomogram", "run_validate"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

FIGURE_KAPPA_TS = (0.0, 0.5, 1.0, 2.0)
DEFAULTS = {
    "fig1": {"lambdas": (0.0, 0.1, 0.3, 0.5, 1.0), "kappa_ts": "0:3:301"},
    "fig2": {"lambdas": (1.0,), "kappa_ts": FIGURE_KAPPA_TS},
    "fig3": {"lambdas": (1.0,), "kappa_ts": FIGURE_KAPPA_TS},
    "tomogram": {"lambdas": (1.0,), "kappa_ts": FIGURE_KAPPA_TS},
    "validate": {"lambdas": ValidationConfig.lambdas, "kappa_ts": ValidationConfig.kappa_ts},
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    lambdas: tuple
    kappa_ts: tuple
    cutoff: int | None = None
    n_max: int = 20
    alpha_grid: tuple = (-6.0, 6.0, 61)
    q_grid: tuple = (-20.0, 20.0, 801)
    f: float = 1.0
    g: float = 0.0
    normalized: bool = False
    out: str | None = None
    json: bool = False
    threads: int | None = None
    tol: float = fock.DEFAULT_MAX_TAIL

    def __post_init__(self):
        if not self.lambdas:
            raise UsageError("at least one lambda is required")
        if not self.kappa_ts:
            raise UsageError("at least one kappa_t is required")
        for v in self.lambdas + self.kappa_ts:
            if not (math.isfinite(v) and v >= 0):
                raise UsageError(f"lambda and kappa_t must be finite and >= 0, got {v}")
        for name in ("alpha_grid", "q_grid"):
            if int(getattr(self, name)[2]) < 2:
                raise UsageError(f"{name} needs a count >= 2")
        if self.n_max < 0:
            raise UsageError("--n-max must be >= 0")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.cutoff is not None and (self.cutoff < 2 or self.cutoff % 2):
            raise UsageError("--cutoff must be even and >= 2")
        if self.command in ("fig2", "fig3", "wigner", "tomogram") and len(self.lambdas) != 1:
            raise UsageError(f"{self.command} takes a single --lambda")
        if self.command == "tomogram":
            fock.QuadratureFrame(self.f, self.g)


# --- parsing ---------------------------------------------------------------


def parse_grid(text: str) -> tuple:
    """Parse ``min:max:count``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    if count < 2:
        raise argparse.ArgumentTypeError(f"grid count must be >= 2, got {count}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise argparse.ArgumentTypeError(f"grid bounds must be finite, got {text!r}")
    return lo, hi, count


def parse_values(text: str) -> tuple:
    """Parse a comma list ``a,b,c`` or a grid ``min:max:count``."""
    if ":" in text:
        lo, hi, count = parse_grid(text)
        return tuple(float(v) for v in np.linspace(lo, hi, count))
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}: {exc}") from None


def _axis(grid) -> np.ndarray:
    lo, hi, count = grid
    return np.linspace(lo, hi, int(count))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", "--lambdas", dest="lambdas", type=parse_values,
                        help="squeezing parameter(s): a,b,c or min:max:count")
    common.add_argument("--kappa-t", "--kappa-ts", dest="kappa_ts", type=parse_values,
                        help="dimensionless decay time(s): a,b,c or min:max:count")
    common.add_argument("--cutoff", type=int,
                        help="Fock cutoff; on figure commands, use the Fock-space oracle instead of the closed form")
    common.add_argument("--tol", type=float, default=fock.DEFAULT_MAX_TAIL,
                        help="largest squeezed-vacuum population allowed above --cutoff (default %(default)g)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--json", action="store_true", help="write JSON instead of CSV")
    common.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="worker threads for grid evaluation (default %(default)s)")

    parser = argparse.ArgumentParser(
        prog="adc-sim",
        description="Squeezed vacuum in the amplitude-damping channel: figure data and validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fig1", parents=[common], help="mean photon number against kappa_t")
    p2 = sub.add_parser("fig2", parents=[common], help="photon-number distribution")
    p2.add_argument("--n-max", type=int, default=20)
    for name in ("fig3", "wigner"):
        p3 = sub.add_parser(name, parents=[common], help="Wigner function on a grid")
        p3.add_argument("--alpha-grid", type=parse_grid, default=(-6.0, 6.0, 61),
                        help="grid for both Re and Im alpha (default -6:6:61)")
        p3.add_argument("--normalized", action="store_true",
                        help="multiply by 2 so the function integrates to 1")
    pt = sub.add_parser("tomogram", parents=[common], help="quadrature distribution")
    pt.add_argument("--q-grid", type=parse_grid, default=(-20.0, 20.0, 801))
    pt.add_argument("--f", type=float, default=1.0)
    pt.add_argument("--g", type=float, default=0.0)
    sub.add_parser("validate", parents=[common], help="closed form against the Fock-space oracles")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = "fig3" if args.command == "wigner" else args.command
    defaults = DEFAULTS[command]
    kappa_ts = args.kappa_ts
    if kappa_ts is None:
        kappa_ts = defaults["kappa_ts"]
        if isinstance(kappa_ts, str):
            kappa_ts = parse_values(kappa_ts)
    return RunConfig(
        command=command,
        lambdas=tuple(args.lambdas if args.lambdas is not None else defaults["lambdas"]),
        kappa_ts=tuple(kappa_ts),
        cutoff=args.cutoff,
        n_max=getattr(args, "n_max", 20),
        alpha_grid=getattr(args, "alpha_grid", (-6.0, 6.0, 61)),
        q_grid=getattr(args, "q_grid", (-20.0, 20.0, 801)),
        f=getattr(args, "f", 1.0),
        g=getattr(args, "g", 0.0),
        normalized=getattr(args, "normalized", False),
        out=args.out,
        json=args.json,
        threads=args.threads,
        tol=args.tol,
    )


def check_cutoff(cfg: RunConfig) -> None:
    """Reject a cutoff that truncates any requested squeezed vacuum too hard."""
    if cfg.cutoff is None:
        return
    for lam in cfg.lambdas:
        tail = fock.squeezed_vacuum_tail(lam, cfg.cutoff)
        if tail > cfg.tol:
            raise CutoffError(
                f"cutoff {cfg.cutoff} leaves population {tail:.2e} above the cutoff at "
                f"lambda={lam} (limit {cfg.tol:.0e}); try --cutoff "
                f"{fock.adaptive_cutoff(lam, cfg.tol, cfg.cutoff)}"
            )


# --- commands ----------------------------------------------------------------


def _oracle_state(cfg: RunConfig, lam: float, kt: float) -> fock.FockDensityMatrix:
    return channel.apply_channel(fock.squeezed_vacuum(lam, cfg.cutoff, max_tail=cfg.tol), kt)


def run_fig1(cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    rows = []
    for lam in cfg.lambdas:
        for kt in cfg.kappa_ts:
            if cfg.cutoff is None:
                n = analytic.mean_photon((lam, kt))
            else:
                n = fock.expect_number(_oracle_state(cfg, lam, kt))
            rows.append((kt, lam, n))
    return ["kappa_t", "lambda", "mean_n"], rows


def run_fig2(cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    lam = cfg.lambdas[0]
    rows = []
    for kt in cfg.kappa_ts:
        if cfg.cutoff is None:
            probs = analytic.photon_dist((lam, kt), n_max=cfg.n_max).probs
        else:
            diag = _oracle_state(cfg, lam, kt).diagonal()
            probs = np.zeros(cfg.n_max + 1)
            probs[: min(diag.size, probs.size)] = diag[: probs.size]
        rows.extend((kt, n, p) for n, p in enumerate(probs))
    return ["kappa_t", "n", "p"], rows


def run_wigner(cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    lam = cfg.lambdas[0]
    axis = _axis(cfg.alpha_grid)
    alpha = axis[:, None] + 1j * axis[None, :]
    scale = 2.0 if cfg.normalized else 1.0
    rows = []
    for kt in cfg.kappa_ts:
        if cfg.cutoff is None:
            w = analytic.wigner_analytic(alpha, (lam, kt))
        else:
            rho = analytic.evolved_density_matrix((lam, kt), cfg.cutoff)
            w = fock.wigner_numeric_grid(rho, axis, axis, threads=cfg.threads)
        for i, x in enumerate(axis):
            for j, y in enumerate(axis):
                rows.append((kt, x, y, scale * w[i, j]))
    return ["kappa_t", "re_alpha", "im_alpha", "w"], rows


def run_tomogram(cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    lam = cfg.lambdas[0]
    frame = fock.QuadratureFrame(cfg.f, cfg.g)
    q = _axis(cfg.q_grid)
    rows = []
    for kt in cfg.kappa_ts:
        if cfg.cutoff is None:
            r = analytic.tomogram_analytic(q, frame, (lam, kt))
        else:
            r = fock.tomogram_numeric(analytic.evolved_density_matrix((lam, kt), cfg.cutoff), q, frame)
        rows.extend(zip([kt] * q.size, q, r))
    return ["kappa_t", "q", "r"], rows


def run_validate(cfg: RunConfig) -> dict:
    vcfg = ValidationConfig(lambdas=cfg.lambdas, kappa_ts=cfg.kappa_ts, cutoff=cfg.cutoff, threads=cfg.threads,
                            max_tail=cfg.tol)
    return run_checks(vcfg)


COMMANDS = {"fig1": run_fig1, "fig2": run_fig2, "fig3": run_wigner, "tomogram": run_tomogram}


# --- output ------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.16e" % v


def format_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def format_json_table(header, rows) -> str:
    data = [[int(v) if isinstance(v, (int, np.integer)) else float(v) for v in row] for row in rows]
    return json.dumps({"columns": list(header), "rows": data}) + "\n"


def write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


_VALUE_FLAGS = {"--lambda", "--lambdas", "--kappa-t", "--kappa-ts", "--alpha-grid", "--q-grid", "--f", "--g"}


def _attach_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-6:6:61" as an option; glue such values to their flag
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:2].lstrip("-")[:1] in set("0123456789."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        check_cutoff(cfg)
    except (UsageError, CutoffError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"adc-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if cfg.command == "validate":
            report = run_validate(cfg)
            text = json.dumps(report, indent=2) + "\n"
            status = EXIT_OK if report["all_pass"] else EXIT_FAIL
            for name, check in report["checks"].items():
                if not check["pass"]:
                    print(f"FAIL {name}: {check['max_error']:.3e} > {check['tol']:.1e}", file=sys.stderr)
        else:
            header, rows = COMMANDS[cfg.command](cfg)
            text = format_json_table(header, rows) if cfg.json else format_csv(header, rows)
            status = EXIT_OK
    except CutoffError as exc:
        print(f"adc-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AdcSimError as exc:
        print(f"adc-sim: error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    try:
        write_output(text, cfg.out)
    except OSError as exc:
        print(f"adc-sim: cannot write {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
