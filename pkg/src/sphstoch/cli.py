"""Command-line surface.

Subcommands: synth, analyze, spectrum, cov, verify, wigner. All commands are
deterministic given their configuration and seed; the effective configuration
is echoed to stdout. Exit codes: 0 ok, 2 configuration error, 3 parse error,
4 resolution error, 5 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import fileio
from .errors import (
    ConfigError,
    ConsistencyError,
    ConventionError,
    GridLookupError,
    ParseError,
    ResolutionError,
    SampleSizeError,
    VerificationFailure,
)
from .fields import (
    FieldModel,
    GeneratorKind,
    PowerSpectrum,
    Symmetry,
    covariance_series_angle,
    sample_coefficients,
)
from .harmonics import SphereGrid, analyze, build_grid, synthesize
from .wigner import phase_i, rodrigues_P, wigner_d

DEFAULT_SEED = 0  # documented default, echoed in output


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphstoch",
        description="Isotropic Gaussian random fields on the sphere: "
        "synthesis, analysis, spectra, covariances, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False, grid=False, workers=False):
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help=f"RNG seed (default {DEFAULT_SEED})")
        if grid:
            p.add_argument("--grid", metavar="NTHETAxNPHI", default=None,
                           help="grid override, e.g. 33x66")
        if workers:
            p.add_argument("--workers", type=int, default=1,
                           help="worker count; output is identical for any value")
        p.add_argument("--quiet", action="store_true", help="suppress config echo")

    p = sub.add_parser("synth", help="sample coefficients and synthesize a map")
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--spin", type=int, default=0)
    p.add_argument("--spectrum", metavar="FILE", default=None,
                   help="input spectrum; default is a flat unit spectrum")
    p.add_argument("--out", metavar="FILE", required=True, help="output map file")
    p.add_argument("--coeffs-out", metavar="FILE", default=None,
                   help="output coefficient file (default: OUT + '.sfc')")
    p.add_argument("--generator", choices=["gaussian", "fixed-modulus"],
                   default="gaussian")
    p.add_argument("--symmetry", choices=["conj", "free"], default="conj")
    p.add_argument("--realization", type=int, default=0)
    common(p, seed=True, grid=True, workers=True)

    p = sub.add_parser("analyze", help="read a map, write its coefficients")
    p.add_argument("--in", dest="infile", metavar="FILE", required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--out", metavar="FILE", required=True)
    common(p, workers=True)

    p = sub.add_parser("spectrum", help="estimate C_l from a coefficient file")
    p.add_argument("--in", dest="infile", metavar="FILE", required=True)
    p.add_argument("--out", metavar="FILE", required=True)
    common(p)

    p = sub.add_parser("cov", help="evaluate the covariance series on an angle grid")
    p.add_argument("--spectrum", metavar="FILE", required=True)
    p.add_argument("--out", metavar="FILE", required=True)
    p.add_argument("--points", type=int, default=181,
                   help="number of separation angles in [0, pi]")
    common(p)

    p = sub.add_parser("verify", help="run the verification battery")
    p.add_argument("--n-realizations", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None,
                   help="override the battery's fixed seed")
    p.add_argument("--report", metavar="FILE", default=None,
                   help="write a machine-readable summary "
                        "('check name, statistic, threshold, pass|fail' lines)")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("wigner", help="print one d-function value")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--method", choices=["recursion", "rodrigues"],
                   default="recursion")
    p.add_argument("--quiet", action="store_true")
    return parser


def _parse_grid(spec: str) -> tuple[int, int]:
    try:
        a, b = spec.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"--grid expects NTHETAxNPHI, got {spec!r}") from None


def _echo(args, pairs):
    if not getattr(args, "quiet", False):
        for key, value in pairs:
            print(f"# {key} = {value}")


def _cmd_synth(args) -> int:
    if args.spectrum is not None:
        spectrum = fileio.read_spectrum(args.spectrum)
        if args.lmax is not None and args.lmax != spectrum.l_max:
            raise ConfigError(
                f"--lmax {args.lmax} conflicts with spectrum file (lmax {spectrum.l_max})"
            )
        if args.spin != spectrum.spin and args.spin != 0:
            raise ConfigError(
                f"--spin {args.spin} conflicts with spectrum file (spin {spectrum.spin})"
            )
    else:
        if args.lmax is None:
            raise ConfigError("synth needs --lmax when no --spectrum is given")
        spectrum = PowerSpectrum.flat(args.lmax, args.spin)

    if args.grid is not None:
        n_theta, n_phi = _parse_grid(args.grid)
        try:
            grid = SphereGrid.gauss_legendre(n_theta, n_phi)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        grid = build_grid(spectrum.l_max)

    model = FieldModel(
        spectrum,
        seed=args.seed,
        generator=GeneratorKind(args.generator),
        symmetry=Symmetry(args.symmetry),
    )
    coeffs = sample_coefficients(model, args.realization)
    spin_map = synthesize(coeffs, grid, workers=args.workers)
    coeffs_path = args.coeffs_out or (args.out + ".sfc")
    fileio.write_map(args.out, spin_map)
    fileio.write_coefficients(coeffs_path, coeffs)
    _echo(args, [
        ("command", "synth"), ("lmax", spectrum.l_max), ("spin", spectrum.spin),
        ("seed", args.seed), ("realization", args.realization),
        ("generator", args.generator), ("symmetry", args.symmetry),
        ("grid", f"{grid.n_theta}x{grid.n_phi}"), ("workers", args.workers),
        ("map", args.out), ("coefficients", coeffs_path), ("format", "SFM1/SFC1"),
    ])
    return 0


def _cmd_analyze(args) -> int:
    spin_map = fileio.read_map(args.infile)
    coeffs = analyze(spin_map, args.lmax, workers=args.workers)
    fileio.write_coefficients(args.out, coeffs)
    _echo(args, [
        ("command", "analyze"), ("lmax", args.lmax), ("spin", spin_map.spin),
        ("in", args.infile), ("out", args.out), ("format", "SFC1"),
    ])
    return 0


def _cmd_spectrum(args) -> int:
    coeffs = fileio.read_coefficients(args.infile)
    from .estimate import estimate_cl

    est = estimate_cl(coeffs)
    fileio.write_cl_table(
        args.out, range(est.l_max + 1), est.c_hat_l, est.spin, est.l_max,
        comments=[f"estimator C_hat_l from {args.infile}", "format sft1"],
    )
    _echo(args, [
        ("command", "spectrum"), ("lmax", est.l_max), ("spin", est.spin),
        ("in", args.infile), ("out", args.out),
    ])
    return 0


def _cmd_cov(args) -> int:
    spectrum = fileio.read_spectrum(args.spectrum)
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    beta = np.linspace(0.0, math.pi, args.points)
    values = covariance_series_angle(spectrum, beta)
    fileio.write_covariance_table(
        args.out, beta, values, spectrum.spin, spectrum.l_max,
        comments=[f"covariance series from {args.spectrum}", "format sft1"],
    )
    _echo(args, [
        ("command", "cov"), ("lmax", spectrum.l_max), ("spin", spectrum.spin),
        ("points", args.points), ("out", args.out),
    ])
    return 0


def _cmd_verify(args) -> int:
    from . import verify

    kwargs = {"n_realizations": args.n_realizations}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    results = verify.run_all(**kwargs)
    for res in results:
        print(res.line())
    if args.report is not None:
        # machine-readable diagnostics summary: one
        # 'check name, statistic, threshold, pass|fail' line per check
        lines = []
        for res in results:
            for tag, report in (res.artifacts or {}).items():
                lines += [f"{tag}_{line}" for line in report.machine_lines()]
        fileio.atomic_write_text(args.report, "\n".join(lines) + "\n")
    if not all(r.passed for r in results):
        raise VerificationFailure(
            f"{sum(not r.passed for r in results)} criterion(s) failed"
        )
    return 0


def _cmd_wigner(args) -> int:
    if args.method == "recursion":
        value = wigner_d(args.l, args.m, args.n, args.theta)
    else:
        oracle = phase_i(args.m - args.n) * rodrigues_P(
            args.l, args.m, args.n, math.cos(args.theta)
        )
        value = oracle.real
    print(f"{value:.15g}")
    return 0


_DISPATCH = {
    "synth": _cmd_synth,
    "analyze": _cmd_analyze,
    "spectrum": _cmd_spectrum,
    "cov": _cmd_cov,
    "verify": _cmd_verify,
    "wigner": _cmd_wigner,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return 4
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 5
    except (ConventionError, ConsistencyError, SampleSizeError, GridLookupError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
