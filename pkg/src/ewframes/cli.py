"""Command line front end.

Exit codes: 0 success/certified, 1 Bessel-only verdict, 2 validation error,
3 numerical error, 4 I/O error, 5 indeterminate verdict.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import frames
from .errors import EWFError, ValidationError
from .io import (
    coefficients_from_dict,
    dumps,
    load_boundaries,
    load_json,
    load_wavelet,
    read_signal,
    read_spectrum_csv,
    write_coefficients,
    write_signal,
)
from .partition import build_partition, compute_centers, detect_boundaries
from .system import EmpiricalWaveletSystem, build_system
from .transform import (
    CEWT,
    cewt_forward,
    dewt_forward,
    random_bandlimited,
    reconstruct,
    signal_grid,
)

EXIT_OK = 0
EXIT_BESSEL = 1
EXIT_IO = 4
EXIT_INDETERMINATE = 5


@dataclass(frozen=True)
class RunConfig:
    """Resolved inputs of a system-building command."""

    partition: Path
    wavelet: Path
    shifts: str | None = None
    overlap: float | None = None
    margin: float | None = None
    scales: str | None = None

    def __post_init__(self):
        for p in (self.partition, self.wavelet):
            if not Path(p).is_file():
                raise FileNotFoundError(f"no such file: {p}")

    def system(self) -> EmpiricalWaveletSystem:
        wavelet, opts = load_wavelet(self.wavelet)
        partition = compute_centers(build_partition(load_boundaries(self.partition)))
        overlap = self.overlap if self.overlap is not None else opts.get("overlap")
        margin = self.margin if self.margin is not None else opts.get("margin")
        return build_system(
            partition,
            wavelet,
            _parse_list(self.shifts, keep_str=True) if self.shifts else "reciprocal",
            overlap=overlap,
            margin=margin,
            scales=_parse_list(self.scales) if self.scales else None,
        )


def _parse_list(text: str, keep_str: bool = False) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("", "-"):
            out.append(None)
        elif keep_str and "/" in tok:
            out.append(tok)
        else:
            try:
                out.append(float(tok))
            except ValueError:
                raise ValidationError(f"cannot parse list entry {tok!r}") from None
    return out


def _config(args) -> RunConfig:
    return RunConfig(
        Path(args.partition), Path(args.wavelet), args.shifts, args.overlap, args.margin, args.scales
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# subcommands


def cmd_detect(args) -> int:
    freqs, mags = read_spectrum_csv(args.spectrum)
    bset = detect_boundaries(mags, args.bands, freqs)
    _emit(dumps(bset.to_dict()), args.output)
    print("boundaries: -inf " + " ".join(repr(p) for p in bset.points) + " +inf", file=sys.stderr)
    return EXIT_OK


def cmd_build(args) -> int:
    system = _config(args).system()
    _emit(dumps(system.to_dict()), args.output)
    return EXIT_OK


def cmd_transform(args) -> int:
    system = _config(args).system()
    signal = read_signal(args.signal)
    forward = cewt_forward if args.mode == CEWT else dewt_forward
    coeffs = forward(signal, system)
    if args.output:
        write_coefficients(coeffs, args.output)
    print(f"{args.mode}: {len(coeffs.bands)} bands, energy {coeffs.energy!r}")
    if args.reconstruct:
        res = reconstruct(coeffs, system, args.max_iter, args.tol)
        err = np.linalg.norm(res.signal.samples - signal.samples) / np.linalg.norm(signal.samples)
        print(f"reconstruction: relative error {err:.3e} "
              f"(residual {res.residual:.3e}, {res.iterations} iterations)")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    system = _config(args).system()
    coeffs = coefficients_from_dict(load_json(args.coefficients), system)
    res = reconstruct(coeffs, system, args.max_iter, args.tol, parseval=args.parseval)
    write_signal(res.signal, args.output)
    print(f"residual {res.residual:.3e} after {res.iterations} iterations")
    return EXIT_OK


def cmd_certify(args) -> int:
    system = _config(args).system()
    window = tuple(args.window) if args.window else None
    region = frames.analysis_window(system, window)
    dt, n = signal_grid(system, region, args.samples)
    rng = np.random.default_rng(args.seed)
    probes = [random_bandlimited(rng, dt, n, region) for _ in range(args.probes)]
    report = frames.certify(
        system,
        probes,
        window=window,
        grid_points=args.grid_points,
        lattice_half_width=args.lattice_width,
    )
    _emit(dumps(report.to_dict()), args.output)
    print(f"verdict: {report.verdict}  A = {report.lower_a!r}  B = {report.bessel_b!r}",
          file=sys.stderr)
    if report.verdict in (frames.PARSEVAL, frames.FRAME):
        return EXIT_OK
    return EXIT_BESSEL if report.verdict == frames.BESSEL else EXIT_INDETERMINATE


def cmd_report_dump(args) -> int:
    system = _config(args).system()
    lo, hi = frames.analysis_window(system, tuple(args.window) if args.window else None)
    xi = frames.frequency_grid(lo, hi, args.grid_points)
    ps = frames.parseval_sum(system, xi)
    alphas = args.alpha or [0.0]
    gs = [frames.cross_term(system, a, xi) for a in alphas]
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "s"] + [f"G[{a!r}].{part}" for a in alphas for part in ("re", "im")])
        for i, x in enumerate(xi):
            row = [repr(float(x)), repr(float(ps.signed[i]))]
            for g in gs:
                row += [repr(float(g[i].real)), repr(float(g[i].imag))]
            w.writerow(row)
    return EXIT_OK


def _system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("partition", help="partition JSON")
    p.add_argument("wavelet", help="wavelet JSON")
    p.add_argument("--shifts", help="explicit b_n per support, comma separated (p/q allowed, '-' = default)")
    p.add_argument("--overlap", type=float, help="|S_n|/|Ω_n| multiplier for compact ψ̂")
    p.add_argument("--margin", type=float, help="enlargement r in b_n = 1/(a_n(|E|+2r))")
    p.add_argument("--scales", help="override a_n per support, comma separated ('-' = default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewframes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect boundaries from a magnitude spectrum CSV")
    p.add_argument("spectrum")
    p.add_argument("--bands", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("build", help="print the band table of a system")
    _system_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("transform", help="forward CEWT/DEWT of a signal")
    p.add_argument("signal")
    _system_args(p)
    p.add_argument("--mode", choices=["cewt", "dewt"], default="dewt")
    p.add_argument("-o", "--output", help="coefficients .json, or a directory for per-band CSV")
    p.add_argument("--reconstruct", action="store_true")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("reconstruct", help="invert a coefficient envelope")
    p.add_argument("coefficients")
    _system_args(p)
    p.add_argument("-o", "--output", required=True, help="signal .csv or raw .bin")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--parseval", action="store_true", help="single synthesis pass")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("certify", help="numerical frame certificate")
    _system_args(p)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--probes", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=4096, help="minimum probe length")
    p.add_argument("--grid-points", type=int)
    p.add_argument("--lattice-width", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("report-dump", help="CSV of s(ξ) and G_α(ξ) for plotting")
    _system_args(p)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--alpha", type=float, action="append")
    p.add_argument("--grid-points", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_report_dump)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EWFError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
