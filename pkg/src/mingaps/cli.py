"""Command-line front end.

Subcommands: gen, mingap, energy, dstat, verify, scan. Exit codes:
0 success, 2 validation error, 3 resource guard, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .circle import angle_from_rational, default_bits
from .energy import additive_energy
from .errors import ConfigError, ResourceGuardError
from .experiments import (
    ExperimentConfig,
    GateReport,
    parse_grid,
    prime_gap_diagnostic,
    run_config,
    scan_minimal_gap,
    three_gap_check,
    verify_ceiling,
    verify_floor,
)
from .paircount import fourier_variance, mc_report, smoothed_pair_count
from .sequences import from_spec, write_sequence
from .window import get_window

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4


def _add_common(p: argparse.ArgumentParser, with_window: bool = True) -> None:
    p.add_argument("--sequence", default="monomial:d=2",
                   help="monomial:d=2 | lacunary:q=2 | primes | squarefree | naturals | file:PATH")
    p.add_argument("--N", type=int, default=None, help="single prefix length")
    p.add_argument("--N-grid", dest="n_grid", default=None,
                   help="a,b,c or geom:start:stop:factor")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--bits", type=int, default=None)
    if with_window:
        p.add_argument("--window", choices=("triangle", "bump"), default="triangle")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _grid_from(args) -> list[int]:
    if args.n_grid:
        return parse_grid(args.n_grid)
    if args.N:
        return [args.N]
    raise ConfigError("provide --N or --N-grid")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mingaps",
                                 description="minimal-gap statistics of fractional-part orbits")
    ap.add_argument("--version", action="version", version=f"mingaps {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a sequence file")
    g.add_argument("--sequence", required=True)
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--out", required=True)

    mg = sub.add_parser("mingap", help="exact minimal-gap scan over sampled angles")
    _add_common(mg)

    en = sub.add_parser("energy", help="additive-energy scan")
    en.add_argument("--sequence", default="monomial:d=2")
    en.add_argument("--N", type=int, default=None)
    en.add_argument("--N-grid", dest="n_grid", default=None)
    en.add_argument("--out", default=None)

    ds = sub.add_parser("dstat", help="smoothed pair-count moments")
    _add_common(ds)
    ds.add_argument("--M", type=int, required=True, help="localization scale")
    ds.add_argument("--alpha", default=None,
                    help="evaluate one angle p/q instead of sampling, e.g. 355/113")
    ds.add_argument("--fourier", action="store_true",
                    help="also evaluate the exact spectral variance (N <= 64)")
    ds.add_argument("--epsilon", type=float, default=0.1)

    vf = sub.add_parser("verify", help="run a verification experiment")
    _add_common(vf)
    vf.add_argument("--experiment", required=True,
                    choices=("theorem1", "theorem2", "threegap", "primes"))
    vf.add_argument("--eta", type=float, default=0.5)
    vf.add_argument("--epsilon", type=float, default=0.1)

    sc = sub.add_parser("scan", help="run a full JSON experiment config")
    sc.add_argument("--config", required=True)

    return ap


def _cmd_gen(args) -> int:
    if args.N < 2:
        raise ConfigError("--N must be >= 2")
    seq = from_spec(args.sequence, args.N)
    write_sequence(seq, args.out)
    print(f"wrote {len(seq)} values to {args.out}")
    return EXIT_OK


def _cmd_mingap(args) -> int:
    cfg = ExperimentConfig(
        experiment="mingap",
        sequence=args.sequence,
        ns=_grid_from(args),
        samples=args.samples,
        seed=args.seed,
        bits=args.bits,
        window=args.window,
        out=args.out,
        format=args.format,
    ).validate()
    table = scan_minimal_gap(cfg)
    if args.out:
        table.write(args.out, args.format)
        print(f"wrote {len(table.rows)} rows to {args.out}")
    else:
        sys.stdout.write(table.to_csv() if args.format == "csv" else table.to_json())
    return EXIT_OK


def _cmd_energy(args) -> int:
    ns = parse_grid(args.n_grid) if args.n_grid else [args.N] if args.N else None
    if not ns:
        raise ConfigError("provide --N or --N-grid")
    seq = from_spec(args.sequence, ns[-1])
    lines = ["family,params,N,energy,diag_sum,exponent"]
    for n in ns:
        rep = additive_energy(seq, n)
        lines.append(f"{seq.family},{seq.params_str},{n},{rep.energy},{rep.diag_sum},"
                     f"{format(rep.exponent, '.17g')}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(ns)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_dstat(args) -> int:
    n = args.N
    if not n:
        raise ConfigError("dstat needs --N")
    seq = from_spec(args.sequence, n)
    w = get_window(args.window)
    bits = args.bits or default_bits(seq, n)
    if args.alpha:
        try:
            p, q = args.alpha.split("/")
            alpha = angle_from_rational(int(p), int(q), bits)
        except ValueError:
            raise ConfigError(f"malformed --alpha {args.alpha!r}; expected p/q") from None
        res = smoothed_pair_count(seq, n, args.M, alpha, w)
        print(f"D({n},{args.M}) = {res.value:.12g}  contributing_pairs={res.contributing_pairs}")
        return EXIT_OK
    rep = mc_report(seq, n, args.M, w, args.samples, args.seed, bits, epsilon=args.epsilon)
    fv = ""
    if args.fourier:
        f = fourier_variance(seq, n, args.M, w)
        fv = format(f.value, ".17g")
        if f.truncated:
            print(f"warning: spectral tail estimate {f.tail_fraction:.2%} exceeds 1%",
                  file=sys.stderr)
    header = "family,params,N,M,window,samples,mc_mean,mc_var,fourier_var,bound_rhs,seed"
    row = (f"{seq.family},{seq.params_str},{n},{args.M},{args.window},{rep.samples},"
           f"{format(rep.mc_mean, '.17g')},{format(rep.mc_variance, '.17g')},{fv},"
           f"{format(rep.bound_rhs, '.17g')},{args.seed}")
    text = header + "\n" + row + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote 1 row to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = ExperimentConfig(
        experiment=args.experiment,
        sequence=args.sequence,
        ns=_grid_from(args),
        samples=args.samples,
        seed=args.seed,
        bits=args.bits,
        window=args.window,
        eta=args.eta,
        epsilon=args.epsilon,
        out=args.out,
        format=args.format,
    ).validate()
    runner = {
        "theorem1": verify_floor,
        "theorem2": verify_ceiling,
        "threegap": three_gap_check,
        "primes": prime_gap_diagnostic,
    }[args.experiment]
    report: GateReport = runner(cfg)
    if args.out:
        report.table.write(args.out, args.format)
    print(report.summary())
    for key, val in report.details.items():
        print(f"  {key}: {val}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_scan(args) -> int:
    code, result = run_config(args.config)
    if isinstance(result, GateReport):
        print(result.summary())
    else:
        print("scan complete")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "mingap": _cmd_mingap,
        "energy": _cmd_energy,
        "dstat": _cmd_dstat,
        "verify": _cmd_verify,
        "scan": _cmd_scan,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceGuardError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
