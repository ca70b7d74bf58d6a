"""Command-line entry point.

Subcommands::

    secdof bound CONFIG        closed-form bound, regime and achievable SDoF
    secdof sweep CONFIG        Monte Carlo sweep, CSV to ``out`` or stdout
    secdof binning [CONFIG]    toy wiretap-code demo
    secdof validate CONFIG     runtime invariant suite

Exit codes: 0 success, 1 configuration error, 2 infeasible scheme,
3 numerical failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

from . import binning, jamming, secrecy, validation
from .config import ExperimentConfig, parse_config
from .errors import ConfigError, Infeasible, SdofError
from .scenario import Kind, classify_regime

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERIC, EXIT_VALIDATION = range(5)

CSV_HEADER = "p_db,sum_rate_bits,eav_rate_bits,trials"


def _num(x: float) -> str:
    return format(float(x), ".12g")


def write_csv(curve: secrecy.RateCurve, report: secrecy.SdofReport, stream) -> None:
    stream.write(CSV_HEADER + "\n")
    for p, rate, leak, n in curve.points:
        stream.write(f"{_num(p)},{_num(rate)},{_num(leak)},{n}\n")
    stream.write(
        f"# slope={_num(curve.slope)} stderr={_num(curve.slope_stderr)} "
        f"upper_bound={_num(report.upper_bound)}\n"
    )


def cmd_bound(exp: ExperimentConfig, out) -> int:
    cfg = exp.system
    regime = classify_regime(cfg).value if cfg.kind is Kind.MAC else "n/a"
    print(f"kind={cfg.kind.value} K={cfg.K} M={cfg.M} N={cfg.N} NE={cfg.NE}", file=out)
    print(f"regime={regime}", file=out)
    print(f"upper_bound={_num(secrecy.upper_bound(cfg))}", file=out)
    try:
        achievable = _num(secrecy.achievable_sdof(cfg))
        scheme = jamming.resolve_scheme(cfg)
        print(f"scheme={scheme.value if scheme else 'ic-aligned'}", file=out)
    except Infeasible as exc:
        achievable = f"infeasible ({exc.binding})"
    print(f"achievable={achievable}", file=out)
    return EXIT_OK


def cmd_sweep(exp: ExperimentConfig, out, workers: int = 1, path: str | None = None) -> int:
    curve, report = secrecy.sweep(
        exp.system, exp.policy, exp.trials, exp.seed, exp.eavesdroppers, workers
    )
    target = path or exp.out
    if target:
        buf = io.StringIO()
        write_csv(curve, report, buf)
        Path(target).write_text(buf.getvalue(), encoding="utf-8")
    else:
        write_csv(curve, report, out)
    return EXIT_OK


def cmd_binning(seed: int, out) -> int:
    bsc = binning.DiscreteChannel.bsc
    uniform = [0.5, 0.5]
    code, ratio, best_seed = binning.best_code(4, 1.0, 0.5, uniform, bsc(0.3), range(seed, seed + 20))
    r_t, r_s = binning.design_rates(bsc(0.01), bsc(0.3), uniform, eps=0.05)
    print(f"code: n={code.n} R_t={code.R_t:g} R_s={code.R_s:g} bins={code.bins} bin_size={code.bin_size}", file=out)
    print(f"eavesdropper: BSC(0.3); best of 20 seeds from {seed}: seed {best_seed}", file=out)
    print(f"equivocation_ratio={_num(ratio)}", file=out)
    print(f"design rule for BSC(0.01) main, BSC(0.3) eavesdropper, eps=0.05: R_t={r_t:.4f} R_s={r_s:.4f}", file=out)
    return EXIT_OK


def cmd_validate(exp: ExperimentConfig, out) -> int:
    results = validation.run_all(exp)
    failed = 0
    for name, ok, detail in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""), file=out)
    print(f"passed={len(results) - failed} failed={failed}", file=out)
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secdof", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bound", "sweep", "validate"):
        p = sub.add_parser(name)
        p.add_argument("config", help="key = value configuration file")
    sub.choices["sweep"].add_argument("--workers", type=int, default=1)
    sub.choices["sweep"].add_argument("--out", help="CSV path (overrides the config's out key)")
    p = sub.add_parser("binning")
    p.add_argument("config", nargs="?", help="optional configuration (only seed is used)")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        exp = None
        if args.config:
            exp = parse_config(Path(args.config).read_text(encoding="utf-8"))
        if args.command == "bound":
            return cmd_bound(exp, out)
        if args.command == "sweep":
            return cmd_sweep(exp, out, args.workers, args.out)
        if args.command == "binning":
            return cmd_binning(exp.seed if exp else 0, out)
        return cmd_validate(exp, out)
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=err)
        return EXIT_CONFIG
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=err)
        if exc.binding:
            print(f"binding constraint: {exc.binding}", file=err)
        return EXIT_INFEASIBLE
    except SdofError as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
