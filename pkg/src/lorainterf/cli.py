"""Command-line frontend emitting CSV tables of error rates, required SNRs and patterns.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .awgn_rates import IntegrationError, ser_awgn_exact, ser_awgn_gaussian_approx
from .channel import ChannelParams
from .interf_rates import (
    DEFAULT_EPSILON,
    NotBracketedError,
    fer_approx,
    required_snr,
    ser_combined_approx,
)
from .mc import McConfig, mc_fer, mc_integer_tau_ser, mc_ser
from .pattern import amplitude_terms, pattern_bruteforce, pattern_magnitudes
from .phy import SF_MAX, SF_MIN, LoraParams

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

RATE_COLUMNS = ["sf", "snr_db", "sir_db", "metric", "method", "epsilon", "frame_len", "value", "ci95", "trials"]
REQUIRED_COLUMNS = ["sf", "sir_db", "metric", "target", "frame_len", "epsilon", "snr_db", "status"]
PATTERN_COLUMNS = ["k", "magnitude", "a1", "a2"]

_METHOD_ORDER = ["exact", "approx", "chip_aligned_approx", "mc", "chip_aligned_mc"]


class UsageError(ValueError):
    pass


# --- argument parsing helpers ---------------------------------------------


def _number(text: str) -> float:
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None
    if math.isnan(value):
        raise UsageError("nan is not allowed")
    return value


def parse_grid(text: str) -> list[float]:
    """Comma-separated items, each a number, ``inf`` or an inclusive ``start:stop:step`` range."""
    values: list[float] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) == 1:
            values.append(_number(parts[0]))
            continue
        if len(parts) != 3:
            raise UsageError(f"grid must be start:stop:step, got {item!r}")
        start, stop, step = (_number(p) for p in parts)
        if not all(math.isfinite(v) for v in (start, stop, step)):
            raise UsageError(f"grid bounds must be finite: {item!r}")
        if step <= 0:
            raise UsageError(f"grid step must be positive: {item!r}")
        if start > stop:
            raise UsageError(f"grid start exceeds stop: {item!r}")
        count = math.floor((stop - start) / step + 1e-9) + 1
        values.extend(round(start + i * step, 10) for i in range(count))
    if not values:
        raise UsageError(f"empty grid: {text!r}")
    return values


def parse_int_list(text: str) -> list[int]:
    out = []
    for v in parse_grid(text):
        if not math.isfinite(v) or v != int(v):
            raise UsageError(f"expected integers, got {v}")
        out.append(int(v))
    return out


def parse_count(text: str) -> int:
    v = _number(text)
    if not math.isfinite(v) or v < 0 or v != int(v):
        raise UsageError(f"expected a non-negative integer count, got {text!r}")
    return int(v)


def _wrap(fn):
    def conv(text):
        try:
            return fn(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    conv.__name__ = fn.__name__
    return conv


def _env_workers() -> int:
    raw = os.environ.get("LORAINTERF_THREADS")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"LORAINTERF_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("LORAINTERF_THREADS must be a positive integer")
    return value


# --- output -----------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.10g" % float(value)


def _sort_rate_rows(rows: list[dict]) -> list[dict]:
    def key(r):
        return (
            r["sf"],
            r["snr_db"],
            _METHOD_ORDER.index(r["method"]),
            r["sir_db"],
            r.get("epsilon") or 0.0,
            r.get("frame_len") or 0,
        )

    return sorted(rows, key=key)


def write_csv(stream, columns: Sequence[str], rows: Iterable[dict], footer: Sequence[str] = ()) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    for line in footer:
        stream.write(f"# {line}\n")


def _rate_row(sf, snr, sir, metric, method, value, *, epsilon=None, frame_len=None, est=None) -> dict:
    row = dict(sf=sf, snr_db=snr, sir_db=sir, metric=metric, method=method, epsilon=epsilon, frame_len=frame_len)
    if est is None:
        row.update(value=float(value), ci95=None, trials=None)
    else:
        row.update(value=est.rate, ci95=est.ci95_half_width, trials=est.trials_run)
    return row


def _mc_config(args, sf: int, index: int) -> McConfig:
    # one seed per grid point keeps points independent yet reproducible
    seed = (args.seed + 1_000_003 * index + 7919 * sf) % 2**64
    return McConfig(
        trials=args.trials,
        seed=seed,
        tau_grid_step=None if args.tau_step == 0 else args.tau_step,
        omega_mode=args.omega,
        stop_at_errors=args.stop_at_errors,
        workers=args.workers,
    )


def _progress(args, label: str):
    if not args.progress:
        return None

    def report(done: int) -> None:
        print(f"{label}: {done}/{args.trials}", file=sys.stderr)

    return report


# --- commands ---------------------------------------------------------------


def cmd_ser_awgn(args) -> tuple[list[str], list[dict], list[str]]:
    rows = []
    for sf in args.sf:
        exact = ser_awgn_exact(sf, args.snr)
        approx = ser_awgn_gaussian_approx(sf, args.snr)
        for i, snr in enumerate(args.snr):
            rows.append(_rate_row(sf, snr, math.inf, "SER", "exact", np.atleast_1d(exact)[i]))
            rows.append(_rate_row(sf, snr, math.inf, "SER", "approx", np.atleast_1d(approx)[i]))
            if args.trials:
                cfg = _mc_config(args, sf, i)
                est = mc_ser(sf, ChannelParams(snr, math.inf), cfg, _progress(args, f"sf{sf} {snr} dB"))
                rows.append(_rate_row(sf, snr, math.inf, "SER", "mc", None, est=est))
    return RATE_COLUMNS, _sort_rate_rows(rows), []


def cmd_ser_interference(args) -> tuple[list[str], list[dict], list[str]]:
    rows = []
    for sf in args.sf:
        for j, sir in enumerate(args.sir):
            for eps in args.epsilon:
                vals = ser_combined_approx(sf, args.snr, sir, eps)
                for i, snr in enumerate(args.snr):
                    rows.append(_rate_row(sf, snr, sir, "SER", "approx", np.atleast_1d(vals)[i], epsilon=eps))
            if args.chip_aligned:
                vals = ser_combined_approx(sf, args.snr, sir, 1.0)
                for i, snr in enumerate(args.snr):
                    rows.append(_rate_row(sf, snr, sir, "SER", "chip_aligned_approx", np.atleast_1d(vals)[i], epsilon=1.0))
            if not args.trials:
                continue
            for i, snr in enumerate(args.snr):
                ch = ChannelParams(snr, sir)
                cfg = _mc_config(args, sf, i + 10_007 * j)
                est = mc_ser(sf, ch, cfg, _progress(args, f"sf{sf} {snr}/{sir} dB"))
                rows.append(_rate_row(sf, snr, sir, "SER", "mc", None, est=est))
                if args.chip_aligned:
                    est = mc_integer_tau_ser(sf, ch, cfg, _progress(args, f"sf{sf} {snr}/{sir} dB aligned"))
                    rows.append(_rate_row(sf, snr, sir, "SER", "chip_aligned_mc", None, est=est))
    return RATE_COLUMNS, _sort_rate_rows(rows), []


def cmd_fer(args) -> tuple[list[str], list[dict], list[str]]:
    rows = []
    for sf in args.sf:
        for j, sir in enumerate(args.sir):
            for frame_len in args.frame_len:
                vals = fer_approx(sf, args.snr, sir, frame_len, args.epsilon)
                for i, snr in enumerate(args.snr):
                    rows.append(
                        _rate_row(sf, snr, sir, "FER", "approx", np.atleast_1d(vals)[i], epsilon=args.epsilon, frame_len=frame_len)
                    )
                if args.chip_aligned:
                    vals = fer_approx(sf, args.snr, sir, frame_len, 1.0)
                    for i, snr in enumerate(args.snr):
                        rows.append(
                            _rate_row(sf, snr, sir, "FER", "chip_aligned_approx", np.atleast_1d(vals)[i], epsilon=1.0, frame_len=frame_len)
                        )
                if not args.trials:
                    continue
                for i, snr in enumerate(args.snr):
                    ch = ChannelParams(snr, sir)
                    cfg = _mc_config(args, sf, i + 10_007 * j + 101 * frame_len)
                    est = mc_fer(sf, ch, frame_len, cfg, _progress(args, f"sf{sf} F={frame_len} {snr}/{sir} dB"))
                    rows.append(_rate_row(sf, snr, sir, "FER", "mc", None, frame_len=frame_len, est=est))
                    if args.chip_aligned:
                        aligned = McConfig(**{**cfg.__dict__, "tau_grid_step": 1.0})
                        est = mc_fer(sf, ch, frame_len, aligned)
                        rows.append(_rate_row(sf, snr, sir, "FER", "chip_aligned_mc", None, frame_len=frame_len, est=est))
    return RATE_COLUMNS, _sort_rate_rows(rows), []


def cmd_required_snr(args) -> tuple[list[str], list[dict], list[str]]:
    rows = []
    lo, hi = args.search_range
    frame_lens = args.frame_len if args.metric == "FER" else [1]
    for sf in args.sf:
        for target in args.target:
            for frame_len in frame_lens:
                for sir in args.sir:
                    row = dict(sf=sf, sir_db=sir, metric=args.metric, target=target, frame_len=frame_len, epsilon=args.epsilon)
                    try:
                        row["snr_db"] = required_snr(
                            sf, sir, target, args.metric, frame_len=frame_len, epsilon=args.epsilon,
                            search_range_db=(lo, hi),
                        )
                        row["status"] = "ok"
                    except NotBracketedError:
                        row["snr_db"], row["status"] = None, "unreachable"
                    rows.append(row)
    rows.sort(key=lambda r: (r["sf"], r["target"], r["frame_len"], r["sir_db"]))
    return REQUIRED_COLUMNS, rows, []


def cmd_pattern(args) -> tuple[list[str], list[dict], list[str]]:
    params = LoraParams(args.sf[0])
    pat = pattern_magnitudes(params, args.s_i1, args.s_i2, args.tau)
    a1, a2 = amplitude_terms(params, args.s_i1, args.s_i2, args.tau)
    columns = list(PATTERN_COLUMNS)
    rows = [dict(k=k, magnitude=pat.magnitudes[k], a1=a1[k], a2=a2[k]) for k in range(params.n)]
    footer = [f"energy={_fmt(pat.energy)}", f"n_squared={params.n**2}"]
    if args.check_oracle:
        oracle = pattern_bruteforce(params, args.s_i1, args.s_i2, args.tau)
        columns.append("oracle")
        for row, value in zip(rows, oracle):
            row["oracle"] = value
        footer.append(f"max_abs_diff={_fmt(np.max(np.abs(oracle - pat.magnitudes)))}")
    return columns, rows, footer


# --- parser -----------------------------------------------------------------


def _sf_list(text: str) -> list[int]:
    values = parse_int_list(text)
    for sf in values:
        if not SF_MIN <= sf <= SF_MAX:
            raise UsageError(f"sf must lie in [{SF_MIN}, {SF_MAX}], got {sf}")
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sf", type=_wrap(_sf_list), required=True, help="spreading factors, e.g. 7 or 7,9,12")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--json-meta", help="write the resolved configuration as JSON here")


def _add_mc(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=_wrap(parse_count), default=0, help="Monte Carlo trials per point (0 = none)")
    p.add_argument("--seed", type=_wrap(parse_count), default=1)
    p.add_argument("--tau-step", type=float, default=0.1, help="MC offset grid step in chips (0 = continuous)")
    p.add_argument("--omega", choices=["uniform", "fixed_zero"], default="uniform")
    p.add_argument("--stop-at-errors", type=_wrap(parse_count), default=None)
    p.add_argument("--workers", type=int, default=None, help="MC threads (default from LORAINTERF_THREADS or 1)")
    p.add_argument("--progress", action="store_true", help="report MC progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorainterf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    grid = _wrap(parse_grid)

    p = sub.add_parser("ser-awgn", help="SER under AWGN: exact, approximation, Monte Carlo")
    _add_common(p)
    p.add_argument("--snr", type=grid, required=True, help="SNR grid in dB, start:stop:step or list")
    _add_mc(p)
    p.set_defaults(func=cmd_ser_awgn)

    p = sub.add_parser("ser-interference", help="SER under AWGN and one same-SF interferer")
    _add_common(p)
    p.add_argument("--snr", type=grid, required=True)
    p.add_argument("--sir", type=grid, required=True, help="SIR grid in dB (inf = no interferer)")
    p.add_argument("--epsilon", type=grid, default=[DEFAULT_EPSILON], help="offset grid steps of the approximation")
    p.add_argument("--chip-aligned", action="store_true", help="add integer-offset rows")
    _add_mc(p)
    p.set_defaults(func=cmd_ser_interference)

    p = sub.add_parser("fer", help="frame error rate")
    _add_common(p)
    p.add_argument("--snr", type=grid, required=True)
    p.add_argument("--sir", type=grid, required=True)
    p.add_argument("--frame-len", type=_wrap(parse_int_list), required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--chip-aligned", action="store_true")
    _add_mc(p)
    p.set_defaults(func=cmd_fer)

    p = sub.add_parser("required-snr", help="SNR needed for a target SER or FER")
    _add_common(p)
    p.add_argument("--sir", type=grid, required=True)
    p.add_argument("--target", type=grid, required=True, help="target error rates")
    p.add_argument("--metric", choices=["SER", "FER"], type=str.upper, default="SER")
    p.add_argument("--frame-len", type=_wrap(parse_int_list), default=[1])
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--search-range", type=grid, default=[-40.0, 40.0], help="lo,hi in dB")
    p.set_defaults(func=cmd_required_snr)

    p = sub.add_parser("pattern", help="dump interference pattern magnitudes")
    _add_common(p)
    p.add_argument("--s-i1", type=int, required=True)
    p.add_argument("--s-i2", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--check-oracle", action="store_true", help="add brute-force DFT magnitudes")
    p.set_defaults(func=cmd_pattern)
    return parser


def _validate(parser: argparse.ArgumentParser, args) -> None:
    cmd = args.command
    if hasattr(args, "workers"):
        if args.workers is None:
            args.workers = _env_workers()
        if args.workers < 1:
            raise UsageError("--workers must be positive")
        if not 0 <= args.tau_step <= 1:
            raise UsageError("--tau-step must lie in [0, 1]")
        if args.stop_at_errors == 0:
            raise UsageError("--stop-at-errors must be positive")
    if hasattr(args, "snr") and any(not math.isfinite(s) for s in args.snr):
        raise UsageError("--snr values must be finite")
    if hasattr(args, "sir") and any(s == -math.inf for s in args.sir):
        raise UsageError("--sir values must be finite or inf")
    eps = getattr(args, "epsilon", None)
    for e in eps if isinstance(eps, list) else ([eps] if eps is not None else []):
        if not 0 < e <= 1:
            raise UsageError(f"epsilon must lie in (0, 1], got {e}")
    if hasattr(args, "frame_len") and any(f < 1 for f in args.frame_len):
        raise UsageError("--frame-len must be >= 1")
    if cmd == "required-snr":
        if any(not 0 < t < 1 for t in args.target):
            raise UsageError("--target must lie in (0, 1)")
        if len(args.search_range) != 2 or args.search_range[0] >= args.search_range[1]:
            raise UsageError("--search-range needs lo,hi with lo < hi")
    if cmd == "pattern":
        if len(args.sf) != 1:
            raise UsageError("pattern takes a single --sf")
        n = 1 << args.sf[0]
        for name in ("s_i1", "s_i2"):
            if not 0 <= getattr(args, name) < n:
                raise UsageError(f"--{name.replace('_', '-')} must lie in [0, {n})")
        if not 0 <= args.tau < n:
            raise UsageError(f"--tau must lie in [0, {n})")


def _meta(args) -> dict:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return str(v)
        if isinstance(v, list):
            return [clean(x) for x in v]
        return v

    cfg = {k: clean(v) for k, v in vars(args).items() if k != "func"}
    return {"program": "lorainterf", "version": __version__, "config": cfg}


_VALUE_OPTIONS = {"--snr", "--sir", "--epsilon", "--target", "--search-range", "--tau"}


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--snr -16:-4:0.5`` into ``--snr=-16:-4:0.5`` so argparse does not read a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is not None and re.match(r"^-(\d|\.\d|inf)", nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    try:
        _validate(parser, args)
    except UsageError as exc:
        parser.error(str(exc))
    try:
        columns, rows, footer = args.func(args)
    except (IntegrationError, ArithmeticError) as exc:
        print(f"lorainterf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    buf = io.StringIO()
    write_csv(buf, columns, rows, footer)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.json_meta:
        with open(args.json_meta, "w") as fh:
            json.dump(_meta(args), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
