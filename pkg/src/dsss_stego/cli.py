"""Command-line front end: stats | analytic | simulate | sweep | encode | decode.

Exit codes: 0 success, 2 usage error, 3 data/format error.  All numeric
output uses scientific notation with 10 significant digits; every command
is deterministic given explicit seeds.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis
from .analysis import PerformanceModelParams, sensitivity_curve, stego_alphabet_size
from .channel import ChannelParams
from .chipmap import code_set_stats, standard_code_set
from .fileio import ChipStreamFormatError, read_chip_stream, write_chip_stream
from .pipeline import (
    CapacityError,
    FramingError,
    SimConfig,
    decode_stream,
    encode_stream,
    run_simulation,
)
from .stego import StegoKey, build_codebook

_SEED_STRIDE = 0x9E3779B97F4A7C15  # splitmix64 increment, for per-point seeds


def _fmt(x: float) -> str:
    return f"{x:.9e}"


def _parse_key(text: str) -> StegoKey:
    try:
        return StegoKey.from_hex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_rate(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"embed rate must be in [0, 1]: {text!r}")
    return v


def _parse_p_chip(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= v <= 0.5:
        raise argparse.ArgumentTypeError(f"p-chip must be in [0, 0.5]: {text!r}")
    return v


def _parse_float_list(text: str) -> list[float]:
    """Comma list ("0,4,8") or inclusive range ("start:stop:step")."""
    values: list[float] = []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range needs start:stop:step: {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range token in {text!r}")
        if step <= 0:
            raise argparse.ArgumentTypeError(f"range step must be positive: {text!r}")
        k = 0
        while start + k * step <= stop + 1e-12:
            values.append(round(start + k * step, 12))
            k += 1
    else:
        for token in text.split(","):
            token = token.strip()
            try:
                values.append(float(token))
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad value {token!r} in list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"empty list: {text!r}")
    return values


@dataclass(frozen=True)
class SweepGrid:
    snr_db_list: list[float]
    embed_rate_list: list[float]
    symbols_per_point: int
    base_seed: int

    def point_seed(self, index: int) -> int:
        return (self.base_seed + (index + 1) * _SEED_STRIDE) % (1 << 64)


def _write_text(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_stats(args) -> int:
    stats = code_set_stats(standard_code_set())
    book = build_codebook()
    lines = [
        f"d_min={stats.d_min}",
        f"d_mean={_fmt(stats.d_mean)}",
        f"d_max={stats.d_max}",
        f"avg_distance_shift={_fmt(analysis.delta_avg_distance(5, stats.d_mean))}",
        f"codebook_patterns={len(book.patterns)}",
        f"codebook_min_pairwise_distance={book.min_pairwise_distance()}",
    ]
    for d_min in range(3, 13):
        rep = stego_alphabet_size(d_min)
        lines.append(
            f"alphabet d_min={rep.d_min} t={rep.t} total={rep.total_patterns} "
            f"fixed_weight={rep.fixed_weight_patterns} "
            f"bits_per_sequence={_fmt(rep.bits_per_sequence)}"
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_analytic(args) -> int:
    params = PerformanceModelParams(pm_mode=args.pm_mode, embed_chips=args.embed_chips)
    points = sensitivity_curve(args.snr_db, args.embed_rate, params)
    rows = ["snr_db,ber_clean,ber_steg,sensitivity_shift_db,embed_rate,pm_mode"]
    for p in points:
        rows.append(
            f"{_fmt(p.snr_db)},{_fmt(p.ber_clean)},{_fmt(p.ber_steg)},"
            f"{_fmt(p.sensitivity_shift_db)},{_fmt(p.embed_rate)},{p.pm_mode}"
        )
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _channel_from_args(args) -> ChannelParams:
    if args.snr_db is not None:
        return ChannelParams.from_snr_db(args.snr_db)
    return ChannelParams.direct(args.p_chip)


def _cmd_simulate(args) -> int:
    config = SimConfig(
        num_symbols=args.symbols,
        channel=_channel_from_args(args),
        key=args.key,
        embed_rate=args.embed_rate,
        rng_seed=args.seed,
    )
    report = run_simulation(config)
    _write_text(args.out, report.as_text())
    return 0


def _cmd_sweep(args) -> int:
    grid = SweepGrid(args.snr_db, args.embed_rate, args.symbols_per_point, args.seed)
    rows = [
        "snr_db,embed_rate,p_chip,cer,carrier_ser,carrier_ber,"
        "stego_ser,stego_exact_fraction,symbols,seed"
    ]
    points = sorted(
        (snr, rate) for snr in grid.snr_db_list for rate in grid.embed_rate_list
    )
    for index, (snr, rate) in enumerate(points):
        seed = grid.point_seed(index)
        report = run_simulation(
            SimConfig(
                num_symbols=grid.symbols_per_point,
                channel=ChannelParams.from_snr_db(snr),
                key=args.key,
                embed_rate=rate,
                rng_seed=seed,
            )
        )
        rows.append(
            f"{_fmt(snr)},{_fmt(rate)},{_fmt(report.p_chip)},{_fmt(report.cer)},"
            f"{_fmt(report.carrier_ser)},{_fmt(report.carrier_ber)},"
            f"{_fmt(report.stego_ser)},{_fmt(report.stego_exact_fraction)},"
            f"{report.symbols_sent},{seed}"
        )
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_encode(args) -> int:
    data_bits = np.unpackbits(np.frombuffer(Path(args.data).read_bytes(), dtype=np.uint8))
    if args.stego is not None:
        stego_bits = np.unpackbits(
            np.frombuffer(Path(args.stego).read_bytes(), dtype=np.uint8)
        )
    else:
        stego_bits = np.zeros(0, dtype=np.uint8)
    chips = encode_stream(data_bits, stego_bits, args.key, args.embed_rate)
    write_chip_stream(args.out, chips)
    return 0


def _cmd_decode(args) -> int:
    chips = read_chip_stream(args.infile)
    decoded = decode_stream(chips, args.key, args.embed_rate)
    Path(args.data_out).write_bytes(np.packbits(decoded.data_bits).tobytes())
    if args.stego_out is not None:
        Path(args.stego_out).write_bytes(np.packbits(decoded.stego_bits).tobytes())
    if args.diag_out is not None:
        rows = ["slot_index,exact,diff_weight"]
        rows += [f"{d.symbol_index},{int(d.exact)},{d.weight}" for d in decoded.slots]
        Path(args.diag_out).write_text("\n".join(rows) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsss-stego",
        description="Covert-channel codec and simulator for IEEE 802.15.4 DSSS codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="code-set distances and covert alphabet sizes")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("analytic", help="emit BER and sensitivity-shift curves as CSV")
    p.add_argument("--snr-db", type=_parse_float_list, default=_parse_float_list("-10:10:0.5"))
    p.add_argument("--embed-rate", type=_parse_float_list, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--pm-mode", choices=("diff", "ratio"), default="diff")
    p.add_argument("--embed-chips", type=int, default=5)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("simulate", help="one Monte Carlo run, flat key=value report")
    p.add_argument("--symbols", type=int, required=True)
    noise = p.add_mutually_exclusive_group(required=True)
    noise.add_argument("--p-chip", type=_parse_p_chip)
    noise.add_argument("--snr-db", type=float)
    p.add_argument("--embed-rate", type=_parse_rate, default=0.0)
    p.add_argument("--key", type=_parse_key, default=StegoKey.from_hex("ACE1"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="Monte Carlo grid over SNR and embedding rate")
    p.add_argument("--snr-db", type=_parse_float_list, required=True)
    p.add_argument("--embed-rate", type=_parse_float_list, required=True)
    p.add_argument("--symbols-per-point", type=int, required=True)
    p.add_argument("--key", type=_parse_key, default=StegoKey.from_hex("ACE1"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("encode", help="spread payload files into a chip-stream file")
    p.add_argument("--data", required=True)
    p.add_argument("--stego")
    p.add_argument("--key", type=_parse_key, required=True)
    p.add_argument("--embed-rate", type=_parse_rate, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="recover payloads from a chip-stream file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--data-out", required=True)
    p.add_argument("--stego-out")
    p.add_argument("--diag-out")
    p.add_argument("--key", type=_parse_key, required=True)
    p.add_argument("--embed-rate", type=_parse_rate, default=0.0)
    p.set_defaults(func=_cmd_decode)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (ChipStreamFormatError, CapacityError, FramingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
