"""Memoryless binary-symmetric chip channel with reproducible noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chipmap import ChipSequence

# Recorded in every report so results can be reproduced bit for bit.
GENERATOR_ID = "numpy-pcg64"


def snr_db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def snr_to_chip_error_prob(snr_linear: float) -> float:
    """Chip-flip probability for coherent binary detection at the given SNR.

    p = erfc(sqrt(snr)) / 2: strictly decreasing, 0.5 at zero SNR, -> 0 as
    SNR grows.  A modeling convenience for driving the simulator from an
    SNR figure; the analytic BER model is separate.
    """
    if snr_linear <= 0.0:
        raise ValueError(f"SNR must be positive, got {snr_linear}")
    return 0.5 * math.erfc(math.sqrt(snr_linear))


@dataclass(frozen=True)
class ChannelParams:
    """Independent per-chip flip probability, optionally derived from SNR."""

    p_chip: float
    origin: str = "direct"
    snr_db: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_chip <= 0.5:
            raise ValueError(f"p_chip must be in [0, 0.5], got {self.p_chip}")
        if self.origin not in ("direct", "snr"):
            raise ValueError(f"unknown origin {self.origin!r}")

    @classmethod
    def direct(cls, p_chip: float) -> "ChannelParams":
        return cls(p_chip=p_chip)

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "ChannelParams":
        p = snr_to_chip_error_prob(snr_db_to_linear(snr_db))
        return cls(p_chip=p, origin="snr", snr_db=snr_db)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def transmit_stream(
    chips: np.ndarray, params: ChannelParams, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Flip each chip independently with probability p_chip.

    Returns the received array and the number of flips (the chip error
    count as measured at the channel, before any decoding).
    """
    if params.p_chip == 0.0:
        return chips.copy(), 0
    flips = rng.random(chips.shape) < params.p_chip
    return chips ^ flips.astype(np.uint8), int(flips.sum())


def transmit(
    seq: ChipSequence, params: ChannelParams, rng: np.random.Generator
) -> ChipSequence:
    out, _ = transmit_stream(np.array(seq.chips, dtype=np.uint8), params, rng)
    return ChipSequence.from_chips(int(b) for b in out)
