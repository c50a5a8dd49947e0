"""IEEE 802.15.4 symbol-to-chip mapping and minimum-distance despreading.

The 2450 MHz PHY maps each 4-bit data symbol onto one of 16 predefined
32-chip pseudo-noise sequences.  This module holds that table plus the
Hamming arithmetic and nearest-code decoding a receiver uses to undo it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple

import numpy as np

CHIPS_PER_SYMBOL = 32
SYMBOL_VALUES = 16

# IEEE 802.15.4-2006, Table 73 (2450 MHz band), chip c0 first.  The values
# are guarded by the pairwise-distance statistics test: any single-chip
# transcription error perturbs the mean distance.
CHIP_TABLE = (
    "11011001110000110101001000101110",
    "11101101100111000011010100100010",
    "00101110110110011100001101010010",
    "00100010111011011001110000110101",
    "01010010001011101101100111000011",
    "00110101001000101110110110011100",
    "11000011010100100010111011011001",
    "10011100001101010010001011101101",
    "10001100100101100000011101111011",
    "10111000110010010110000001110111",
    "01111011100011001001011000000111",
    "01110111101110001100100101100000",
    "00000111011110111000110010010110",
    "01100000011101111011100011001001",
    "10010110000001110111101110001100",
    "11001001011000000111011110111000",
)


class InvalidCodeSetError(ValueError):
    """The 16 spreading codes are malformed (wrong count or duplicates)."""


class ChipSequence:
    """Immutable 32-chip word; chip index 0 is transmitted first.

    Internally a 32-bit integer with chip i stored at bit i, so Hamming
    distances reduce to a popcount.  Textual form is a 32-character
    '0'/'1' string with chip 0 leftmost.
    """

    __slots__ = ("word",)

    def __init__(self, word: int):
        if not 0 <= word < (1 << CHIPS_PER_SYMBOL):
            raise ValueError(f"chip word out of range: {word}")
        object.__setattr__(self, "word", word)

    def __setattr__(self, name, value):
        raise AttributeError("ChipSequence is immutable")

    @classmethod
    def from_string(cls, text: str) -> "ChipSequence":
        if len(text) != CHIPS_PER_SYMBOL:
            raise ValueError(f"need exactly 32 chips, got {len(text)}")
        if set(text) - {"0", "1"}:
            raise ValueError(f"chip string must be binary: {text!r}")
        word = 0
        for i, ch in enumerate(text):
            if ch == "1":
                word |= 1 << i
        return cls(word)

    @classmethod
    def from_chips(cls, chips: Iterable[int]) -> "ChipSequence":
        bits = list(chips)
        if len(bits) != CHIPS_PER_SYMBOL:
            raise ValueError(f"need exactly 32 chips, got {len(bits)}")
        word = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"chip values must be 0 or 1, got {b!r}")
            word |= b << i
        return cls(word)

    @property
    def chips(self) -> tuple[int, ...]:
        return tuple((self.word >> i) & 1 for i in range(CHIPS_PER_SYMBOL))

    def to_string(self) -> str:
        return "".join("1" if (self.word >> i) & 1 else "0" for i in range(CHIPS_PER_SYMBOL))

    def flip(self, positions: Iterable[int]) -> "ChipSequence":
        """Return a copy with the chips at the given positions inverted."""
        mask = 0
        for p in positions:
            if not 0 <= p < CHIPS_PER_SYMBOL:
                raise ValueError(f"chip position out of range: {p}")
            mask |= 1 << p
        return ChipSequence(self.word ^ mask)

    def diff_positions(self, other: "ChipSequence") -> tuple[int, ...]:
        d = self.word ^ other.word
        return tuple(i for i in range(CHIPS_PER_SYMBOL) if (d >> i) & 1)

    def __eq__(self, other):
        return isinstance(other, ChipSequence) and self.word == other.word

    def __hash__(self):
        return hash(self.word)

    def __len__(self):
        return CHIPS_PER_SYMBOL

    def __repr__(self):
        return f"ChipSequence({self.to_string()!r})"


def hamming(a: ChipSequence, b: ChipSequence) -> int:
    """Number of chip positions where the two words differ."""
    return (a.word ^ b.word).bit_count()


class CodeSetStats(NamedTuple):
    d_min: int
    d_mean: float
    d_max: int


class DecodeResult(NamedTuple):
    symbol: int
    distance: int


@dataclass(frozen=True)
class CodeSet:
    """The 16 spreading codes, indexed by data symbol value."""

    codes: tuple[ChipSequence, ...]

    def __post_init__(self):
        if len(self.codes) != SYMBOL_VALUES:
            raise InvalidCodeSetError(f"a code set needs 16 codes, got {len(self.codes)}")
        if len({c.word for c in self.codes}) != SYMBOL_VALUES:
            raise InvalidCodeSetError("code set contains duplicate codes")


@functools.lru_cache(maxsize=1)
def standard_code_set() -> CodeSet:
    """The standard 2450 MHz PHY symbol-to-chip table."""
    return CodeSet(tuple(ChipSequence.from_string(s) for s in CHIP_TABLE))


def code_set_stats(code_set: CodeSet) -> CodeSetStats:
    """Min/mean/max Hamming distance over the 120 unordered code pairs."""
    codes = code_set.codes
    if len({c.word for c in codes}) != len(codes):
        raise InvalidCodeSetError("code set contains duplicate codes")
    dists = [hamming(a, b) for a, b in combinations(codes, 2)]
    return CodeSetStats(min(dists), sum(dists) / len(dists), max(dists))


def map_symbol(symbol: int, code_set: CodeSet | None = None) -> ChipSequence:
    """Spread a 4-bit data symbol onto its 32-chip code."""
    if not 0 <= symbol < SYMBOL_VALUES:
        raise ValueError(f"data symbol out of range: {symbol}")
    cs = code_set if code_set is not None else standard_code_set()
    return cs.codes[symbol]


def decode_chips(received: ChipSequence, code_set: CodeSet | None = None) -> DecodeResult:
    """Despread by nearest code; ties go to the lowest symbol value."""
    cs = code_set if code_set is not None else standard_code_set()
    best_symbol = 0
    best_distance = CHIPS_PER_SYMBOL + 1
    word = received.word
    for symbol, code in enumerate(cs.codes):
        d = (word ^ code.word).bit_count()
        if d < best_distance:  # strict: first minimum = lowest symbol wins
            best_symbol = symbol
            best_distance = d
    return DecodeResult(best_symbol, best_distance)


@functools.lru_cache(maxsize=4)
def code_matrix(code_set: CodeSet | None = None) -> np.ndarray:
    """(16, 32) uint8 view of a code set, for vectorized despreading."""
    cs = code_set if code_set is not None else standard_code_set()
    m = np.array([c.chips for c in cs.codes], dtype=np.uint8)
    m.setflags(write=False)
    return m
