"""Covert 4-bit symbols carried as keyed 5-chip flip patterns.

A stego transmitter flips exactly 5 chips of a standard spreading code.
Five flips stay inside the guaranteed correction radius of the 16-code
set (minimum pairwise distance 12), so an ordinary receiver still
despreads the carrier symbol error-free while a keyed receiver reads the
flip positions as a covert symbol.

The 16 canonical patterns come from a deterministic greedy scan of the
C(32,5) = 201376 five-subsets in colexicographic order, keeping every
pair of accepted patterns at symmetric difference >= 6 so that a single
post-embedding chip error can never turn one valid pattern into another.
Per-symbol scrambling permutes the 32 chip positions with a Fisher-Yates
shuffle driven by a keyed LFSR bit stream.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .chipmap import (
    CHIPS_PER_SYMBOL,
    ChipSequence,
    CodeSet,
    decode_chips,
    standard_code_set,
)

PATTERN_WEIGHT = 5          # = floor((d_min - 1) / 2) for d_min = 12
MIN_PATTERN_SEPARATION = 6  # symmetric-difference floor between patterns
CODEBOOK_SIZE = 16
SUBSET_COUNT = math.comb(CHIPS_PER_SYMBOL, PATTERN_WEIGHT)  # 201376

# Maximal-length Fibonacci LFSR feedback taps (bit positions, 1-based).
# The permutation keystream XORs one register per polynomial: a single
# sparse-tap register's bit stream carries window correlations strong
# enough to bias the position shuffle (visible in chi-square uniformity
# tests); the combined stream measures clean.  The embedding schedule
# runs its own single register so the two keyed streams stay apart.
PRIMARY_TAPS = (32, 22, 2, 1)
SECONDARY_TAPS = (32, 30, 26, 25)
SCHEDULE_TAPS = SECONDARY_TAPS


class InvalidCarrierError(ValueError):
    """The carrier word is not one of the 16 standard codes."""


class CodebookError(RuntimeError):
    """Greedy pattern construction could not reach 16 patterns."""


def rank_subset(positions: Iterable[int]) -> int:
    """Colex rank of a 5-subset of {0..31}."""
    pos = sorted(positions)
    if len(pos) != PATTERN_WEIGHT or len(set(pos)) != PATTERN_WEIGHT:
        raise ValueError(f"need 5 distinct positions, got {pos}")
    if pos[0] < 0 or pos[-1] >= CHIPS_PER_SYMBOL:
        raise ValueError(f"positions out of range: {pos}")
    return sum(math.comb(c, j + 1) for j, c in enumerate(pos))


def unrank_subset(rank: int) -> tuple[int, ...]:
    """The rank-th 5-subset of {0..31} in colex order (inverse of rank_subset)."""
    if not 0 <= rank < SUBSET_COUNT:
        raise ValueError(f"rank out of range [0, {SUBSET_COUNT}): {rank}")
    r = rank
    n = CHIPS_PER_SYMBOL
    k = PATTERN_WEIGHT
    out = [0] * k
    while k > 0:
        # binary search for the largest n with comb(n, k) <= r
        lower = k - 1
        while lower < n:
            mid = (lower + n + 1) // 2
            if r < math.comb(mid, k):
                n = mid - 1
            else:
                lower = mid
        r -= math.comb(n, k)
        k -= 1
        out[k] = n
    return tuple(out)


@dataclass(frozen=True)
class StegoCodebook:
    """16 five-position flip patterns, indexed by covert symbol value."""

    patterns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {frozenset(p): i for i, p in enumerate(self.patterns)}
        )

    def symbol_for(self, positions: frozenset[int]) -> int | None:
        """Covert symbol for an exact pattern match, else None."""
        return self._index.get(positions)

    def nearest_symbol(self, positions: frozenset[int]) -> tuple[int, int]:
        """(symbol, symmetric difference) of the closest pattern; ties go low."""
        best_sym = 0
        best_d = CHIPS_PER_SYMBOL + PATTERN_WEIGHT
        for sym, pat in enumerate(self.patterns):
            d = len(positions.symmetric_difference(pat))
            if d < best_d:
                best_sym = sym
                best_d = d
        return best_sym, best_d

    def min_pairwise_distance(self) -> int:
        sets = [frozenset(p) for p in self.patterns]
        return min(
            len(a ^ b) for i, a in enumerate(sets) for b in sets[i + 1 :]
        )


@functools.lru_cache(maxsize=1)
def build_codebook() -> StegoCodebook:
    """Greedy colex scan accepting subsets that keep pairwise separation >= 6.

    Deterministic: the same 16 patterns come out on every run, and the
    first accepted pattern is always {0,1,2,3,4}.
    """
    accepted: list[frozenset[int]] = []
    # separation >= 6 between weight-5 sets is intersection <= 2
    max_overlap = PATTERN_WEIGHT - MIN_PATTERN_SEPARATION // 2
    for rank in range(SUBSET_COUNT):
        cand = frozenset(unrank_subset(rank))
        if all(len(cand & prev) <= max_overlap for prev in accepted):
            accepted.append(cand)
            if len(accepted) == CODEBOOK_SIZE:
                break
    if len(accepted) < CODEBOOK_SIZE:
        raise CodebookError(
            f"only {len(accepted)} patterns at separation {MIN_PATTERN_SEPARATION}"
        )
    return StegoCodebook(tuple(tuple(sorted(p)) for p in accepted))


@dataclass(frozen=True)
class StegoKey:
    """Shared 16-bit scrambling key, written as 4 hex digits (e.g. "ACE1")."""

    seed: int

    def __post_init__(self):
        if not 1 <= self.seed <= 0xFFFF:
            raise ValueError(f"key must be a nonzero 16-bit value, got {self.seed}")

    @classmethod
    def from_hex(cls, text: str) -> "StegoKey":
        if len(text) != 4:
            raise ValueError(f"key must be 4 hex digits, got {text!r}")
        return cls(int(text, 16))

    @property
    def hex(self) -> str:
        return f"{self.seed:04X}"


def _expand_key(seed: int) -> int:
    # injective 16 -> 32 bit expansion; never zero for a nonzero key
    return ((seed & 0xFFFF) << 16) | (seed ^ 0xFFFF)


class Lfsr:
    """Fibonacci LFSR over a 32-bit register, shifting right.

    The output bit is the one shifted out; feedback is the parity of the
    tapped bits.  With primitive taps the register walks all 2^32 - 1
    nonzero states, so it can never reach zero from a nonzero seed.
    """

    __slots__ = ("state", "_mask")

    def __init__(self, seed: int, taps: tuple[int, ...] = PRIMARY_TAPS):
        if seed == 0:
            raise ValueError("LFSR seed must be nonzero")
        self.state = seed & 0xFFFFFFFF
        mask = 0
        for t in taps:
            mask |= 1 << (32 - t)
        self._mask = mask

    def next_bit(self) -> int:
        s = self.state
        out = s & 1
        self.state = (s >> 1) | (((s & self._mask).bit_count() & 1) << 31)
        return out

    def next_uint(self, nbits: int) -> int:
        s = self.state
        m = self._mask
        v = 0
        for _ in range(nbits):
            v = (v << 1) | (s & 1)
            s = (s >> 1) | (((s & m).bit_count() & 1) << 31)
        self.state = s
        return v


class LfsrPair:
    """Two registers with distinct primitive polynomials, stepped in
    lockstep; the keystream is the XOR of their output bits (a classic
    combination generator).  Both registers stay nonzero forever."""

    __slots__ = ("a", "b", "_mask_a", "_mask_b")

    def __init__(self, seed_a: int, seed_b: int):
        if seed_a == 0 or seed_b == 0:
            raise ValueError("LFSR seeds must be nonzero")
        self.a = seed_a & 0xFFFFFFFF
        self.b = seed_b & 0xFFFFFFFF
        mask_a = mask_b = 0
        for t in PRIMARY_TAPS:
            mask_a |= 1 << (32 - t)
        for t in SECONDARY_TAPS:
            mask_b |= 1 << (32 - t)
        self._mask_a = mask_a
        self._mask_b = mask_b

    def next_uint(self, nbits: int) -> int:
        a = self.a
        b = self.b
        ma = self._mask_a
        mb = self._mask_b
        v = 0
        for _ in range(nbits):
            v = (v << 1) | ((a ^ b) & 1)
            a = (a >> 1) | (((a & ma).bit_count() & 1) << 31)
            b = (b >> 1) | (((b & mb).bit_count() & 1) << 31)
        self.a = a
        self.b = b
        return v


def _fisher_yates(stream: Lfsr | LfsrPair) -> tuple[int, ...]:
    # Draw indices by rejection sampling, so there is no modulo bias.
    perm = list(range(CHIPS_PER_SYMBOL))
    draw = stream.next_uint
    for i in range(CHIPS_PER_SYMBOL - 1, 0, -1):
        nb = i.bit_length()
        j = draw(nb)
        while j > i:
            j = draw(nb)
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


class KeySchedule:
    """Sequential cursor over the keyed permutation stream.

    The permutation for symbol i is generated from the keystream state
    left behind by permutations 0..i-1 (key rotation: the stream
    continues across symbols).  A schedule instance caches the state at
    each symbol boundary, so sequential access is O(1) amortized and
    random access replays only once.  Do not share one instance between
    concurrent encoders; independent instances with the same key are
    equivalent.
    """

    def __init__(self, key: StegoKey):
        self.key = key
        seed_a = _expand_key(key.seed)
        seed_b = (~seed_a) & 0xFFFFFFFF  # nonzero: seed_a is never all-ones
        self._pair = LfsrPair(seed_a, seed_b)
        self._starts = [(seed_a, seed_b)]

    @property
    def lfsr_state(self) -> int:
        """Both register states packed into one value; never zero."""
        return (self._pair.a << 32) | self._pair.b

    @property
    def symbol_counter(self) -> int:
        """Number of symbols whose permutations have been generated."""
        return len(self._starts) - 1

    def _restore(self, state: tuple[int, int]) -> None:
        self._pair.a, self._pair.b = state

    def permutation(self, symbol_index: int) -> tuple[int, ...]:
        """Bijection on {0..31} for the given stream position."""
        if symbol_index < 0:
            raise ValueError(f"symbol_index must be >= 0, got {symbol_index}")
        while len(self._starts) <= symbol_index:
            self._restore(self._starts[-1])
            _fisher_yates(self._pair)
            self._starts.append((self._pair.a, self._pair.b))
        self._restore(self._starts[symbol_index])
        perm = _fisher_yates(self._pair)
        if symbol_index + 1 == len(self._starts):
            self._starts.append((self._pair.a, self._pair.b))
        return perm


def keystream_permutation(schedule: KeySchedule, symbol_index: int) -> tuple[int, ...]:
    return schedule.permutation(symbol_index)


def inverse_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


class ExtractResult(NamedTuple):
    symbol: int
    exact: bool
    weight: int  # size of the observed diff set; 5 when cleanly embedded


def embed_with_permutation(
    carrier: ChipSequence,
    stego_symbol: int,
    permutation: tuple[int, ...],
    codebook: StegoCodebook | None = None,
) -> ChipSequence:
    """Flip the carrier chips at the permuted pattern positions."""
    if not 0 <= stego_symbol < CODEBOOK_SIZE:
        raise ValueError(f"stego symbol out of range: {stego_symbol}")
    book = codebook if codebook is not None else build_codebook()
    return carrier.flip(permutation[p] for p in book.patterns[stego_symbol])


def embed(
    carrier: ChipSequence,
    stego_symbol: int,
    schedule: KeySchedule,
    symbol_index: int,
    code_set: CodeSet | None = None,
) -> ChipSequence:
    """Embed a covert symbol into a standard spreading code.

    The output differs from the carrier in exactly 5 chips and still
    despreads to the carrier's data symbol (residual distance 5, all
    other codes at distance >= 7).
    """
    cs = code_set if code_set is not None else standard_code_set()
    if decode_chips(carrier, cs).distance != 0:
        raise InvalidCarrierError(
            f"carrier {carrier.to_string()} is not a standard spreading code"
        )
    return embed_with_permutation(carrier, stego_symbol, schedule.permutation(symbol_index))


def extract_with_permutation(
    received: ChipSequence,
    permutation: tuple[int, ...],
    code_set: CodeSet | None = None,
    codebook: StegoCodebook | None = None,
) -> ExtractResult:
    """Read the covert symbol back from the received word's diff set.

    Despreads to the nearest standard code, unpermutes the differing
    positions and looks the result up in the codebook.  A non-exact match
    falls back to the nearest pattern (ties to the lowest symbol) with
    exact=False, so the covert channel degrades instead of erasing.
    """
    cs = code_set if code_set is not None else standard_code_set()
    book = codebook if codebook is not None else build_codebook()
    nearest = decode_chips(received, cs)
    diff = received.diff_positions(cs.codes[nearest.symbol])
    inv = inverse_permutation(permutation)
    positions = frozenset(inv[p] for p in diff)
    exact_symbol = book.symbol_for(positions)
    if exact_symbol is not None:
        return ExtractResult(exact_symbol, True, len(positions))
    symbol, _ = book.nearest_symbol(positions)
    return ExtractResult(symbol, False, len(positions))


def extract(
    received: ChipSequence,
    schedule: KeySchedule,
    symbol_index: int,
    code_set: CodeSet | None = None,
) -> ExtractResult:
    return extract_with_permutation(received, schedule.permutation(symbol_index), code_set)
