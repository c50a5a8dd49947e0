"""Chip-stream file format.

Layout: 4-byte magic "CHIP", 1 version byte, symbol count as an unsigned
8-byte little-endian integer, then the packed chips (32 per symbol, chip
0 of symbol 0 in the most significant bit of payload byte 0).  A symbol
occupies exactly 4 payload bytes, so a valid file is 13 + 4*N bytes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .chipmap import CHIPS_PER_SYMBOL

MAGIC = b"CHIP"
VERSION = 1
HEADER_SIZE = 13
_BYTES_PER_SYMBOL = CHIPS_PER_SYMBOL // 8


class ChipStreamFormatError(ValueError):
    """Malformed chip-stream file; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def write_chip_stream(path: str | Path, chips: np.ndarray) -> None:
    chips = np.asarray(chips, dtype=np.uint8)
    if chips.ndim != 2 or chips.shape[1] != CHIPS_PER_SYMBOL:
        raise ValueError(f"expected an (N, 32) chip matrix, got shape {chips.shape}")
    header = MAGIC + bytes([VERSION]) + struct.pack("<Q", chips.shape[0])
    Path(path).write_bytes(header + np.packbits(chips.reshape(-1)).tobytes())


def read_chip_stream(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_SIZE:
        raise ChipStreamFormatError(
            f"truncated header: {len(raw)} of {HEADER_SIZE} bytes", len(raw)
        )
    if raw[:4] != MAGIC:
        raise ChipStreamFormatError(f"bad magic {raw[:4]!r}, expected {MAGIC!r}", 0)
    if raw[4] != VERSION:
        raise ChipStreamFormatError(f"unsupported version {raw[4]}", 4)
    (count,) = struct.unpack("<Q", raw[5:HEADER_SIZE])
    expected = count * _BYTES_PER_SYMBOL
    payload = raw[HEADER_SIZE:]
    if len(payload) < expected:
        raise ChipStreamFormatError(
            f"payload holds {len(payload)} bytes, header promises {expected}",
            HEADER_SIZE + len(payload),
        )
    if len(payload) > expected:
        raise ChipStreamFormatError(
            f"{len(payload) - expected} trailing bytes after chip payload",
            HEADER_SIZE + expected,
        )
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    return bits.reshape(-1, CHIPS_PER_SYMBOL)
