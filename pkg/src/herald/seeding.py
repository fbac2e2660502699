"""Deterministic derivation of per-run seeds from a master seed and a key path."""

from __future__ import annotations

import zlib

import numpy as np


def _word(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return zlib.crc32(str(key).encode())


def derive_seed(master: int, *keys) -> int:
    """A 63-bit seed that depends only on ``master`` and the ordered ``keys``."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF] + [_word(k) for k in keys])
    hi, lo = ss.generate_state(2)
    return ((int(hi) << 32) | int(lo)) & 0x7FFFFFFFFFFFFFFF
