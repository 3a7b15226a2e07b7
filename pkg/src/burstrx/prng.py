"""Seeded bit generator used for preambles and payload data.

Every pseudo-random sequence in the frame comes from xorshift64* so that any
implementation of this chain, in any language, can reproduce the exact same
symbols from the documented seeds.  One state update yields 64 output bits,
taken MSB first from ``(x * 2685821657736338717) mod 2**64``.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_MULT = 2685821657736338717


def xorshift64star_words(seed: int, n_words: int) -> np.ndarray:
    """Return ``n_words`` consecutive 64-bit outputs for the given seed."""
    x = seed & _MASK64
    if x == 0:
        x = 0x9E3779B97F4A7C15  # zero state is absorbing; remap like splitmix
    out = np.empty(n_words, dtype=np.uint64)
    for i in range(n_words):
        x ^= (x >> 12)
        x ^= (x << 25) & _MASK64
        x ^= (x >> 27)
        out[i] = (x * _MULT) & _MASK64
    return out


def bits(seed: int, n_bits: int) -> np.ndarray:
    """Return ``n_bits`` pseudo-random bits in {0, 1} as uint8."""
    n_words = (n_bits + 63) // 64
    words = xorshift64star_words(seed, n_words)
    octets = words.astype(">u8").view(np.uint8).reshape(-1, 8)  # MSByte first
    b = np.unpackbits(octets, axis=1)
    return b.reshape(-1)[:n_bits]
