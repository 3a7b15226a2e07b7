"""Burst frame construction: designed preamble, payload, region tags.

The frame is ``A || B || C || payload`` at one sample per symbol with the
unipolar PAM2 alphabet {0, 1}:

* Preamble A, 192 symbols by default: the repeated pair ``[0, 1]``, i.e. a
  tone at half the baud rate, used for frame detection and the initial
  sampling-phase estimate.
* Preamble B, 96 symbols: three copies of a seeded 32-symbol sequence Pn with
  bipolar signs ``[+1, +1, -1]`` (the third block is the bit-flip of the
  first), used for frame synchronization.
* Preamble C, 768 symbols: seeded random bits, eight 96-symbol beats used for
  equalizer tap initialization.

All pseudo-random content comes from the documented xorshift64* generator so
the sequences are reproducible from the seeds alone (see :mod:`burstrx.prng`).
"""

from dataclasses import dataclass, field

import numpy as np

from . import prng
from .errors import LayoutError, PayloadError

PN_LEN = 32

REGION_A = "preamble_a"
REGION_B = "preamble_b"
REGION_C = "preamble_c"
REGION_PAYLOAD = "payload"


@dataclass(frozen=True)
class FrameLayout:
    """Lengths and seeds shared by transmitter and receiver."""

    preamble_a_len: int = 192
    preamble_b_len: int = 96
    preamble_c_len: int = 768
    payload_len: int = 130_000
    pn_seed: int = 0x5EED_0001
    preamble_c_seed: int = 0x5EED_0002

    def __post_init__(self):
        if self.preamble_a_len <= 0 or self.preamble_a_len % 2:
            raise LayoutError("preamble_a_len must be positive and even")
        if self.preamble_b_len != 3 * PN_LEN:
            raise LayoutError(f"preamble_b_len must be {3 * PN_LEN}")
        if self.preamble_c_len <= 0 or self.preamble_c_len % 96:
            raise LayoutError("preamble_c_len must be a positive multiple of 96")
        if self.payload_len < 0:
            raise LayoutError("payload_len must be >= 0")

    @property
    def preamble_len(self) -> int:
        return self.preamble_a_len + self.preamble_b_len + self.preamble_c_len

    @property
    def total_len(self) -> int:
        return self.preamble_len + self.payload_len

    def preamble_duration_ns(self, baud_gbd: float = 25.0) -> float:
        """Preamble airtime in nanoseconds at the given baud rate."""
        return self.preamble_len / baud_gbd

    def region_of(self, index: int) -> str:
        if index < 0 or index >= self.total_len:
            raise IndexError(f"symbol index {index} outside frame")
        if index < self.preamble_a_len:
            return REGION_A
        if index < self.preamble_a_len + self.preamble_b_len:
            return REGION_B
        if index < self.preamble_len:
            return REGION_C
        return REGION_PAYLOAD

    def region_slice(self, region: str) -> slice:
        a, b, c = self.preamble_a_len, self.preamble_b_len, self.preamble_c_len
        bounds = {
            REGION_A: (0, a),
            REGION_B: (a, a + b),
            REGION_C: (a + b, a + b + c),
            REGION_PAYLOAD: (a + b + c, self.total_len),
        }
        if region not in bounds:
            raise KeyError(region)
        lo, hi = bounds[region]
        return slice(lo, hi)


@dataclass
class SymbolStream:
    """PAM2 symbols in {0, 1} with per-region tags from the layout."""

    symbols: np.ndarray
    layout: FrameLayout = field(repr=False, default=None)

    def __len__(self):
        return len(self.symbols)

    def region(self, name: str) -> np.ndarray:
        return self.symbols[self.layout.region_slice(name)]


def gen_preamble_a(layout: FrameLayout) -> np.ndarray:
    """Alternating ``[0, 1, 0, 1, ...]`` tone preamble."""
    if layout.preamble_a_len % 2:
        raise LayoutError("preamble A length must be even")
    out = np.zeros(layout.preamble_a_len, dtype=np.float64)
    out[1::2] = 1.0
    return out


def pn_sequence(seed: int) -> np.ndarray:
    """The 32-symbol bipolar +-1 synchronization sequence for a seed."""
    return 2.0 * prng.bits(seed, PN_LEN).astype(np.float64) - 1.0


def gen_preamble_b(layout: FrameLayout) -> np.ndarray:
    """Three Pn blocks with signs [+1, +1, -1], mapped back to {0, 1}.

    In the bipolar domain the third block is the negation of the first, which
    for unipolar bits means a plain bit flip.
    """
    block = prng.bits(layout.pn_seed, PN_LEN).astype(np.float64)
    return np.concatenate([block, block, 1.0 - block])


def gen_preamble_c(layout: FrameLayout) -> np.ndarray:
    """Seeded random training symbols, a whole number of 96-symbol beats."""
    return prng.bits(layout.preamble_c_seed, layout.preamble_c_len).astype(np.float64)


def gen_payload_bits(layout: FrameLayout, seed: int) -> np.ndarray:
    """Seeded PRBS payload of the layout's declared length."""
    return prng.bits(seed, layout.payload_len)


def build_frame(layout: FrameLayout, payload_bits: np.ndarray) -> SymbolStream:
    """Assemble ``A || B || C || payload`` and tag the regions."""
    payload_bits = np.asarray(payload_bits)
    if len(payload_bits) != layout.payload_len:
        raise PayloadError(
            f"payload has {len(payload_bits)} bits, layout declares {layout.payload_len}"
        )
    symbols = np.concatenate(
        [
            gen_preamble_a(layout),
            gen_preamble_b(layout),
            gen_preamble_c(layout),
            payload_bits.astype(np.float64),
        ]
    )
    return SymbolStream(symbols=symbols, layout=layout)


def validate_pn_seed(seed: int, min_ratio: float = 2.0) -> float:
    """Check the sync-metric peak uniqueness for a Pn seed.

    Builds the clean bipolar preamble B, evaluates the sliding metric at every
    placement, and returns the ratio of the true peak to the largest magnitude
    elsewhere.  Raises :class:`LayoutError` when the ratio is below
    ``min_ratio``; callers use this at config load to reject bad seeds.
    """
    pn = pn_sequence(seed)
    b = np.concatenate([pn, pn, -pn])
    # Preamble B embedded mid-window so every relevant shift of the metric
    # sees it, flanked by silence.
    guard = np.zeros(96)
    window = np.concatenate([guard, b, guard])
    corr = np.correlate(window, pn, mode="valid")
    metric = corr[:-64] + corr[32:-32] - corr[64:]
    peak_pos = int(np.argmax(metric))
    peak = metric[peak_pos]
    rest = np.abs(np.delete(metric, peak_pos))
    ratio = peak / max(rest.max(), 1e-12)
    if ratio < min_ratio:
        raise LayoutError(
            f"pn_seed {seed:#x} gives sync peak ratio {ratio:.2f} < {min_ratio}"
        )
    return float(ratio)
