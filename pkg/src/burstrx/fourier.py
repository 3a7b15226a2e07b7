"""Fixed-size FFT kernels mirroring the hardware butterfly decomposition.

The receive/transmit flow only ever needs three transform sizes: 128 points
(pure radix-2, seven butterfly layers), 144 points (four radix-2 layers that
reuse the 128-point layer code, then two radix-3 layers, i.e. a 16 x 9
decomposition), and 8 points (radix-2, used by the equalizer's interpolation
FFT).  A direct O(N^2) DFT is kept alongside as the independent oracle every
kernel is tested against.

Conventions
-----------
Forward transform is unscaled, ``X(k) = sum_n x(n) exp(-2j pi n k / N)``; the
inverse carries the ``1/N`` factor.  Bin ``k`` corresponds to discrete
frequency ``k/N`` cycles per sample, with bins above ``N/2`` representing
negative frequencies.  Real input therefore yields Hermitian output,
``X(N-k) = conj(X(k))``.

All functions operate on the last axis, so stacked inputs of shape
``(..., N)`` transform as a batch.
"""

from functools import lru_cache

import numpy as np

from .errors import FftSizeError

# Radix-3 path constants: one three-point DFT costs two real-coefficient
# multiplies in this form.
RADIX3_COS_COEFF = np.cos(2 * np.pi / 3) - 1.0  # -1.5
RADIX3_SIN_COEFF = 1j * np.sin(2 * np.pi / 3)


def dft_oracle(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Direct O(N^2) DFT used as the correctness oracle.

    Independent of the fast kernels below by construction: it evaluates the
    defining sum through a precomputed exponential matrix.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n < 1:
        raise FftSizeError("dft_oracle requires length >= 1")
    mat = _dft_matrix(n, inverse)
    y = x @ mat
    if inverse:
        y /= n
    return y


@lru_cache(maxsize=None)
def _dft_matrix(n: int, inverse: bool) -> np.ndarray:
    sign = 1.0 if inverse else -1.0
    k = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / n)


def radix3_butterfly(a, b, c, tw1, tw2, inverse: bool = False):
    """Three-point DFT of ``(a, b*tw1, c*tw2)`` in the two-multiplier form.

    The shared term ``t = b*tw1 + c*tw2`` feeds one multiplier with
    ``cos(2pi/3) - 1`` and the difference path feeds the other with
    ``j*sin(2pi/3)``, matching the three computational paths of the hardware
    radix-3 block.
    """
    q = np.asarray(b) * tw1
    r = np.asarray(c) * tw2
    t = q + r
    x0 = np.asarray(a) + t
    u = x0 + RADIX3_COS_COEFF * t
    v = RADIX3_SIN_COEFF * (q - r)
    if inverse:
        return x0, u + v, u - v
    return x0, u - v, u + v


@lru_cache(maxsize=None)
def _stage_twiddles(n: int, half: int, inverse: bool) -> np.ndarray:
    sign = 1.0 if inverse else -1.0
    return np.exp(sign * 2j * np.pi * np.arange(half) / n)


def _fft_stages(x: np.ndarray, factors: tuple, inverse: bool) -> np.ndarray:
    """Decimation-in-time recursion over the factor list, batched.

    Splitting into ``r`` interleaved subsequences is done with one reshape so
    the whole stack recurses in a single call per layer.
    """
    n = x.shape[-1]
    if not factors:
        return x
    r = factors[0]
    m = n // r
    # x[..., j::r] becomes subs[..., j, :] after the reshape/swap.
    subs = np.swapaxes(x.reshape(x.shape[:-1] + (m, r)), -1, -2)
    subs = _fft_stages(subs, factors[1:], inverse)
    w = _stage_twiddles(n, m, inverse)
    if r == 2:
        e = subs[..., 0, :]
        o = subs[..., 1, :] * w
        return np.concatenate([e + o, e - o], axis=-1)
    x0, x1, x2 = radix3_butterfly(
        subs[..., 0, :], subs[..., 1, :], subs[..., 2, :], w, w * w, inverse
    )
    return np.concatenate([x0, x1, x2], axis=-1)


def fft_pow2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Radix-2 FFT for power-of-two lengths (8 and 128 in this chain)."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n < 2 or (n & (n - 1)) != 0:
        raise FftSizeError(f"fft_pow2 requires a power-of-two length, got {n}")
    factors = (2,) * (n.bit_length() - 1)
    y = _fft_stages(x, factors, inverse)
    if inverse:
        y = y / n
    return y


def fft_144(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """144-point FFT decomposed as 16 x 9: four radix-2 layers, two radix-3.

    The radix-2 layers run the same stage code as :func:`fft_pow2`, mirroring
    the module reuse between the 128- and 144-point hardware blocks.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-1] != 144:
        raise FftSizeError(f"fft_144 requires length 144, got {x.shape[-1]}")
    y = _fft_stages(x, (2, 2, 2, 2, 3, 3), inverse)
    if inverse:
        y = y / 144.0
    return y


def fft_any(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Dispatch to the right fixed-size kernel by input length."""
    n = np.asarray(x).shape[-1]
    if n == 144:
        return fft_144(x, inverse)
    return fft_pow2(x, inverse)
