"""Impairment channel between transmitter samples and receiver samples.

Everything here is a declared stand-in: the hardware paper gives no channel
equations, so each impairment is a simple testable model.  Received optical
power is not modeled physically; an optional two-point linear calibration maps
an ROP axis onto electrical SNR.

Impairment order in :func:`run_channel`: gain, chromatic dispersion, low-pass,
fractional delay / clock drift, additive noise, with inter-burst gaps spliced
around the frame.  Whole-waveform numpy FFTs are used for these stand-ins; the
hand-built fixed-size kernels remain the signal path of the actual chain.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ChannelError

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BAUD_HZ = 25e9
SAMPLE_RATE_HZ = BAUD_HZ * 1.125


@dataclass
class ChannelConfig:
    """Impairment settings; ``None`` disables the corresponding block."""

    snr_db: Optional[float] = None
    timing_offset_ui: float = 0.0
    clock_ppm: float = 0.0
    f3db_ghz: Optional[float] = None
    fiber_km: float = 0.0
    dispersion_ps_nm_km: float = 2.0
    lambda_nm: float = 1328.0
    gap_samples: int = 1080
    gain: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.gap_samples < 0:
            raise ChannelError("gap_samples must be >= 0")
        if self.fiber_km < 0:
            raise ChannelError("fiber_km must be >= 0")
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ChannelError("snr_db must be finite or None")


def _freqs_hz(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / SAMPLE_RATE_HZ)


def apply_fractional_delay(x: np.ndarray, tau_samples: float) -> np.ndarray:
    """Delay a waveform by a (fractional) number of samples.

    All-pass ``exp(-2j pi f tau)`` applied over the whole waveform in one
    block, so the shift is exact (circularly; bursts are gap-padded).
    """
    if tau_samples == 0.0:
        return np.asarray(x, dtype=np.float64).copy()
    n = len(x)
    f = np.fft.rfftfreq(n, d=1.0)
    h = np.exp(-2j * np.pi * f * tau_samples)
    if n % 2 == 0:
        # A real signal cannot carry a complex factor at the shared +-Nyquist
        # bin.  Integer delays give +-1 there and stay exact; fractional ones
        # leave that single (empty, beyond the RRC stopband) bin untouched.
        nyq = np.exp(-1j * np.pi * tau_samples)
        h[-1] = nyq.real if abs(nyq.imag) < 1e-12 else 1.0
    return np.fft.irfft(np.fft.rfft(x) * h, n)


def apply_lowpass(x: np.ndarray, f3db_ghz: float) -> np.ndarray:
    """Gaussian low-pass with |H(f3db)| = 1/sqrt(2) and zero phase.

    The exponent is scaled so the 3 dB point sits exactly at ``f3db``, i.e.
    ``|H| = 2**(-0.5 * (f/f3db)**2)``.
    """
    if f3db_ghz <= 0:
        raise ChannelError("f3db_ghz must be positive")
    n = len(x)
    f = np.fft.rfftfreq(n, d=1.0 / SAMPLE_RATE_HZ)
    h = 2.0 ** (-0.5 * (f / (f3db_ghz * 1e9)) ** 2)
    return np.fft.irfft(np.fft.rfft(x) * h, n)


def dispersion_phase(f_hz, fiber_km: float, d_ps_nm_km: float, lambda_nm: float):
    """Quadratic spectral phase of chromatic dispersion, in radians."""
    d_si = d_ps_nm_km * 1e-6          # s/m^2
    lam = lambda_nm * 1e-9            # m
    length = fiber_km * 1e3           # m
    return np.pi * d_si * lam**2 * length * np.asarray(f_hz) ** 2 / SPEED_OF_LIGHT


def apply_chromatic_dispersion(
    x: np.ndarray, fiber_km: float, d_ps_nm_km: float, lambda_nm: float
) -> np.ndarray:
    """All-pass quadratic-phase rotation; intensity power fading is out of scope."""
    if fiber_km == 0.0:
        return np.asarray(x, dtype=np.float64).copy()
    n = len(x)
    f = np.fft.rfftfreq(n, d=1.0 / SAMPLE_RATE_HZ)
    h = np.exp(1j * dispersion_phase(f, fiber_km, d_ps_nm_km, lambda_nm))
    if n % 2 == 0:
        h[-1] = 1.0  # shared +-Nyquist bin of a real signal stays real
    return np.fft.irfft(np.fft.rfft(x) * h, n)


def apply_clock_drift(x: np.ndarray, ppm: float, chunk: int = 432) -> np.ndarray:
    """Sampling-frequency offset as a slowly growing fractional delay.

    The waveform is delayed chunk by chunk with tau(t) = ppm * 1e-6 * t
    evaluated at each chunk center; chunks are filtered with generous padding
    so the piecewise-constant approximation only leaves sub-1e-2-sample steps.
    """
    if ppm == 0.0:
        return np.asarray(x, dtype=np.float64).copy()
    x = np.asarray(x, dtype=np.float64)
    pad = 256
    out = np.empty_like(x)
    for start in range(0, len(x), chunk):
        stop = min(start + chunk, len(x))
        lo = max(0, start - pad)
        hi = min(len(x), stop + pad)
        tau = ppm * 1e-6 * 0.5 * (start + stop)
        shifted = apply_fractional_delay(x[lo:hi], tau)
        out[start:stop] = shifted[start - lo : stop - lo]
    return out


def signal_power_ac(x: np.ndarray) -> float:
    """Mean-removed power, the reference for the SNR definition."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean((x - x.mean()) ** 2))


def apply_awgn(x: np.ndarray, snr_db: float, rng: np.random.Generator,
               power_ref: Optional[float] = None) -> np.ndarray:
    """Add white Gaussian noise at the requested electrical SNR.

    Noise variance is ``P_ac / 10**(snr/10)`` with ``P_ac`` the mean-removed
    signal power (or an explicit reference, e.g. measured on the frame before
    gap padding).
    """
    p = signal_power_ac(x) if power_ref is None else power_ref
    if p <= 0.0:
        raise ChannelError("cannot set an SNR on a zero-power signal")
    sigma = np.sqrt(p / 10.0 ** (snr_db / 10.0))
    return x + rng.normal(0.0, sigma, size=len(x))


def rop_to_snr(rop_dbm: float, cal: dict) -> float:
    """Linear two-point map from received optical power to electrical SNR."""
    r1, s1 = cal["rop1_dbm"], cal["snr1_db"]
    r2, s2 = cal["rop2_dbm"], cal["snr2_db"]
    if r1 == r2:
        raise ChannelError("ROP calibration points must differ")
    return s1 + (rop_dbm - r1) * (s2 - s1) / (r2 - r1)


def run_channel(frame_samples: np.ndarray, cfg: ChannelConfig) -> np.ndarray:
    """Gap-pad a frame and push it through the configured impairments."""
    x = np.asarray(frame_samples, dtype=np.float64) * cfg.gain
    if cfg.fiber_km:
        x = apply_chromatic_dispersion(
            x, cfg.fiber_km, cfg.dispersion_ps_nm_km, cfg.lambda_nm
        )
    if cfg.f3db_ghz is not None and np.isfinite(cfg.f3db_ghz):
        x = apply_lowpass(x, cfg.f3db_ghz)
    if cfg.timing_offset_ui:
        x = apply_fractional_delay(x, cfg.timing_offset_ui * 1.125)
    if cfg.clock_ppm:
        x = apply_clock_drift(x, cfg.clock_ppm)
    power_ref = signal_power_ac(x) if cfg.snr_db is not None else None
    gap = np.zeros(cfg.gap_samples)
    out = np.concatenate([gap, x, gap])
    if cfg.snr_db is not None:
        rng = np.random.default_rng(cfg.rng_seed)
        out = apply_awgn(out, cfg.snr_db, rng, power_ref=power_ref)
    return out
