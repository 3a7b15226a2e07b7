"""Burst-mode DSP chain for 25 Gbit/s OOK upstream reception.

Provides a framed transmitter, an impairment channel, and a burst receiver
(frame detection, frequency-domain timing recovery, frame synchronization,
frequency-domain equalization), together with the fixed-size FFT kernels the
hardware flow is built on and a static pipeline rate/latency model.
"""

__version__ = "0.1.0"
