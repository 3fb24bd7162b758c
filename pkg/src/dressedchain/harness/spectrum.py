"""Power spectra of sampled observables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from ..model import ValidationError

MIN_SAMPLES = 64


@dataclass
class SpectrumResult:
    """One-sided power spectrum on angular frequencies ``2 pi k / (n dt)``."""

    frequencies: np.ndarray
    power: np.ndarray
    detected_peaks: list[tuple[float, float]]

    @property
    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def bin_of(self, omega: float) -> int:
        return int(round(omega / self.bin_width))


def spectrum(series, dt_sample: float, median_factor: float = 20.0,
             relative_floor: float = 1e-2) -> SpectrumResult:
    """Hann-windowed periodogram of ``series`` with peak detection.

    The mean is removed first.  A local maximum counts as a peak when its
    power exceeds ``median_factor`` times the median power and
    ``relative_floor`` times the largest power.  Series whose fluctuations are
    at round-off level relative to their magnitude yield no peaks.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < MIN_SAMPLES:
        raise ValidationError(f"spectrum needs >= {MIN_SAMPLES} samples, got {x.size}")
    if not dt_sample > 0:
        raise ValidationError(f"dt_sample must be > 0, got {dt_sample}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("series contains non-finite values")
    scale = max(float(np.max(np.abs(x))), np.finfo(float).tiny)
    y = x - x.mean()
    w = np.hanning(x.size)
    power = np.abs(np.fft.rfft(y * w)) ** 2 / np.sum(w**2)
    freqs = 2 * np.pi * np.fft.rfftfreq(x.size, dt_sample)
    noise = (1e-10 * scale) ** 2 * x.size
    threshold = max(median_factor * float(np.median(power)), relative_floor * float(power.max()), noise)
    idx, _ = find_peaks(power, height=threshold)
    peaks = [(float(freqs[i]), float(power[i])) for i in idx]
    return SpectrumResult(freqs, power, peaks)
