"""Time-dependent coupling ``g(t)`` for wavepacket-mode (pulsed) light."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import ValidationError

SHAPES = ("constant", "gaussian", "raised_cosine")


@dataclass(frozen=True)
class Envelope:
    """Slow envelope of the coupling, scaled to ``peak_g``.

    ``gaussian`` uses ``center``/``width`` (1/e half-width of g);
    ``raised_cosine`` is ``sin^2`` over ``[start, start + duration]`` and zero outside.
    """

    shape: str = "constant"
    peak_g: float = 0.0
    center: float = 0.0
    width: float = 1.0
    start: float = 0.0
    duration: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValidationError(f"envelope shape must be one of {SHAPES}, got {self.shape!r}")
        if not self.peak_g >= 0:
            raise ValidationError(f"peak_g must be >= 0, got {self.peak_g}")
        if self.shape == "gaussian" and not self.width > 0:
            raise ValidationError(f"gaussian width must be > 0, got {self.width}")
        if self.shape == "raised_cosine" and not self.duration > 0:
            raise ValidationError(f"raised_cosine duration must be > 0, got {self.duration}")

    @property
    def is_constant(self) -> bool:
        return self.shape == "constant"

    @property
    def support(self) -> tuple[float, float]:
        if self.shape == "raised_cosine":
            return self.start, self.start + self.duration
        return -math.inf, math.inf

    def timescale(self) -> float:
        """Envelope rise scale compared against the carrier period ``2 pi``."""
        if self.shape == "gaussian":
            return self.width
        if self.shape == "raised_cosine":
            return self.duration
        return math.inf

    def is_slow(self, factor: float = 10.0) -> bool:
        """Slow-envelope (rotating-wave) guard: timescale >= factor carrier periods."""
        return self.timescale() >= factor * 2 * math.pi


def coupling_at(envelope: Envelope, t: float) -> float:
    if envelope.shape == "constant":
        return envelope.peak_g
    if envelope.shape == "gaussian":
        return envelope.peak_g * math.exp(-((t - envelope.center) / envelope.width) ** 2)
    s = (t - envelope.start) / envelope.duration
    if s <= 0.0 or s >= 1.0:
        return 0.0
    return envelope.peak_g * math.sin(math.pi * s) ** 2


def pulse_area(envelope: Envelope, t0: float, t1: float) -> float:
    """``integral of g(t) dt`` over ``[t0, t1]`` (infinite limits allowed)."""
    if t1 < t0:
        raise ValidationError(f"t1={t1} < t0={t0}")
    if t1 == t0:
        return 0.0
    if envelope.shape == "constant":
        if math.isinf(t1 - t0):
            return math.inf if envelope.peak_g > 0 else 0.0
        return envelope.peak_g * (t1 - t0)
    lo, hi = envelope.support
    a, b = max(t0, lo), min(t1, hi)
    if b <= a:
        return 0.0
    edges = [a, b]
    if envelope.shape == "gaussian" and a < envelope.center < b:
        # quad maps infinite ranges onto [0, 1]; anchoring at the peak keeps it resolved
        edges = [a, envelope.center, b]
    total = 0.0
    for lo_, hi_ in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda t: coupling_at(envelope, t), lo_, hi_,
                                epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return float(total)


def coupling_series(envelope: Envelope, times) -> np.ndarray:
    return np.array([coupling_at(envelope, float(t)) for t in np.ravel(times)])
