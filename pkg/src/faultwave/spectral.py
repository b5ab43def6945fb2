"""Fourier and short-time Fourier transforms with high-band energy indices.

Normalization: one-sided magnitudes are |FFT(x)| / sqrt(N) (unitary scaling),
so summing squared magnitudes with weight 2 on interior bins (1 on DC and,
for even N, the Nyquist bin) reproduces the signal energy sum(x**2) exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateInputError, ShapeError
from .signal_model import Trace


@dataclass(eq=False)
class Spectrum:
    """One-sided magnitude/phase spectrum of a whole trace."""

    bin_hz: float
    magnitudes: np.ndarray
    phase: np.ndarray
    n_samples: int

    def frequencies(self) -> np.ndarray:
        return np.arange(self.magnitudes.shape[0]) * self.bin_hz

    def energy(self) -> float:
        """Total signal energy sum(x**2) recovered from the one-sided bins."""
        weights = np.full(self.magnitudes.shape[0], 2.0)
        weights[0] = 1.0
        if self.n_samples % 2 == 0:
            weights[-1] = 1.0
        return float(np.sum(weights * self.magnitudes**2))


@dataclass(eq=False)
class Spectrogram:
    """Hann-windowed magnitude frames; frame f covers samples [f*hop, f*hop+window_len)."""

    window_len: int
    hop: int
    frames: np.ndarray
    frame_times_s: np.ndarray
    bin_hz: float
    sample_rate_hz: float
    window_fn: str = field(default="hann")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def frequencies(self) -> np.ndarray:
        return np.arange(self.frames.shape[1]) * self.bin_hz

    def frame_starts(self) -> np.ndarray:
        return np.arange(self.n_frames) * self.hop


def dft(trace: Trace) -> Spectrum:
    """One-sided discrete Fourier transform under unitary scaling.

    Raises:
        DegenerateInputError: fewer than 2 samples.
    """
    n = trace.n_samples
    if n < 2:
        raise DegenerateInputError(f"need at least 2 samples for a spectrum, got {n}")
    coeffs = np.fft.rfft(trace.samples) / np.sqrt(n)
    return Spectrum(
        bin_hz=trace.sample_rate_hz / n,
        magnitudes=np.abs(coeffs),
        phase=np.angle(coeffs),
        n_samples=n,
    )


def stft(trace: Trace, window_len: int = 64, hop: int = 16) -> Spectrogram:
    """Short-time Fourier transform with a Hann window.

    Frames start every ``hop`` samples; frame times mark window centers.
    Defaults (64 samples, hop 16) resolve a 10 ms-scale burst at 2 kHz.

    Raises:
        ShapeError: window longer than the trace, or hop < 1.
    """
    n = trace.n_samples
    if window_len > n:
        raise ShapeError(f"window_len {window_len} exceeds trace length {n}")
    if window_len < 2:
        raise ShapeError(f"window_len must be >= 2, got {window_len}")
    if hop < 1:
        raise ShapeError(f"hop must be >= 1, got {hop}")

    window = np.hanning(window_len)
    n_frames = (n - window_len) // hop + 1
    starts = np.arange(n_frames) * hop
    segments = trace.samples[starts[:, None] + np.arange(window_len)[None, :]]
    frames = np.abs(np.fft.rfft(segments * window, axis=1)) / np.sqrt(window_len)
    return Spectrogram(
        window_len=window_len,
        hop=hop,
        frames=frames,
        frame_times_s=(starts + window_len / 2.0) / trace.sample_rate_hz,
        bin_hz=trace.sample_rate_hz / window_len,
        sample_rate_hz=trace.sample_rate_hz,
    )


def highband_energy_index(
    transformed: Spectrum | Spectrogram, cutoff_hz: float, span: tuple[int, int]
) -> float:
    """Normalized squared-magnitude sum in bins at or above ``cutoff_hz``.

    For a :class:`Spectrum` the input is expected to be the transform of the
    span taken in isolation; the sum runs over its high bins. For a
    :class:`Spectrogram` the sum runs over every frame intersecting the span.
    Either way the result is divided by the span length in samples.

    Raises:
        DegenerateInputError: empty span.
        ConfigError: cutoff at or above the representable band edge.
    """
    lo, hi = span
    if hi <= lo:
        raise DegenerateInputError(f"span {span} is empty")

    if cutoff_hz >= _nyquist(transformed):
        raise ConfigError(f"cutoff {cutoff_hz} Hz is at or above the Nyquist frequency")
    bins = transformed.frequencies() >= cutoff_hz

    if isinstance(transformed, Spectrum):
        return float(np.sum(transformed.magnitudes[bins] ** 2) / (hi - lo))

    starts = transformed.frame_starts()
    in_span = (starts < hi) & (starts + transformed.window_len > lo)
    return float(np.sum(transformed.frames[np.ix_(in_span, bins)] ** 2) / (hi - lo))


def _nyquist(transformed: Spectrum | Spectrogram) -> float:
    if isinstance(transformed, Spectrogram):
        return transformed.sample_rate_hz / 2.0
    return transformed.bin_hz * transformed.n_samples / 2.0
