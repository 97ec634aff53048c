"""FMCW waveform synthesis at complex baseband.

Five waveform variants are supported, all with unit amplitude:

* ``TRIANGLE`` -- an up-chirp of slope ``alpha = B/Tc`` followed by its
  phase-continuous mirrored down-chirp, spanning one symbol ``Ts = 2*Tc``.
  The down ramp sweeps the instantaneous frequency from ``f0 + B`` back to
  ``f0``; it equals the conjugated time-reverse of the up ramp up to a
  constant phase.
* ``SAWTOOTH`` -- two identical up-chirps of slope ``alpha`` back to back
  over ``Ts``; the second chirp restarts at phase zero.
* ``GENTLE``   -- a single up-chirp of slope ``alpha/2`` over ``Ts``
  (sweeps ``B`` in total).
* ``EXTENDED`` -- a single up-chirp of slope ``alpha`` over ``Ts``
  (sweeps ``2B`` in total); used as the doubled-resolution oracle.
* ``LINEAR``   -- the conventional single up-chirp over ``Tc``.

The sample grid is left-closed: sample ``n`` represents ``t = n/fs``, so the
sample at ``t = Tc`` belongs to the second half of a two-part waveform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError

__all__ = [
    "WaveformKind",
    "WaveformSpec",
    "ComplexSignal",
    "generate",
    "spectrogram",
]

# Relative slack for "fs*Tc must be an integer" style checks.
_GRID_TOL = 1e-9


class WaveformKind(str, Enum):
    TRIANGLE = "triangle"
    SAWTOOTH = "sawtooth"
    GENTLE = "gentle"
    EXTENDED = "extended"
    LINEAR = "linear"


def default_sample_rate(kind: WaveformKind, bandwidth_hz: float) -> float:
    """Default fs: 2B, or 4B for the extended sweep (it reaches 2B).

    These defaults make the delay quantum ``1/(2B)`` an exact number of
    samples (one at fs=2B, two at fs=4B), so delay grids expressed as
    ``p/(2B)`` are representable without interpolation.
    """
    if kind is WaveformKind.EXTENDED:
        return 4.0 * bandwidth_hz
    return 2.0 * bandwidth_hz


@dataclass(frozen=True)
class WaveformSpec:
    """Parameters of one FMCW waveform.

    Attributes:
        kind: waveform variant
        bandwidth_hz: swept bandwidth B of a single chirp, Hz
        chirp_duration_s: single-chirp duration Tc, seconds
        start_freq_hz: baseband start frequency f0, Hz
        sample_rate_hz: fs; defaults to 2B (4B for EXTENDED)
    """

    kind: WaveformKind
    bandwidth_hz: float
    chirp_duration_s: float
    start_freq_hz: float = 0.0
    sample_rate_hz: float | None = None

    def __post_init__(self):
        kind = WaveformKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.bandwidth_hz <= 0:
            raise ConfigError(f"bandwidth must be > 0, got {self.bandwidth_hz}")
        if self.chirp_duration_s <= 0:
            raise ConfigError(f"chirp duration must be > 0, got {self.chirp_duration_s}")
        if self.sample_rate_hz is None:
            object.__setattr__(
                self, "sample_rate_hz", default_sample_rate(kind, self.bandwidth_hz)
            )
        fs = self.sample_rate_hz
        min_fs = 2.0 * self.swept_bandwidth_hz
        if fs < min_fs * (1.0 - _GRID_TOL):
            raise ConfigError(
                f"fs={fs} Hz is below the complex-baseband bound {min_fs} Hz "
                f"(2x the widest instantaneous frequency of a {kind.value} waveform)"
            )
        n = fs * self.chirp_duration_s
        if abs(n - round(n)) > _GRID_TOL * max(1.0, n):
            raise ConfigError(
                f"fs*Tc must be an integer sample count, got {n!r} "
                f"(fs={fs}, Tc={self.chirp_duration_s})"
            )

    @property
    def slope(self) -> float:
        """Chirp rate alpha = B / Tc in Hz/s."""
        return self.bandwidth_hz / self.chirp_duration_s

    @property
    def effective_slope(self) -> float:
        """Slope of the beat-to-range mapping: alpha/2 for GENTLE, alpha otherwise."""
        if self.kind is WaveformKind.GENTLE:
            return self.slope / 2.0
        return self.slope

    @property
    def swept_bandwidth_hz(self) -> float:
        """Total frequency excursion of the waveform (2B for EXTENDED)."""
        if self.kind is WaveformKind.EXTENDED:
            return 2.0 * self.bandwidth_hz
        return self.bandwidth_hz

    @property
    def symbol_duration_s(self) -> float:
        """Two-chirp symbol duration Ts = 2 * Tc."""
        return 2.0 * self.chirp_duration_s

    @property
    def samples_per_chirp(self) -> int:
        return int(round(self.sample_rate_hz * self.chirp_duration_s))

    @property
    def num_samples(self) -> int:
        """Samples emitted by :func:`generate`: Ns = 2*Nc, or Nc for LINEAR."""
        if self.kind is WaveformKind.LINEAR:
            return self.samples_per_chirp
        return 2 * self.samples_per_chirp


@dataclass(frozen=True)
class ComplexSignal:
    """Uniformly sampled complex baseband signal.

    Attributes:
        samples: complex sample buffer
        sample_rate_hz: fs of the buffer
        t0: time of the first sample, seconds
        spec: the waveform spec that produced the signal, when known;
            carried through channel application so the beat stage can
            recover slope and duration.
    """

    samples: np.ndarray
    sample_rate_hz: float
    t0: float = 0.0
    spec: WaveformSpec | None = None

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("signal must hold at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal samples must be finite")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _triangle_phase(spec: WaveformSpec, t: np.ndarray, down: np.ndarray) -> np.ndarray:
    """Phase of the triangle waveform on the sample grid.

    Up ramp:   pi*alpha*t^2 + 2*pi*f0*t
    Down ramp: phase is continued from the up ramp's value at Tc and the
    instantaneous frequency mirrors from f0+B back down to f0:

        phi(t) = phi_up(Tc) + 2*pi*(f0+B)*(t-Tc) - pi*alpha*(t-Tc)^2
    """
    a = spec.slope
    f0 = spec.start_freq_hz
    B = spec.bandwidth_hz
    tc = spec.chirp_duration_s
    up = np.pi * a * t**2 + 2.0 * np.pi * f0 * t
    phi_tc = np.pi * a * tc**2 + 2.0 * np.pi * f0 * tc
    td = t - tc
    dn = phi_tc + 2.0 * np.pi * (f0 + B) * td - np.pi * a * td**2
    return np.where(down, dn, up)


def generate(spec: WaveformSpec) -> ComplexSignal:
    """Synthesize the unit-amplitude baseband waveform described by `spec`."""
    fs = spec.sample_rate_hz
    n = np.arange(spec.num_samples)
    t = n / fs
    a = spec.slope
    f0 = spec.start_freq_hz
    kind = spec.kind

    if kind in (WaveformKind.LINEAR, WaveformKind.EXTENDED):
        phase = np.pi * a * t**2 + 2.0 * np.pi * f0 * t
    elif kind is WaveformKind.GENTLE:
        phase = np.pi * (a / 2.0) * t**2 + 2.0 * np.pi * f0 * t
    elif kind is WaveformKind.SAWTOOTH:
        # Second chirp is an independent restart: local time, phase reset to 0.
        tloc = np.where(n < spec.samples_per_chirp, t, t - spec.chirp_duration_s)
        phase = np.pi * a * tloc**2 + 2.0 * np.pi * f0 * tloc
    else:
        phase = _triangle_phase(spec, t, n >= spec.samples_per_chirp)

    return ComplexSignal(np.exp(1j * phase), fs, 0.0, spec)


def spectrogram(
    sig: ComplexSignal,
    window_len: int | None = None,
    hop: int | None = None,
) -> np.ndarray:
    """Hann-windowed power spectrogram, one row per frame.

    Defaults: window_len = Nc/16 when the signal carries a spec (length/32
    otherwise), hop = window_len/2. Plotting aid only; no quantitative path
    uses it.

    Returns:
        (num_frames, window_len) array of squared-magnitude DFT values.
    """
    n = len(sig)
    if window_len is None:
        if sig.spec is not None:
            window_len = max(1, sig.spec.samples_per_chirp // 16)
        else:
            window_len = max(1, n // 32)
    if hop is None:
        hop = max(1, window_len // 2)
    if window_len < 1 or window_len > n:
        raise ValueError(
            f"window_len must satisfy 1 <= window_len <= {n}, got {window_len}"
        )
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")

    win = np.hanning(window_len)
    frames = (n - window_len) // hop + 1
    out = np.empty((frames, window_len), dtype=np.float64)
    for i in range(frames):
        frame = sig.samples[i * hop : i * hop + window_len] * win
        out[i] = np.abs(np.fft.fft(frame)) ** 2
    return out
