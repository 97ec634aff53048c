"""Beat-signal derivation, the closed-form three-segment oracle, and the
phase-consistency check for the triangle waveform.

Mixing the received signal against the conjugate transmit produces, for a
triangle waveform and a single path delay tau (f0 = 0), three segments:

    (tau,      Tc]      exp(j*pi*(-2*a*tau*t + a*tau^2))
    (Tc,       Tc+tau]  exp(j*pi*(2*a*t^2 - (4B + 2*a*tau)*t + a*tau^2 + 2*B*Tc))
    (Tc+tau,   Ts]      exp(j*pi*(2*a*tau*t - 4*B*tau - a*tau^2))

with a = B/Tc. The transition-segment constant ``+2*B*Tc`` follows from
multiplying the conjugate phase-continuous down ramp with the delayed up
ramp; the oracle-equivalence tests pin it against the mixed product.

The first and third segments hold constant frequencies -a*tau and +a*tau.
When tau = p/(2B) with integer p, the third segment is the conjugate of the
first segment's extension, so the real part of the beat runs phase-coherent
across the whole symbol: that is what doubles the usable measurement span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import ComplexSignal, WaveformKind, WaveformSpec

__all__ = [
    "BeatSignal",
    "Segment",
    "BeatSegments",
    "PhaseConsistency",
    "beat_segments",
    "mix",
    "analytic_beat",
    "reference_beat",
    "phase_consistency",
    "wrap_to_pi",
]

# Slack, in samples, when assigning grid points to segment boundaries.
_EDGE_TOL = 1e-9


def wrap_to_pi(angle):
    """Wrap angle(s) to (-pi, pi]."""
    w = np.mod(angle, 2.0 * np.pi)
    if np.ndim(w):
        return np.where(w > np.pi, w - 2.0 * np.pi, w)
    return float(w - 2.0 * np.pi) if w > np.pi else float(w)


@dataclass(frozen=True)
class BeatSignal:
    """Conjugate-mixed beat samples plus the transmit spec they came from."""

    samples: np.ndarray
    sample_rate_hz: float
    spec: WaveformSpec

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        if not np.all(np.isfinite(arr)):
            raise ValueError("beat samples must be finite")
        if arr.size != self.spec.num_samples:
            raise ValueError(
                f"beat length {arr.size} does not match the spec's "
                f"{self.spec.num_samples} samples"
            )
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class Segment:
    """One beat segment: (t_start, t_end] in time, [n_start, n_stop) on the grid."""

    t_start: float
    t_end: float
    n_start: int
    n_stop: int
    frequency_hz: float | None
    chirp_rate_hz_per_s: float | None
    phase_offset_rad: float


@dataclass(frozen=True)
class BeatSegments:
    """The constant-frequency, transition and mirrored constant segments."""

    seg1: Segment
    seg2: Segment
    seg3: Segment


def _segment_edges(spec: WaveformSpec, tau: float) -> tuple[int, int, int, int]:
    """Grid indices of the zero/seg1, seg1/seg2 and seg2/seg3 boundaries.

    A sample exactly on a boundary belongs to the later segment's closed
    start; the comparison carries a small slack so delays specified as
    rational numbers of seconds hit the intended bin.
    """
    fs = spec.sample_rate_hz
    d = tau * fs
    n_c = spec.samples_per_chirp
    n_s = 2 * n_c
    start1 = int(np.ceil(d - _EDGE_TOL))
    start3 = n_c + start1
    return start1, n_c, start3, n_s


def beat_segments(spec: WaveformSpec, tau: float) -> BeatSegments:
    """Describe the three segments of the triangle beat for delay `tau`."""
    _check_triangle_oracle_args(spec, tau, require_f0_zero=False)
    a = spec.slope
    B = spec.bandwidth_hz
    tc = spec.chirp_duration_s
    ts = spec.symbol_duration_s
    start1, start2, start3, stop = _segment_edges(spec, tau)
    seg1 = Segment(tau, tc, start1, start2, -a * tau, None, np.pi * a * tau**2)
    seg2 = Segment(
        tc, tc + tau, start2, start3, None, 2.0 * a,
        np.pi * (a * tau**2 + 2.0 * B * tc),
    )
    seg3 = Segment(
        tc + tau, ts, start3, stop, a * tau, None,
        -np.pi * (4.0 * B * tau + a * tau**2),
    )
    return BeatSegments(seg1, seg2, seg3)


def mix(tx: ComplexSignal, rx: ComplexSignal) -> BeatSignal:
    """Beat signal conj(tx[n]) * rx[n]; no normalization."""
    if len(tx) != len(rx):
        raise ValueError(f"length mismatch: tx has {len(tx)}, rx has {len(rx)}")
    if tx.sample_rate_hz != rx.sample_rate_hz:
        raise ValueError(
            f"sample rate mismatch: tx {tx.sample_rate_hz}, rx {rx.sample_rate_hz}"
        )
    if tx.spec is None:
        raise ValueError("transmit signal carries no waveform spec")
    return BeatSignal(np.conj(tx.samples) * rx.samples, tx.sample_rate_hz, tx.spec)


def _check_triangle_oracle_args(spec, tau, require_f0_zero=True):
    if spec.kind is not WaveformKind.TRIANGLE:
        raise ValueError(f"oracle requires a triangle spec, got {spec.kind.value}")
    if require_f0_zero and spec.start_freq_hz != 0.0:
        raise ValueError(
            "the closed-form beat is only stated for start frequency 0"
        )
    if not 0.0 <= tau < spec.chirp_duration_s:
        raise ValueError(
            f"tau must satisfy 0 <= tau < Tc={spec.chirp_duration_s}, got {tau}"
        )


def analytic_beat(spec: WaveformSpec, tau: float) -> BeatSignal:
    """Closed-form triangle beat for a unit-gain path at delay `tau`.

    Evaluates the three-segment expression on the sample grid, zero before
    the echo arrives. Matches ``mix(generate(spec), apply_channel(...))``
    samplewise for grid-aligned tau.
    """
    _check_triangle_oracle_args(spec, tau)
    a = spec.slope
    B = spec.bandwidth_hz
    tc = spec.chirp_duration_s
    fs = spec.sample_rate_hz
    n = np.arange(spec.num_samples)
    t = n / fs
    start1, start2, start3, _ = _segment_edges(spec, tau)

    phase = np.zeros(n.size, dtype=np.float64)
    s1 = slice(start1, start2)
    s2 = slice(start2, start3)
    s3 = slice(start3, None)
    phase[s1] = np.pi * (-2.0 * a * tau * t[s1] + a * tau**2)
    phase[s2] = np.pi * (
        2.0 * a * t[s2] ** 2
        - (4.0 * B + 2.0 * a * tau) * t[s2]
        + a * tau**2
        + 2.0 * B * tc
    )
    phase[s3] = np.pi * (2.0 * a * tau * t[s3] - 4.0 * B * tau - a * tau**2)

    out = np.exp(1j * phase)
    out[:start1] = 0.0
    return BeatSignal(out, fs, spec)


def reference_beat(spec: WaveformSpec, tau: float) -> BeatSignal:
    """Single-tone beat of the doubled-bandwidth extended sweep.

    The tone sits at -alpha*tau with phase offset pi*alpha*tau^2 (minus
    2*pi*f0*tau for nonzero start frequency), spans the full two-chirp
    window after the echo arrives, and is zero before. This is the oracle
    the triangle beat's real part is measured against.
    """
    _check_triangle_oracle_args(spec, tau, require_f0_zero=False)
    a = spec.slope
    fs = spec.sample_rate_hz
    n_s = 2 * spec.samples_per_chirp
    t = np.arange(n_s) / fs
    start1, _, _, _ = _segment_edges(spec, tau)
    # written as the first-segment expression so the two agree bit-for-bit
    phase = np.pi * (-2.0 * a * tau * t + a * tau**2) - (
        2.0 * np.pi * spec.start_freq_hz * tau
    )
    out = np.exp(1j * phase)
    out[:start1] = 0.0
    return BeatSignal(out, fs, spec)


@dataclass(frozen=True)
class PhaseConsistency:
    """Outcome of the segment-three phase alignment check."""

    phi_seg3_start: float
    phi_extended: float
    mismatch: float
    consistent: bool


def phase_consistency(
    spec: WaveformSpec, tau: float, tolerance: float = 1e-6
) -> PhaseConsistency:
    """Compare the third segment's start phase against the extended tone.

    phi_seg3_start = pi*(a*tau^2 - 2*B*tau) is the beat phase just after
    Tc+tau; phi_extended = pi*(-a*tau^2 - 2*B*tau) is where the first
    segment's tone would have arrived at the same instant. The real parts
    line up when the two are negatives of each other, i.e. when the wrapped
    sum is zero -- which happens exactly at tau = p/(2B) with integer p.
    """
    _check_triangle_oracle_args(spec, tau, require_f0_zero=False)
    a = spec.slope
    B = spec.bandwidth_hz
    phi_seg3 = float(wrap_to_pi(np.pi * (a * tau**2 - 2.0 * B * tau)))
    phi_ext = float(wrap_to_pi(np.pi * (-a * tau**2 - 2.0 * B * tau)))
    mismatch = float(wrap_to_pi(phi_seg3 + phi_ext))
    return PhaseConsistency(phi_seg3, phi_ext, mismatch, abs(mismatch) < tolerance)
