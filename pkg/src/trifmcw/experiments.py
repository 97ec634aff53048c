"""Scripted scenario runners emitting machine-checkable reports.

Each runner rebuilds one simulation scenario at desk scale, runs the
waveform/channel/beat/profile pipeline for every method under comparison,
and records assertion outcomes (with measured value and bound) keyed by the
acceptance-criterion id they implement. Runners are deterministic given a
seed; the CLI forwards their reports to disk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio
from .beat import BeatSignal, mix
from .channel import ChannelModel, ChannelTap, apply_channel, rayleigh_taps
from .scenario import ScenarioConfig, build_channel
from .spectrum import (
    PeakSet,
    RangeMapping,
    RangeProfile,
    detect_peaks,
    range_profile,
    sntr,
)
from .waveform import WaveformKind, WaveformSpec, generate

__all__ = [
    "AssertionResult",
    "MethodResult",
    "ExperimentReport",
    "run_four_path",
    "run_sntr_sweep",
    "run_non_integer",
    "run_spacing_sweep",
    "run_custom",
    "run_named_scenario",
    "write_outputs",
    "BUILTIN_SCENARIOS",
]

# Desk-scale constants shared by the built-in scenarios: an 8 kHz acoustic
# sweep, 0.1 s per chirp, propagation at the speed of sound, round-trip
# ranging. With fs = 2B the delay quantum 1/(2B) is exactly one sample.
DESK_BANDWIDTH_HZ = 8_000.0
DESK_CHIRP_S = 0.1
DESK_MAPPING = RangeMapping(propagation_speed_mps=343.0, round_trip=True)

FOUR_PATH_BINS = (48, 50, 56, 57)

# Threshold for structure-count comparisons between methods. The waveforms
# that fail to double the resolution scatter part of a target's energy into
# split/straddle lobes 4..8 dB below their dominant structure; counted at
# the default -12 dB listing threshold those artifacts would register as
# extra "paths". The comparison counts therefore use -3 dB, which keeps
# every dominant structure and drops the artifacts for all methods alike.
COMPARISON_THRESHOLD_DB = -3.0

ALT_PROCESSING_PLACEHOLDER = (
    "not implemented: the alternative triangle processing method has no "
    "reproducible published algorithm; no numbers are fabricated for it"
)


@dataclass(frozen=True)
class AssertionResult:
    ac_id: str
    description: str
    passed: bool
    measured: str
    bound: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.ac_id} {self.description} | "
            f"measured={self.measured} bound={self.bound}"
        )


@dataclass
class MethodResult:
    method: str
    beat: BeatSignal | None = None
    profile: RangeProfile | None = None
    peaks: PeakSet | None = None
    metrics: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    scenario: str
    constants: dict
    ground_truth_ranges_m: tuple[float, ...]
    methods: list[MethodResult] = field(default_factory=list)
    assertions: list[AssertionResult] = field(default_factory=list)
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    degenerate: bool = False

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)


def _pipeline(
    spec: WaveformSpec, channel: ChannelModel, mapping: RangeMapping
) -> tuple[BeatSignal, RangeProfile]:
    tx = generate(spec)
    rx = apply_channel(tx, channel)
    beat = mix(tx, rx)
    return beat, range_profile(beat, mapping)


def _unit_channel(delays) -> ChannelModel:
    return ChannelModel(tuple(ChannelTap(d, 1.0 + 0.0j) for d in delays))


def _real_clamped_gain(gain: complex, lo: float, hi: float) -> complex:
    """Real gain from a drawn complex one: clamped magnitude, positive sign.

    The real-part beat spectrum is only phase-coherent for real path gains;
    the quadrature component of a complex gain flips the real part's sign
    between the two chirp halves and splits the target's energy into odd
    sidebands. Baseband acoustic echoes have real reflection gains, which
    is what the random-gain variant models: Rayleigh-distributed magnitudes
    clamped so no path drops below the detection threshold.
    """
    return complex(min(max(abs(gain), lo), hi), 0.0)


def _spec_trio(fs: float | None = None):
    kinds = (WaveformKind.TRIANGLE, WaveformKind.SAWTOOTH, WaveformKind.GENTLE)
    return {
        kind.value: WaveformSpec(kind, DESK_BANDWIDTH_HZ, DESK_CHIRP_S, 0.0, fs)
        for kind in kinds
    }


def run_four_path(seed: int = 1, mapping: RangeMapping | None = None) -> ExperimentReport:
    """Four close reflections; only the triangle pipeline resolves them all.

    Taps sit on the delay grid at p = 48, 50, 56, 57 (the last two only one
    doubled-resolution bin apart). A deterministic unit-gain variant and a
    seeded random-gain variant (magnitudes clamped to [0.5, 1.5] so no path
    vanishes) are both run through the triangle, sawtooth and gentle
    pipelines.
    """
    mapping = mapping or DESK_MAPPING
    B = DESK_BANDWIDTH_HZ
    delays = [p / (2.0 * B) for p in FOUR_PATH_BINS]
    specs = _spec_trio()
    truth = tuple(_range_of_p(p, B, mapping) for p in FOUR_PATH_BINS)

    det_channel = _unit_channel(delays)
    ray_raw = rayleigh_taps(delays, seed)
    ray_channel = ChannelModel(
        tuple(
            ChannelTap(t.delay_s, _real_clamped_gain(t.gain, 0.5, 1.5))
            for t in ray_raw.taps
        ),
        seed=seed,
    )

    report = ExperimentReport(
        scenario="four_path",
        constants={
            "bandwidth_hz": B,
            "chirp_s": DESK_CHIRP_S,
            "sample_rate_hz": specs["triangle"].sample_rate_hz,
            "speed_mps": mapping.propagation_speed_mps,
            "round_trip": mapping.round_trip,
            "seed": seed,
            "true_bins": list(FOUR_PATH_BINS),
        },
        ground_truth_ranges_m=truth,
        notes={"alt_triangle_processing": ALT_PROCESSING_PLACEHOLDER},
    )

    results: dict[tuple[str, str], MethodResult] = {}
    for variant, channel in (("det", det_channel), ("rayleigh", ray_channel)):
        for name, spec in specs.items():
            beat, profile = _pipeline(spec, channel, mapping)
            peaks = detect_peaks(profile)
            compare = detect_peaks(profile, COMPARISON_THRESHOLD_DB)
            result = MethodResult(
                method=f"{name}_{variant}",
                beat=beat,
                profile=profile,
                peaks=peaks,
                metrics={
                    "peak_bins": list(peaks.bins),
                    "peak_ranges_m": [p.range_m for p in peaks],
                    "peak_count": len(peaks),
                    "dominant_bins": list(compare.bins),
                    "dominant_count": len(compare),
                },
            )
            results[(variant, name)] = result
            report.methods.append(result)

    def merged_pair(result: MethodResult) -> int:
        """Dominant peaks falling inside the window around the close pair."""
        lo = truth[2] - 0.5 * result.profile.bin_spacing_m
        hi = truth[3] + 0.5 * result.profile.bin_spacing_m
        compare = detect_peaks(result.profile, COMPARISON_THRESHOLD_DB)
        return sum(1 for pk in compare if lo <= pk.range_m <= hi)

    tri_det = results[("det", "triangle")]
    report.assertions.append(
        AssertionResult(
            "AC-1",
            "deterministic triangle resolves all four paths at their bins",
            tri_det.peaks.bins == FOUR_PATH_BINS,
            str(list(tri_det.peaks.bins)),
            str(list(FOUR_PATH_BINS)),
        )
    )
    tri_ray = results[("rayleigh", "triangle")]
    report.assertions.append(
        AssertionResult(
            "AC-1",
            "random-gain triangle resolves all four paths at their bins",
            tri_ray.peaks.bins == FOUR_PATH_BINS,
            str(list(tri_ray.peaks.bins)),
            str(list(FOUR_PATH_BINS)),
        )
    )
    for name in ("sawtooth", "gentle"):
        result = results[("det", name)]
        count = result.metrics["dominant_count"]
        report.assertions.append(
            AssertionResult(
                "AC-1",
                f"deterministic {name} detects at most 3 dominant structures",
                count <= 3,
                str(count),
                "<= 3",
            )
        )
        pair = merged_pair(result)
        report.assertions.append(
            AssertionResult(
                "AC-1",
                f"deterministic {name} merges the two closest paths",
                pair <= 1,
                f"{pair} peak(s) within the close-pair window",
                "<= 1",
            )
        )
    return report


def _range_of_p(p: float, bandwidth_hz: float, mapping: RangeMapping) -> float:
    tau = p / (2.0 * bandwidth_hz)
    trips = 2.0 if mapping.round_trip else 1.0
    return mapping.propagation_speed_mps * tau / trips


def run_sntr_sweep(
    points: int = 40, mapping: RangeMapping | None = None
) -> ExperimentReport:
    """Single-path delay sweep recording the transition-noise ratio.

    The delay runs over the integer-p grid from one sample up to 45% of the
    chirp; each row is an independent single-tap run. The floor and
    monotonicity checks evaluate the 1%..40% span.
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    mapping = mapping or DESK_MAPPING
    spec = WaveformSpec(WaveformKind.TRIANGLE, DESK_BANDWIDTH_HZ, DESK_CHIRP_S)
    n_c = spec.samples_per_chirp
    p_values = sorted(set(int(round(p)) for p in np.linspace(1, 0.45 * n_c, points)))

    rows = []
    for p in p_values:
        tau = p / (2.0 * DESK_BANDWIDTH_HZ)
        _, profile = _pipeline(spec, _unit_channel([tau]), mapping)
        rows.append((p / n_c, sntr(profile, p)))

    report = ExperimentReport(
        scenario="sntr_sweep",
        constants={
            "bandwidth_hz": DESK_BANDWIDTH_HZ,
            "chirp_s": DESK_CHIRP_S,
            "sample_rate_hz": spec.sample_rate_hz,
            "points": len(rows),
        },
        ground_truth_ranges_m=(),
        tables={"sntr_sweep": (("tau_over_tc", "sntr_db"), rows)},
    )

    window = [(x, s) for x, s in rows if 0.01 <= x <= 0.40]
    floor = min(s for _, s in window)
    report.assertions.append(
        AssertionResult(
            "AC-5",
            "transition-noise ratio stays above the detectability floor",
            floor >= -7.4,
            f"min {floor:.2f} dB over tau/Tc in [0.01, 0.40]",
            ">= -7.4 dB",
        )
    )
    worst_rise = max(
        (b - a for (_, a), (_, b) in zip(window, window[1:])), default=0.0
    )
    report.assertions.append(
        AssertionResult(
            "AC-5",
            "ratio is monotone non-increasing within 1 dB ripple",
            worst_rise <= 1.0,
            f"largest rise {worst_rise:.2f} dB between consecutive points",
            "<= 1 dB",
        )
    )
    return report


NON_INTEGER_RANGES_M = (0.059, 0.082)
NON_INTEGER_FS = 171_500.0  # smallest rate putting both echo delays on the grid


def run_non_integer(seed: int = 1, mapping: RangeMapping | None = None) -> ExperimentReport:
    """Two reflections between delay-grid points; off-grid in p, on-grid in fs.

    Ranges of 5.9 cm and 8.2 cm correspond to p = 5.50 and p = 7.65: the
    phase-coherence condition is not met exactly, so range accuracy may
    degrade, but the triangle and extended pipelines must still separate
    the two paths. The conventional single-chirp pipeline must not.
    """
    mapping = mapping or DESK_MAPPING
    trips = 2.0 if mapping.round_trip else 1.0
    delays = [trips * r / mapping.propagation_speed_mps for r in NON_INTEGER_RANGES_M]
    channel = _unit_channel(delays)
    kinds = (WaveformKind.LINEAR, WaveformKind.EXTENDED, WaveformKind.TRIANGLE)

    report = ExperimentReport(
        scenario="non_integer",
        constants={
            "bandwidth_hz": DESK_BANDWIDTH_HZ,
            "chirp_s": DESK_CHIRP_S,
            "sample_rate_hz": NON_INTEGER_FS,
            "speed_mps": mapping.propagation_speed_mps,
            "round_trip": mapping.round_trip,
            "seed": seed,
            "true_p": [2.0 * DESK_BANDWIDTH_HZ * d for d in delays],
        },
        ground_truth_ranges_m=tuple(NON_INTEGER_RANGES_M),
    )

    counts: dict[str, int] = {}
    errors: dict[str, float] = {}
    for kind in kinds:
        spec = WaveformSpec(kind, DESK_BANDWIDTH_HZ, DESK_CHIRP_S, 0.0, NON_INTEGER_FS)
        beat, profile = _pipeline(spec, channel, mapping)
        peaks = detect_peaks(profile, COMPARISON_THRESHOLD_DB)
        per_peak_error = [
            min(abs(pk.range_m - r) for r in NON_INTEGER_RANGES_M) for pk in peaks
        ]
        counts[kind.value] = len(peaks)
        errors[kind.value] = max(per_peak_error, default=math.inf)
        report.methods.append(
            MethodResult(
                method=kind.value,
                beat=beat,
                profile=profile,
                peaks=peaks,
                metrics={
                    "peak_bins": list(peaks.bins),
                    "peak_ranges_m": [pk.range_m for pk in peaks],
                    "peak_count": len(peaks),
                    "per_peak_range_error_m": per_peak_error,
                    "bin_spacing_m": profile.bin_spacing_m,
                },
            )
        )

    spacing = {m.method: m.profile.bin_spacing_m for m in report.methods}
    for name in ("triangle", "extended"):
        report.assertions.append(
            AssertionResult(
                "AC-7",
                f"{name} separates the two off-grid paths",
                counts[name] == 2,
                f"{counts[name]} peaks",
                "exactly 2",
            )
        )
        report.assertions.append(
            AssertionResult(
                "AC-7",
                f"{name} peak ranges err by at most one bin",
                errors[name] <= spacing[name],
                f"max error {errors[name] * 100:.3f} cm",
                f"<= {spacing[name] * 100:.3f} cm",
            )
        )
    linear_fails = counts["linear"] < 2 or errors["linear"] > spacing["linear"]
    report.assertions.append(
        AssertionResult(
            "AC-7",
            "single-chirp baseline reports fewer or displaced peaks",
            linear_fails,
            f"{counts['linear']} peaks, max error {errors['linear'] * 100:.3f} cm",
            f"< 2 peaks or error > {spacing['linear'] * 100:.3f} cm",
        )
    )
    return report


SPACING_FS = 34_300.0  # puts every whole-centimeter round-trip delay on the grid


def run_spacing_sweep(mapping: RangeMapping | None = None) -> ExperimentReport:
    """Two reflectors closing from 10 cm apart to co-located, 1 cm steps.

    One reflector is fixed at 40 cm; the other walks in from 50 cm. Each
    method estimates the spacing as the distance between its two strongest
    detected peaks at the default listing threshold, so when a method can
    no longer resolve the pair, its second-strongest structure (a sidelobe)
    is misread as the second reflector -- the failure mode being measured.
    With fewer than two peaks the estimate is zero and flagged degenerate.

    The mean absolute error over the three tightest positions that still
    have two distinct reflectors (3, 2 and 1 cm) must order
    triangle < sawtooth < gentle; the extended sweep rides along as the
    oracle and is reported, not ranked. The co-located position stays in
    the table with its degeneracy flags but outside the error statistic.
    """
    mapping = mapping or DESK_MAPPING
    trips = 2.0 if mapping.round_trip else 1.0
    c = mapping.propagation_speed_mps
    kinds = (
        WaveformKind.TRIANGLE,
        WaveformKind.SAWTOOTH,
        WaveformKind.GENTLE,
        WaveformKind.EXTENDED,
    )
    specs = {
        kind.value: WaveformSpec(kind, DESK_BANDWIDTH_HZ, DESK_CHIRP_S, 0.0, SPACING_FS)
        for kind in kinds
    }
    r_fixed = 0.40
    positions = [round(0.50 - 0.01 * i, 4) for i in range(11)]

    rows = []
    errors: dict[str, dict[float, float]] = {kind.value: {} for kind in kinds}
    for r_moving in positions:
        true_spacing = abs(r_moving - r_fixed)
        if r_moving == r_fixed:
            # Co-located reflectors superpose into one tap of doubled gain.
            channel = ChannelModel((ChannelTap(trips * r_fixed / c, 2.0 + 0.0j),))
        else:
            channel = _unit_channel(
                [trips * r_fixed / c, trips * r_moving / c]
            )
        row: list = [true_spacing]
        degenerate: list[str] = []
        for kind in kinds:
            beat, profile = _pipeline(specs[kind.value], channel, mapping)
            peaks = detect_peaks(profile)
            if len(peaks) >= 2:
                strongest = sorted(peaks, key=lambda pk: pk.power, reverse=True)[:2]
                est = abs(strongest[0].range_m - strongest[1].range_m)
            else:
                est = 0.0
                degenerate.append(kind.value)
            row.append(est)
            errors[kind.value][round(true_spacing, 4)] = abs(est - true_spacing)
        row.append(";".join(degenerate) if degenerate else "-")
        rows.append(tuple(row))

    header = ("true_spacing_m",) + tuple(f"est_{k.value}_m" for k in kinds) + (
        "degenerate_methods",
    )
    tightest = [0.03, 0.02, 0.01]
    mean_err = {
        name: float(np.mean([errs[round(s, 4)] for s in tightest]))
        for name, errs in errors.items()
    }

    report = ExperimentReport(
        scenario="spacing_sweep",
        constants={
            "bandwidth_hz": DESK_BANDWIDTH_HZ,
            "chirp_s": DESK_CHIRP_S,
            "sample_rate_hz": SPACING_FS,
            "fixed_range_m": r_fixed,
            "positions": positions,
        },
        ground_truth_ranges_m=(r_fixed,),
        tables={"spacing_sweep": (header, rows)},
        notes={
            "alt_triangle_processing": ALT_PROCESSING_PLACEHOLDER,
            "mean_abs_error_tightest_m": mean_err,
        },
    )
    ordering_ok = (
        mean_err["triangle"] < mean_err["sawtooth"] < mean_err["gentle"]
    )
    report.assertions.append(
        AssertionResult(
            "AC-9",
            "tightest-spacing error ordering triangle < sawtooth < gentle",
            ordering_ok,
            ", ".join(
                f"{name}={mean_err[name] * 100:.3f} cm"
                for name in ("triangle", "sawtooth", "gentle", "extended")
            ),
            "triangle < sawtooth < gentle (mean abs error, tightest "
            "two-reflector spacings 3/2/1 cm)",
        )
    )
    return report


def run_custom(cfg: ScenarioConfig) -> ExperimentReport:
    """Run a scenario file: each configured method over the configured taps."""
    mapping = cfg.mapping
    channel = build_channel(cfg)
    report = ExperimentReport(
        scenario=cfg.name,
        constants={
            "bandwidth_hz": cfg.bandwidth_hz,
            "chirp_s": cfg.chirp_duration_s,
            "speed_mps": cfg.speed_mps,
            "round_trip": cfg.round_trip,
            "threshold_db": cfg.threshold_db,
            "seed": cfg.seed,
        },
        ground_truth_ranges_m=tuple(
            mapping.propagation_speed_mps * tap.delay_s / (2.0 if mapping.round_trip else 1.0)
            for tap in channel.taps
        ),
    )
    if len(channel) == 0:
        report.degenerate = True
        report.assertions.append(
            AssertionResult(
                "INFO",
                "degenerate input: scenario defines no taps",
                True,
                "0 taps, 0 peaks",
                "n/a",
            )
        )
        return report
    for kind in cfg.methods:
        spec = WaveformSpec(
            kind, cfg.bandwidth_hz, cfg.chirp_duration_s, 0.0, cfg.sample_rate_hz
        )
        beat, profile = _pipeline(spec, channel, mapping)
        peaks = detect_peaks(profile, cfg.threshold_db)
        report.methods.append(
            MethodResult(
                method=kind.value,
                beat=beat,
                profile=profile,
                peaks=peaks,
                metrics={
                    "peak_bins": list(peaks.bins),
                    "peak_ranges_m": [pk.range_m for pk in peaks],
                    "peak_count": len(peaks),
                },
            )
        )
    return report


BUILTIN_SCENARIOS = {
    "four_path": run_four_path,
    "sntr_sweep": run_sntr_sweep,
    "non_integer": run_non_integer,
    "spacing_sweep": run_spacing_sweep,
}


def run_named_scenario(name: str, seed: int = 1, mapping: RangeMapping | None = None):
    """Dispatch a built-in scenario by name."""
    runner = BUILTIN_SCENARIOS[name]
    if name in ("four_path", "non_integer"):
        return runner(seed=seed, mapping=mapping)
    if name == "sntr_sweep":
        return runner(mapping=mapping)
    return runner(mapping=mapping)


def _spec_meta(spec: WaveformSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "bandwidth": spec.bandwidth_hz,
        "chirp": spec.chirp_duration_s,
        "f0": spec.start_freq_hz,
        "fs": spec.sample_rate_hz,
    }


def write_outputs(report: ExperimentReport, out_dir) -> None:
    """Write profiles, beats, tables, metrics.json and report.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for result in report.methods:
        if result.profile is not None:
            csvio.write_profile_csv(out / f"profile_{result.method}.csv", result.profile)
        if result.beat is not None:
            csvio.write_signal_csv(
                out / f"beat_{result.method}.csv",
                result.beat.samples,
                result.beat.sample_rate_hz,
                _spec_meta(result.beat.spec),
            )
    for name, (header, rows) in report.tables.items():
        csvio.write_table_csv(out / f"{name}.csv", header, rows)

    metrics = {
        "scenario": report.scenario,
        "constants": report.constants,
        "ground_truth_ranges_m": list(report.ground_truth_ranges_m),
        "degenerate": report.degenerate,
        "methods": {m.method: m.metrics for m in report.methods},
        "assertions": [
            {
                "ac_id": a.ac_id,
                "description": a.description,
                "passed": a.passed,
                "measured": a.measured,
                "bound": a.bound,
            }
            for a in report.assertions
        ],
        "notes": report.notes,
        "result": "PASS" if report.passed else "FAIL",
    }
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")

    lines = [f"scenario: {report.scenario}"]
    for key, value in report.constants.items():
        lines.append(f"  {key} = {value}")
    if report.ground_truth_ranges_m:
        truth = " ".join(csvio.fmt(r) for r in report.ground_truth_ranges_m)
        lines.append(f"ground truth ranges (m): {truth}")
    if report.degenerate:
        lines.append("DEGENERATE input: no propagation paths defined")
    for note, text in report.notes.items():
        lines.append(f"note {note}: {text}")
    for assertion in report.assertions:
        lines.append(assertion.line())
    lines.append(f"RESULT: {'PASS' if report.passed else 'FAIL'}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
