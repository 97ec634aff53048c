"""Command line front end.

Subcommands::

    trifmcw waveform --kind triangle --bandwidth 8000 --chirp 0.1 [--fs ...]
    trifmcw simulate four_path [--seed N] [--out DIR]
    trifmcw simulate my_scenario.scn [--out DIR]
    trifmcw profile beat.csv [--out DIR] [--threshold-db -12]

Exit codes: 0 success (report PASS), 1 usage error, 2 configuration
invariant violated, 3 a report assertion FAILed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import csvio, experiments
from .beat import BeatSignal
from .errors import ConfigError
from .scenario import parse_scenario
from .spectrum import DEFAULT_THRESHOLD_DB, RangeMapping, detect_peaks, range_profile
from .waveform import WaveformKind, WaveformSpec, generate, spectrogram

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_FAIL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="trifmcw", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    wave = sub.add_parser("waveform", help="synthesize a waveform and its spectrogram")
    wave.add_argument("--kind", default="triangle",
                      choices=[k.value for k in WaveformKind])
    wave.add_argument("--bandwidth", type=float, required=True,
                      help="chirp bandwidth B in Hz")
    wave.add_argument("--chirp", type=float, required=True,
                      help="single-chirp duration Tc in seconds")
    wave.add_argument("--fs", type=float, default=None,
                      help="sample rate in Hz (default 2B, 4B for extended)")
    wave.add_argument("--f0", type=float, default=0.0,
                      help="baseband start frequency in Hz")
    wave.add_argument("--window-len", type=int, default=None,
                      help="spectrogram window length in samples")
    wave.add_argument("--hop", type=int, default=None,
                      help="spectrogram hop in samples")
    wave.add_argument("--out", default=".", help="output directory")
    wave.set_defaults(func=_cmd_waveform)

    sim = sub.add_parser("simulate", help="run a built-in or custom scenario")
    sim.add_argument("scenario",
                     help="four_path | sntr_sweep | non_integer | spacing_sweep "
                          "| path to a .scn file")
    sim.add_argument("--seed", type=int, default=None, help="random-gain seed")
    sim.add_argument("--speed", type=float, default=None,
                     help="propagation speed in m/s (default 343)")
    sim.add_argument("--one-way", action="store_true",
                     help="map range = c*tau instead of c*tau/2")
    sim.add_argument("--threshold-db", type=float, default=None,
                     help="peak threshold for custom scenarios (dB rel. max)")
    sim.add_argument("--fs", type=float, default=None,
                     help="sample-rate override for custom scenarios, Hz")
    sim.add_argument("--out", default=".", help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    prof = sub.add_parser("profile", help="range profile and peaks from a beat CSV")
    prof.add_argument("beat_csv", help="beat CSV written by this tool")
    prof.add_argument("--speed", type=float, default=None)
    prof.add_argument("--one-way", action="store_true")
    prof.add_argument("--threshold-db", type=float, default=DEFAULT_THRESHOLD_DB)
    prof.add_argument("--out", default=".", help="output directory")
    prof.set_defaults(func=_cmd_profile)
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_waveform(args) -> int:
    spec = WaveformSpec(
        WaveformKind(args.kind), args.bandwidth, args.chirp, args.f0, args.fs
    )
    sig = generate(spec)
    out = _out_dir(args)
    csvio.write_signal_csv(
        out / "waveform.csv",
        sig.samples,
        sig.sample_rate_hz,
        {
            "kind": spec.kind.value,
            "bandwidth": spec.bandwidth_hz,
            "chirp": spec.chirp_duration_s,
            "f0": spec.start_freq_hz,
            "fs": spec.sample_rate_hz,
        },
    )
    window_len = args.window_len
    hop = args.hop
    if window_len is None:
        window_len = max(1, spec.samples_per_chirp // 16)
    if hop is None:
        hop = max(1, window_len // 2)
    matrix = spectrogram(sig, window_len, hop)
    csvio.write_spectrogram_csv(
        out / "spectrogram.csv", matrix, sig.sample_rate_hz, hop
    )
    print(
        f"wrote {len(sig)} samples of {spec.kind.value} waveform "
        f"(fs={csvio.fmt(spec.sample_rate_hz)} Hz) to {out / 'waveform.csv'}"
    )
    return EXIT_OK


def _mapping_from(args) -> RangeMapping | None:
    if args.speed is None and not args.one_way:
        return None
    speed = args.speed if args.speed is not None else 343.0
    return RangeMapping(speed, not args.one_way)


def _cmd_simulate(args) -> int:
    mapping = _mapping_from(args)
    if args.scenario in experiments.BUILTIN_SCENARIOS:
        for flag, value in (("--threshold-db", args.threshold_db), ("--fs", args.fs)):
            if value is not None:
                raise _UsageError(
                    f"trifmcw simulate: {flag} applies to custom scenarios only; "
                    f"built-in scenarios pin it so their delay grids stay exact"
                )
        report = experiments.run_named_scenario(
            args.scenario, seed=args.seed if args.seed is not None else 1,
            mapping=mapping,
        )
    else:
        cfg = parse_scenario(args.scenario)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threshold_db is not None:
            if args.threshold_db > 0:
                raise ConfigError(
                    f"threshold_db must be <= 0 dB relative to the profile "
                    f"maximum, got {args.threshold_db}"
                )
            cfg.threshold_db = args.threshold_db
        if args.fs is not None:
            cfg.sample_rate_hz = args.fs
        if mapping is not None:
            cfg.speed_mps = mapping.propagation_speed_mps
            cfg.round_trip = mapping.round_trip
        report = experiments.run_custom(cfg)

    out = _out_dir(args)
    experiments.write_outputs(report, out)
    for assertion in report.assertions:
        print(assertion.line())
    print(f"RESULT: {'PASS' if report.passed else 'FAIL'} (outputs in {out})")
    return EXIT_OK if report.passed else EXIT_FAIL


_REQUIRED_BEAT_META = ("kind", "bandwidth", "chirp", "fs")


def _cmd_profile(args) -> int:
    samples, meta = csvio.read_signal_csv(args.beat_csv)
    missing = [key for key in _REQUIRED_BEAT_META if key not in meta]
    if missing:
        raise ConfigError(
            f"{args.beat_csv}: missing metadata {missing}; beat CSVs need "
            f"'# key=value' lines for {list(_REQUIRED_BEAT_META)}"
        )
    spec = WaveformSpec(
        WaveformKind(meta["kind"]),
        float(meta["bandwidth"]),
        float(meta["chirp"]),
        float(meta.get("f0", 0.0)),
        float(meta["fs"]),
    )
    beat = BeatSignal(samples, spec.sample_rate_hz, spec)
    mapping = _mapping_from(args) or RangeMapping()
    profile = range_profile(beat, mapping)
    peaks = detect_peaks(profile, args.threshold_db)
    out = _out_dir(args)
    csvio.write_profile_csv(out / "profile.csv", profile)
    csvio.write_peaks_csv(out / "peaks.csv", peaks)
    print(f"{len(peaks)} peak(s); wrote {out / 'profile.csv'} and {out / 'peaks.csv'}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
