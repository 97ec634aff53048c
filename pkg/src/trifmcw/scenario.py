"""Scenario files: flat key=value text with repeated [tap] blocks.

Example::

    name = two_reflectors
    methods = triangle,sawtooth
    bandwidth = 8000
    chirp = 0.1
    # fs = 16000          optional, defaults to 2B (4B for extended)
    # speed = 343         optional propagation speed, m/s
    # one_way = false     optional, default round-trip ranging
    # threshold_db = -12  optional peak threshold
    # seed = 1            optional, for rayleigh gains

    [tap]
    delay_p = 48
    gain_re = 1
    gain_im = 0

    [tap]
    range_m = 0.55
    gain = rayleigh

Each tap names its position exactly one way (``delay_s`` seconds,
``delay_p`` delay-grid index p = 2*B*delay, or ``range_m`` meters) and its
gain either as ``gain_re``/``gain_im`` or as ``gain = rayleigh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import ChannelModel, ChannelTap, _SplitMix64, _standard_normal_pair
from .errors import ConfigError
from .spectrum import DEFAULT_THRESHOLD_DB, RangeMapping, SPEED_OF_SOUND_MPS
from .waveform import WaveformKind

__all__ = ["TapConfig", "ScenarioConfig", "parse_scenario", "build_channel"]

_TAP_POSITION_KEYS = ("delay_s", "delay_p", "range_m")


@dataclass
class TapConfig:
    delay_s: float | None = None
    delay_p: float | None = None
    range_m: float | None = None
    gain: complex | str = 1.0 + 0.0j  # complex value or the string "rayleigh"
    line: int = 0

    def resolve_delay(self, bandwidth_hz: float, mapping: RangeMapping) -> float:
        if self.delay_s is not None:
            return self.delay_s
        if self.delay_p is not None:
            return self.delay_p / (2.0 * bandwidth_hz)
        trips = 2.0 if mapping.round_trip else 1.0
        return trips * self.range_m / mapping.propagation_speed_mps


@dataclass
class ScenarioConfig:
    name: str
    bandwidth_hz: float
    chirp_duration_s: float
    methods: tuple[WaveformKind, ...] = (WaveformKind.TRIANGLE,)
    sample_rate_hz: float | None = None
    speed_mps: float = SPEED_OF_SOUND_MPS
    round_trip: bool = True
    threshold_db: float = DEFAULT_THRESHOLD_DB
    seed: int = 1
    taps: list[TapConfig] = field(default_factory=list)

    @property
    def mapping(self) -> RangeMapping:
        return RangeMapping(self.speed_mps, self.round_trip)


def _parse_bool(value: str, where: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {value!r}")


def _parse_float(value: str, where: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None


def parse_scenario(path) -> ScenarioConfig:
    """Parse a scenario file; errors carry file and line context."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    globals_: dict[str, tuple[str, int]] = {}
    taps: list[TapConfig] = []
    current_tap: dict[str, tuple[str, int]] | None = None
    tap_lines: list[int] = []

    def finish_tap():
        nonlocal current_tap
        if current_tap is None:
            return
        taps.append(_build_tap(path, current_tap, tap_lines[-1]))
        current_tap = None

    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[tap]":
            finish_tap()
            current_tap = {}
            tap_lines.append(lineno)
            continue
        if line.startswith("["):
            raise ConfigError(f"{path}:{lineno}: unknown block {line!r}")
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        target = current_tap if current_tap is not None else globals_
        if key in target:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        target[key] = (value, lineno)
    finish_tap()

    def take(key, default=None):
        if key in globals_:
            return globals_.pop(key)
        return (default, 0)

    name, _ = take("name", path.stem)
    bandwidth_raw, bw_line = take("bandwidth")
    chirp_raw, chirp_line = take("chirp")
    if bandwidth_raw is None:
        raise ConfigError(f"{path}: missing required key 'bandwidth'")
    if chirp_raw is None:
        raise ConfigError(f"{path}: missing required key 'chirp'")
    bandwidth = _parse_float(bandwidth_raw, f"{path}:{bw_line}")
    chirp = _parse_float(chirp_raw, f"{path}:{chirp_line}")

    methods_raw, methods_line = take("methods", "triangle")
    methods = []
    for token in methods_raw.split(","):
        token = token.strip().lower()
        try:
            methods.append(WaveformKind(token))
        except ValueError:
            known = ", ".join(k.value for k in WaveformKind)
            raise ConfigError(
                f"{path}:{methods_line}: unknown method {token!r} (known: {known})"
            ) from None

    fs_raw, fs_line = take("fs")
    fs = _parse_float(fs_raw, f"{path}:{fs_line}") if fs_raw is not None else None
    speed_raw, speed_line = take("speed", str(SPEED_OF_SOUND_MPS))
    speed = _parse_float(speed_raw, f"{path}:{speed_line}")
    one_way_raw, one_way_line = take("one_way", "false")
    one_way = _parse_bool(one_way_raw, f"{path}:{one_way_line}")
    thr_raw, thr_line = take("threshold_db", str(DEFAULT_THRESHOLD_DB))
    threshold = _parse_float(thr_raw, f"{path}:{thr_line}")
    if threshold > 0:
        raise ConfigError(f"{path}:{thr_line}: threshold_db must be <= 0")
    seed_raw, seed_line = take("seed", "1")
    try:
        seed = int(seed_raw)
    except ValueError:
        raise ConfigError(f"{path}:{seed_line}: seed must be an integer") from None
    if seed < 0:
        raise ConfigError(f"{path}:{seed_line}: seed must be non-negative")

    if globals_:
        key, (_, lineno) = next(iter(globals_.items()))
        raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")

    return ScenarioConfig(
        name=name,
        bandwidth_hz=bandwidth,
        chirp_duration_s=chirp,
        methods=tuple(methods),
        sample_rate_hz=fs,
        speed_mps=speed,
        round_trip=not one_way,
        threshold_db=threshold,
        seed=seed,
        taps=taps,
    )


def _build_tap(path: Path, fields: dict, block_line: int) -> TapConfig:
    where = f"{path}:{block_line}"
    position = [k for k in _TAP_POSITION_KEYS if k in fields]
    if len(position) != 1:
        raise ConfigError(
            f"{where}: each [tap] needs exactly one of {_TAP_POSITION_KEYS}, "
            f"got {position or 'none'}"
        )
    key = position[0]
    value_raw, value_line = fields.pop(key)
    value = _parse_float(value_raw, f"{path}:{value_line}")
    if value < 0:
        raise ConfigError(f"{path}:{value_line}: {key} must be non-negative")

    gain: complex | str
    if "gain" in fields:
        gain_raw, gain_line = fields.pop("gain")
        if gain_raw.lower() != "rayleigh":
            raise ConfigError(
                f"{path}:{gain_line}: gain must be 'rayleigh' "
                f"(use gain_re/gain_im for fixed gains)"
            )
        if "gain_re" in fields or "gain_im" in fields:
            raise ConfigError(f"{where}: gain=rayleigh excludes gain_re/gain_im")
        gain = "rayleigh"
    else:
        re_raw, _ = fields.pop("gain_re", ("1", 0))
        im_raw, _ = fields.pop("gain_im", ("0", 0))
        gain = complex(_parse_float(re_raw, where), _parse_float(im_raw, where))
        if gain == 0:
            raise ConfigError(f"{where}: tap gain must be nonzero")
    if fields:
        bad, (_, lineno) = next(iter(fields.items()))
        raise ConfigError(f"{path}:{lineno}: unknown tap key {bad!r}")

    tap = TapConfig(gain=gain, line=block_line)
    setattr(tap, key, value)
    return tap


def build_channel(cfg: ScenarioConfig) -> ChannelModel:
    """Materialize the channel: resolve delays and draw any rayleigh gains.

    Rayleigh gains are drawn from one seeded stream in tap order (after
    sorting by delay), so a scenario is reproducible from its seed.
    """
    resolved = sorted(
        ((tap.resolve_delay(cfg.bandwidth_hz, cfg.mapping), tap) for tap in cfg.taps),
        key=lambda item: item[0],
    )
    rng = _SplitMix64(cfg.seed)
    taps = []
    for delay, tap in resolved:
        if tap.gain == "rayleigh":
            z_re, z_im = _standard_normal_pair(rng)
            gain = complex(z_re, z_im) / math.sqrt(2.0)
        else:
            gain = tap.gain
        taps.append(ChannelTap(delay, gain))
    return ChannelModel(tuple(taps), seed=cfg.seed)
