"""CSV writers and readers shared by the library and the command line tool.

Displayed quantities (times, powers, ranges) are written with six
significant digits using locale-independent formatting. Sample values
(re/im columns) are written with 17 significant digits so a signal survives
a write/read cycle bit-for-bit and downstream profiles stay reproducible.
Metadata rides along as ``# key=value`` comment lines above the header.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError
from .spectrum import PeakSet, RangeProfile

__all__ = [
    "fmt",
    "write_signal_csv",
    "read_signal_csv",
    "write_profile_csv",
    "write_peaks_csv",
    "write_table_csv",
    "write_spectrogram_csv",
]


def fmt(x) -> str:
    """Six significant digits, locale independent."""
    return f"{float(x):.6g}"


def _fmt_exact(x) -> str:
    return f"{float(x):.17g}"


def write_signal_csv(path, samples: np.ndarray, sample_rate_hz: float, meta: dict) -> None:
    """Write complex samples as ``n,t,re,im`` with metadata comments."""
    lines = [f"# {key}={value}" for key, value in meta.items()]
    lines.append("n,t,re,im")
    for n, s in enumerate(samples):
        t = n / sample_rate_hz
        lines.append(f"{n},{fmt(t)},{_fmt_exact(s.real)},{_fmt_exact(s.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path) -> tuple[np.ndarray, dict]:
    """Read a signal CSV written by :func:`write_signal_csv`.

    Raises ConfigError naming the file and row on any malformed content.
    """
    path = Path(path)
    meta: dict[str, str] = {}
    values: list[complex] = []
    header_seen = False
    expected_n = 0
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != "n,t,re,im":
                raise ConfigError(
                    f"{path}:{lineno}: expected header 'n,t,re,im', got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ConfigError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        try:
            n = int(parts[0])
            re = float(parts[2])
            im = float(parts[3])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        if n != expected_n:
            raise ConfigError(
                f"{path}:{lineno}: sample index {n} out of order (expected {expected_n})"
            )
        expected_n += 1
        values.append(complex(re, im))
    if not header_seen:
        raise ConfigError(f"{path}:1: missing 'n,t,re,im' header")
    if not values:
        raise ConfigError(f"{path}: no sample rows")
    return np.asarray(values, dtype=np.complex128), meta


def write_profile_csv(path, profile: RangeProfile) -> None:
    """Write a range profile as ``bin_p,range_m,power,power_db``."""
    lines = ["bin_p,range_m,power,power_db"]
    floor_db = -400.0  # stand-in for log of an exactly zero bin
    for p, power in enumerate(profile.bin_power):
        range_m = p * profile.bin_spacing_m
        db = 10.0 * np.log10(power) if power > 0 else floor_db
        lines.append(f"{p},{fmt(range_m)},{fmt(power)},{fmt(db)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_peaks_csv(path, peaks: PeakSet) -> None:
    lines = ["bin_p,range_m,power"]
    for peak in peaks:
        lines.append(f"{peak.bin_p},{fmt(peak.range_m)},{fmt(peak.power)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_table_csv(path, header: tuple[str, ...], rows) -> None:
    """Write generic numeric rows; non-floats are emitted verbatim."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool) or isinstance(cell, (str, int)):
                cells.append(str(cell))
            else:
                cells.append(fmt(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_spectrogram_csv(path, matrix: np.ndarray, sample_rate_hz: float, hop: int) -> None:
    """Write a spectrogram matrix, one frame per row, bins as columns."""
    bins = matrix.shape[1] if matrix.ndim == 2 else 0
    header = ["frame", "t"] + [f"bin_{k}" for k in range(bins)]
    lines = [",".join(header)]
    for i, row in enumerate(matrix):
        t = i * hop / sample_rate_hz
        lines.append(",".join([str(i), fmt(t)] + [fmt(v) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")
