import numpy as np
import pytest

from trifmcw import ConfigError
from trifmcw.csvio import fmt, read_signal_csv, write_signal_csv


def test_fmt_six_significant_digits():
    assert fmt(0.53593750001) == "0.535938"
    assert fmt(1600) == "1600"
    assert fmt(-7.4) == "-7.4"


def test_signal_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(5)
    samples = rng.normal(size=64) + 1j * rng.normal(size=64)
    path = tmp_path / "sig.csv"
    write_signal_csv(path, samples, 16000.0, {"kind": "triangle", "fs": 16000.0})
    back, meta = read_signal_csv(path)
    np.testing.assert_array_equal(back, samples)  # bit-for-bit via 17 digits
    assert meta["kind"] == "triangle"
    assert float(meta["fs"]) == 16000.0


def test_read_rejects_out_of_order_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n,t,re,im\n0,0,1,0\n2,0.0001,1,0\n")
    with pytest.raises(ConfigError, match="out of order"):
        read_signal_csv(path)


def test_read_rejects_missing_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0,1,0\n")
    with pytest.raises(ConfigError, match="header"):
        read_signal_csv(path)


def test_read_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ConfigError, match="header"):
        read_signal_csv(path)
