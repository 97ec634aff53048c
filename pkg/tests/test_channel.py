import numpy as np
import pytest

from trifmcw import (
    ChannelModel,
    ChannelTap,
    ComplexSignal,
    GridAlignmentError,
    apply_channel,
    rayleigh_taps,
)

FS = 1000.0


def sig_of(values):
    return ComplexSignal(np.asarray(values, dtype=complex), FS)


def test_identity_tap():
    x = sig_of([1, 2j, -3, 4 + 1j])
    y = apply_channel(x, ChannelModel((ChannelTap(0.0, 1.0),)))
    np.testing.assert_array_equal(y.samples, x.samples)


def test_pure_shift_zero_fill():
    x = sig_of(np.arange(1, 9))
    y = apply_channel(x, ChannelModel((ChannelTap(3 / FS, 1.0),)))
    np.testing.assert_array_equal(y.samples, [0, 0, 0, 1, 2, 3, 4, 5])


def test_two_tap_superposition():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(8, 40))
        x = sig_of(rng.normal(size=n) + 1j * rng.normal(size=n))
        d1, d2 = sorted(rng.choice(n - 1, size=2, replace=False))
        g1 = complex(rng.normal(), rng.normal())
        g2 = complex(rng.normal(), rng.normal())
        both = apply_channel(
            x, ChannelModel((ChannelTap(d1 / FS, g1), ChannelTap(d2 / FS, g2)))
        )
        lone1 = apply_channel(x, ChannelModel((ChannelTap(d1 / FS, 1.0),)))
        lone2 = apply_channel(x, ChannelModel((ChannelTap(d2 / FS, 1.0),)))
        np.testing.assert_allclose(
            both.samples, g1 * lone1.samples + g2 * lone2.samples, atol=1e-12
        )


def test_time_invariance_on_the_grid():
    rng = np.random.default_rng(11)
    x = rng.normal(size=32) + 1j * rng.normal(size=32)
    ch = ChannelModel((ChannelTap(5 / FS, 0.3 - 0.4j),))
    shift = 4
    shifted_in = np.concatenate([np.zeros(shift, complex), x[:-shift]])
    out_then_shift = apply_channel(sig_of(x), ch).samples
    out_then_shift = np.concatenate([np.zeros(shift, complex), out_then_shift[:-shift]])
    shift_then_out = apply_channel(sig_of(shifted_in), ch).samples
    np.testing.assert_allclose(shift_then_out, out_then_shift, atol=1e-12)


def test_single_tap_energy_clips_tail():
    rng = np.random.default_rng(3)
    x = rng.normal(size=64) + 1j * rng.normal(size=64)
    d = 10
    y = apply_channel(sig_of(x), ChannelModel((ChannelTap(d / FS, 1.0),)))
    e_in = np.sum(np.abs(x) ** 2)
    e_out = np.sum(np.abs(y.samples) ** 2)
    e_tail = np.sum(np.abs(x[-d:]) ** 2)
    assert abs(e_out - (e_in - e_tail)) < 1e-9


def test_off_grid_delay_names_the_tap():
    x = sig_of(np.ones(16))
    ch = ChannelModel((ChannelTap(0.0, 1.0), ChannelTap(2.5 / FS, 1.0)))
    with pytest.raises(GridAlignmentError, match="tap 1 .*override fs"):
        apply_channel(x, ch)


def test_delay_beyond_signal_rejected():
    x = sig_of(np.ones(8))
    with pytest.raises(ValueError, match="beyond the signal length"):
        apply_channel(x, ChannelModel((ChannelTap(8 / FS, 1.0),)))


def test_taps_sorted_and_distinct():
    ch = ChannelModel((ChannelTap(0.02, 1.0), ChannelTap(0.01, 2.0)))
    assert [t.delay_s for t in ch.taps] == [0.01, 0.02]
    with pytest.raises(ValueError, match="distinct"):
        ChannelModel((ChannelTap(0.01, 1.0), ChannelTap(0.01, 2.0)))


def test_rayleigh_taps_deterministic():
    delays = [0.001, 0.002, 0.003, 0.004]
    a = rayleigh_taps(delays, seed=42)
    b = rayleigh_taps(delays, seed=42)
    assert a.taps == b.taps
    assert len(a) == 4
    assert [t.delay_s for t in a.taps] == sorted(delays)
    c = rayleigh_taps(delays, seed=43)
    assert c.taps != a.taps


def test_rayleigh_taps_duplicate_delays_rejected():
    with pytest.raises(ValueError, match="distinct"):
        rayleigh_taps([0.001, 0.001], seed=1)


def test_rayleigh_gain_second_moment():
    # E|g|^2 = 1 for (z_re + j z_im)/sqrt(2) with standard normal parts
    delays = [i * 1e-6 for i in range(100_000)]
    model = rayleigh_taps(delays, seed=2024)
    mean_sq = np.mean([abs(t.gain) ** 2 for t in model.taps])
    assert 0.99 <= mean_sq <= 1.01
