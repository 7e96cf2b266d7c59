import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdm_otdr.errors import SizeError
from pdm_otdr.sequences import (
    Scheme,
    build_probe,
    circular_shift,
    default_window_len,
    generate_cazac,
    generate_golay_pair,
    generate_sweep,
    mate_pair,
    probe_for_length,
    size_for_length,
    spectrogram,
)

from oracles import aperiodic_xcorr, circular_xcorr


def test_golay_seed():
    p = generate_golay_pair(0)
    assert p.a.tolist() == [1, 1, 1, -1]
    assert p.b.tolist() == [1, 1, -1, 1]
    ra, rb = aperiodic_xcorr(p.a, p.a), aperiodic_xcorr(p.b, p.b)
    assert [ra[k] + rb[k] for k in range(4)] == [8, 0, 0, 0]


def test_golay_depth_one_is_concatenation():
    p0 = generate_golay_pair(0)
    p1 = generate_golay_pair(1)
    assert p1.a.tolist() == p0.a.tolist() + p0.b.tolist()
    assert p1.b.tolist() == p0.a.tolist() + (-p0.b).tolist()
    ra, rb = aperiodic_xcorr(p1.a, p1.a), aperiodic_xcorr(p1.b, p1.b)
    assert all(ra[k] + rb[k] == (16 if k == 0 else 0) for k in ra)


@pytest.mark.parametrize("depth", range(0, 7))
def test_golay_complementary_and_mate(depth):
    p = generate_golay_pair(depth)
    m = mate_pair(p)
    n = 4 * 2**depth
    assert len(p) == len(m) == n
    assert p.depth == depth
    assert set(np.unique(p.a)) <= {-1, 1} and set(np.unique(m.b)) <= {-1, 1}
    for pair in (p, m):
        ra, rb = aperiodic_xcorr(pair.a, pair.a), aperiodic_xcorr(pair.b, pair.b)
        assert all(ra[k] + rb[k] == (2 * n if k == 0 else 0) for k in ra)
    ca, cb = aperiodic_xcorr(p.a, m.a), aperiodic_xcorr(p.b, m.b)
    assert all(ca[k] + cb[k] == 0 for k in ca)


def test_mate_of_seed():
    m = mate_pair(generate_golay_pair(0))
    assert m.a.tolist() == [1, -1, 1, 1]
    assert m.b.tolist() == [1, -1, -1, -1]
    mm = mate_pair(m)
    ra, rb = aperiodic_xcorr(mm.a, mm.a), aperiodic_xcorr(mm.b, mm.b)
    assert ra[0] + rb[0] == 8


def test_golay_bounds():
    with pytest.raises(ValueError):
        generate_golay_pair(-1)
    with pytest.raises(SizeError):
        generate_golay_pair(25)


def test_cazac_order_one():
    c = generate_cazac(1)
    np.testing.assert_array_equal(c.symbols, [-1, 1, 1, 1])
    np.testing.assert_allclose(circular_xcorr(c.symbols, c.symbols), [4, 0, 0, 0], atol=1e-12)


def test_cazac_order_two_matches_formula():
    c = generate_cazac(2)
    assert c.symbols[0] == 1j
    n = np.arange(1, 17)
    s = 4
    direct = np.exp(1j * 2 * np.pi / s * (np.mod(n - 1, s) + 1) * ((n - 1) // s + 1))
    np.testing.assert_allclose(c.symbols, direct, atol=1e-12)
    phases = np.angle(c.symbols) / (2 * np.pi / 4)
    np.testing.assert_allclose(phases, np.round(phases), atol=1e-12)


@pytest.mark.parametrize("order", range(1, 6))
def test_cazac_properties(order):
    c = generate_cazac(order)
    n = 4**order
    assert len(c) == n
    np.testing.assert_allclose(np.abs(c.symbols), 1.0, atol=1e-12)
    steps = np.angle(c.symbols) * 2**order / (2 * np.pi)
    np.testing.assert_allclose(steps, np.round(steps), atol=1e-9)
    r = circular_xcorr(c.symbols, c.symbols)
    assert abs(r[0] - n) < 1e-9 * n
    assert np.max(np.abs(r[1:])) < 1e-9 * n


def test_cazac_bounds():
    for bad in (0, 13):
        with pytest.raises(SizeError):
            generate_cazac(bad)


def test_circular_shift_examples():
    np.testing.assert_array_equal(circular_shift([-1, 1, 1, 1], 2), [1, 1, -1, 1])
    s = np.arange(5)
    np.testing.assert_array_equal(circular_shift(s, 0), s)
    np.testing.assert_array_equal(circular_shift(s, 5 % 5), s)
    with pytest.raises(ValueError):
        circular_shift(s, 5)
    with pytest.raises(ValueError):
        circular_shift(s, -1)


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False), min_size=1, max_size=40), st.data())
def test_circular_shift_preserves_values(values, data):
    s = np.array(values, dtype=complex)
    k = data.draw(st.integers(0, s.size - 1))
    out = circular_shift(s, k)
    assert sorted(out.tolist(), key=lambda z: (z.real, z.imag)) == sorted(values, key=lambda z: (z.real, z.imag))
    # fsum is order-independent, so equal multisets give bit-equal energy
    assert math.fsum(np.abs(out) ** 2) == math.fsum(np.abs(s) ** 2)
    assert all(out[n] == s[(n - k) % s.size] for n in range(s.size))


def test_sweep_waveform():
    p = generate_sweep(64)
    assert p.scheme is Scheme.SWEEP
    assert p.pol_x[0] == 1.0
    n = np.arange(64)
    np.testing.assert_allclose(p.pol_x.real, np.cos(np.pi * n**2 / 128))
    np.testing.assert_array_equal(p.pol_y, np.roll(p.pol_x, 32))
    with pytest.raises(ValueError):
        generate_sweep(63)
    with pytest.raises(ValueError):
        generate_sweep(6)


def test_sweep_ridge_rises_to_half_band():
    p = generate_sweep(4096)
    spec = spectrogram(p.pol_x, 64, 64)
    ridge = np.argmax(spec.magnitudes[:, :33], axis=1)
    assert ridge[0] <= 1
    assert ridge[-1] >= 31
    assert np.all(np.diff(ridge) >= 0)
    ridge_y = np.argmax(spectrogram(p.pol_y, 64, 64).magnitudes[:, :33], axis=1)
    np.testing.assert_array_equal(ridge_y, np.roll(ridge, 4096 // 64 // 2))


def test_build_probe_sizes():
    g = build_probe(Scheme.GOLAY_BPSK, 11)
    assert len(g) == 2**14
    c = build_probe("cazac", 7)
    assert len(c) == 2**14
    assert c.period == pytest.approx(327.68e-6)
    c1 = build_probe("cazac", 1)
    np.testing.assert_array_equal(c1.pol_y, [1, 1, -1, 1])


def test_build_probe_golay_layout():
    p = build_probe("golay", 0)
    pair = generate_golay_pair(0)
    mate = mate_pair(pair)
    np.testing.assert_array_equal(p.pol_x, np.r_[pair.a, pair.b])
    np.testing.assert_array_equal(p.pol_y, np.r_[mate.a, mate.b])
    assert p.pol_x.dtype == np.complex128


def test_size_for_length_roundtrip():
    for scheme in Scheme:
        assert len(probe_for_length(scheme, 1024)) == 1024
    with pytest.raises(SizeError):
        size_for_length("cazac", 512)
    with pytest.raises(SizeError):
        size_for_length("golay", 1000)


def test_spectrogram_basics():
    spec = spectrogram(np.ones(64), 8, 8)
    assert spec.magnitudes.shape == (8, 8)
    assert np.all(spec.ridge == 0)
    np.testing.assert_allclose(spec.magnitudes[:, 1:], 0, atol=1e-12)
    tone = np.exp(2j * np.pi * 3 * np.arange(64) / 8)
    assert np.all(spectrogram(tone, 8, 4).ridge == 3)
    assert np.all(spectrogram(tone, 8, 4).magnitudes >= 0)
    with pytest.raises(ValueError):
        spectrogram(np.ones(4), 8)
    with pytest.raises(ValueError):
        spectrogram(np.ones(16), 8, 0)


def test_default_window():
    assert default_window_len(2**16) == 256
    assert default_window_len(1024) == 32
    assert default_window_len(2**14) == 128


def test_cazac_ridge_linear_and_shifted():
    c = build_probe("cazac", 5)  # N = 1024, window 32
    sx = spectrogram(c.pol_x)
    sy = spectrogram(c.pol_y)
    assert sx.window_len == 32
    steps = np.mod(np.diff(sx.ridge), 32)
    assert np.all(steps == 1)
    np.testing.assert_array_equal(sy.ridge, np.roll(sx.ridge, sx.magnitudes.shape[0] // 2))
