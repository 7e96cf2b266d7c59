"""Received field synthesis: probe through channel, laser phase noise, AWGN.

The probe is transmitted continuously, so one steady-state period of the
received field is the circular convolution of the probe with the channel
taps. The interrogating laser doubles as the local oscillator; a tap at
delay ``i`` therefore only sees the phase difference ``phi[j - i] - phi[j]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequences import DualPolSequence


@dataclass(frozen=True)
class NoiseConfig:
    awgn_sigma: float = 0.0
    linewidth_hz: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.awgn_sigma < 0 or self.linewidth_hz < 0:
            raise ValueError("noise parameters must be non-negative")


@dataclass(frozen=True)
class ReceivedField:
    """One steady-state period of the received X/Y field.

    ``aliased`` is set when the channel is at least one period long, in which
    case taps fold onto each other and no scheme can separate them.
    """

    rx_x: np.ndarray
    rx_y: np.ndarray
    probe: DualPolSequence
    aliased: bool = False

    def __len__(self) -> int:
        return self.rx_x.size

    def as_array(self) -> np.ndarray:
        return np.vstack([self.rx_x, self.rx_y])

    def __add__(self, other: "ReceivedField") -> "ReceivedField":
        return ReceivedField(self.rx_x + other.rx_x, self.rx_y + other.rx_y, self.probe,
                             self.aliased or other.aliased)


def _taps_of(ch) -> np.ndarray:
    taps = np.asarray(getattr(ch, "taps", ch), dtype=np.complex128)
    if taps.ndim != 3 or taps.shape[1:] != (2, 2):
        raise ValueError(f"expected an (n, 2, 2) tap array, got shape {taps.shape}")
    return taps


def fold_taps(taps: np.ndarray, n: int) -> np.ndarray:
    """Sum taps whose delays coincide modulo ``n`` into an ``(n, 2, 2)`` array."""
    out = np.zeros((n, 2, 2), dtype=np.complex128)
    np.add.at(out, np.arange(taps.shape[0]) % n, taps)
    return out


def circular_convolve(probe: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """``out[:, j] = sum_i taps[i] @ probe[:, (j - i) mod N]`` via FFT.

    ``probe`` is ``(2, N)``; returns ``(2, N)``.
    """
    n = probe.shape[1]
    h_f = np.fft.fft(fold_taps(taps, n), axis=0)
    e_f = np.fft.fft(probe, axis=1)
    return np.fft.ifft(np.einsum("kpq,qk->pk", h_f, e_f), axis=1)


def circular_convolve_direct(probe: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Same as :func:`circular_convolve` by explicit summation over taps."""
    out = np.zeros(probe.shape, dtype=np.complex128)
    for i, h in enumerate(taps):
        out += h @ np.roll(probe, i, axis=1)
    return out


def wiener_phase(n: int, linewidth_hz: float, symbol_rate: float, rng) -> np.ndarray:
    """Lorentzian-linewidth laser phase sampled once per symbol.

    Increments are Gaussian with variance ``2*pi*linewidth/symbol_rate``.
    """
    rng = np.random.default_rng(rng)
    std = np.sqrt(2 * np.pi * linewidth_hz / symbol_rate)
    steps = rng.normal(0.0, std, n)
    steps[0] = 0.0
    return np.cumsum(steps)


def _convolve_with_phase_noise(probe: np.ndarray, taps: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # phi[m + d - 1] is the laser phase at time m, m in [-(d-1), N)
    n = probe.shape[1]
    d = taps.shape[0]
    m = np.arange(-(d - 1), n)
    sent = probe[:, m % n] * np.exp(1j * phi)[None, :]
    size = sent.shape[1] + d - 1
    h_f = np.fft.fft(taps, n=size, axis=0)
    s_f = np.fft.fft(sent, n=size, axis=1)
    lin = np.fft.ifft(np.einsum("kpq,qk->pk", h_f, s_f), axis=1)
    # linear output index for time j is j + d - 1
    out = lin[:, d - 1:d - 1 + n]
    return out * np.exp(-1j * phi[d - 1:])[None, :]


def apply_laser_phase_noise(
    probe: DualPolSequence,
    ch,
    linewidth_hz: float,
    symbol_rate: float | None = None,
    seed=0,
) -> ReceivedField:
    """Noise-free received field with the laser's differential phase applied per tap.

    With ``linewidth_hz == 0`` this is the plain circular convolution.
    """
    if linewidth_hz < 0:
        raise ValueError("linewidth must be non-negative")
    taps = _taps_of(ch)
    e_t = probe.as_array()
    n = e_t.shape[1]
    if linewidth_hz == 0:
        rx = circular_convolve(e_t, taps)
    else:
        rate = probe.symbol_rate if symbol_rate is None else symbol_rate
        phi = wiener_phase(n + taps.shape[0] - 1, linewidth_hz, rate, seed)
        rx = _convolve_with_phase_noise(e_t, taps, phi)
    return ReceivedField(rx[0], rx[1], probe, aliased=taps.shape[0] >= n)


def add_awgn(rx: ReceivedField, sigma: float, seed=0) -> ReceivedField:
    """Add circular complex Gaussian noise with ``E|n|^2 = sigma**2`` per sample."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return rx
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((2, 2, len(rx)))
    noise = (noise[0] + 1j * noise[1]) * (sigma / np.sqrt(2))
    return ReceivedField(rx.rx_x + noise[0], rx.rx_y + noise[1], rx.probe, rx.aliased)


def sigma_for_snr(rx: ReceivedField, snr_db: float) -> float:
    """AWGN sigma giving ``snr_db`` relative to the mean received power per sample."""
    power = np.mean(np.abs(rx.as_array()) ** 2)
    return float(np.sqrt(power / 10 ** (snr_db / 10)))


def simulate_rx(probe: DualPolSequence, ch, noise: NoiseConfig | None = None) -> ReceivedField:
    """Full link: convolution, laser phase noise, then receiver AWGN."""
    noise = noise or NoiseConfig()
    pn_seed, awgn_seed = np.random.SeedSequence(noise.seed).spawn(2)
    rx = apply_laser_phase_noise(probe, ch, noise.linewidth_hz, seed=pn_seed)
    return add_awgn(rx, noise.awgn_sigma, seed=awgn_seed)
