"""Dual-polarization probing sequences.

Three schemes are provided:

* ``GOLAY_BPSK`` -- two mutually orthogonal Golay complementary pairs,
  BPSK-mapped, one pair per polarization axis.
* ``CAZAC`` -- a perfect-square CAZAC sequence on X and the same sequence
  rotated by half a period on Y.
* ``SWEEP`` -- a real linear chirp covering ``[0, F_symb/2]`` on X and its
  half-period rotation on Y.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import SizeError

DEFAULT_SYMBOL_RATE = 50e6

# Fixed seed pair; any complementary length-4 pair would do.
_GOLAY_SEED_A = (1, 1, 1, -1)
_GOLAY_SEED_B = (1, 1, -1, 1)
_MAX_GOLAY_DEPTH = 24
_MAX_CAZAC_ORDER = 12


class Scheme(str, enum.Enum):
    GOLAY_BPSK = "golay"
    CAZAC = "cazac"
    SWEEP = "sweep"

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class GolayPair:
    """Binary complementary pair; ``a`` and ``b`` hold integer +/-1 symbols."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError("Golay pair members must be 1-D and equally long")

    def __len__(self) -> int:
        return self.a.size

    @property
    def depth(self) -> int:
        """Number of recursions applied to the length-4 seed."""
        return int(np.log2(self.a.size // 4))


@dataclass(frozen=True)
class CazacSequence:
    symbols: np.ndarray
    order: int

    def __len__(self) -> int:
        return self.symbols.size


@dataclass(frozen=True)
class DualPolSequence:
    """One probing period: the symbol streams sent on the X and Y axes.

    ``source`` keeps the generating object(s) so receivers can be matched to
    the probe: a ``(GolayPair, GolayPair)`` tuple, a ``CazacSequence``, or
    ``None`` for the sweep.
    """

    pol_x: np.ndarray
    pol_y: np.ndarray
    scheme: Scheme
    symbol_rate: float = DEFAULT_SYMBOL_RATE
    source: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.pol_x.shape != self.pol_y.shape:
            raise ValueError("pol_x and pol_y must have the same length")

    def __len__(self) -> int:
        return self.pol_x.size

    @property
    def period(self) -> float:
        """Duration of one probing period in seconds."""
        return len(self) / self.symbol_rate

    def as_array(self) -> np.ndarray:
        """Return the probe as a ``(2, N)`` complex array (rows X, Y)."""
        return np.vstack([self.pol_x, self.pol_y])


@dataclass(frozen=True)
class Spectrogram:
    magnitudes: np.ndarray  # (n_windows, window_len)
    window_len: int
    hop: int

    @property
    def ridge(self) -> np.ndarray:
        """Index of the strongest frequency bin in each window."""
        return np.argmax(self.magnitudes, axis=1)


def generate_golay_pair(depth: int) -> GolayPair:
    """Build a Golay complementary pair of length ``4 * 2**depth``.

    Each recursion maps ``(a, b)`` to ``(a || b, a || -b)``.
    """
    depth = int(depth)
    if depth < 0:
        raise ValueError(f"recursion depth must be >= 0, got {depth}")
    if depth > _MAX_GOLAY_DEPTH:
        raise SizeError(f"recursion depth {depth} exceeds {_MAX_GOLAY_DEPTH}")
    a = np.array(_GOLAY_SEED_A, dtype=np.int64)
    b = np.array(_GOLAY_SEED_B, dtype=np.int64)
    for _ in range(depth):
        a, b = np.concatenate([a, b]), np.concatenate([a, -b])
    return GolayPair(a, b)


def mate_pair(pair: GolayPair) -> GolayPair:
    """Return the complementary pair orthogonal to ``pair``.

    ``a2 = reversed(b1)`` and ``b2 = -reversed(a1)``; the aperiodic
    cross-correlations of (a1, a2) and (b1, b2) then cancel at every lag.
    """
    return GolayPair(pair.b[::-1].copy(), -pair.a[::-1])


def generate_cazac(order: int) -> CazacSequence:
    """Perfect-square minimum-phase CAZAC sequence of length ``4**order``.

    Symbol ``n`` (1-based) is ``exp(2j*pi/s * (mod(n-1, s) + 1) * (floor((n-1)/s) + 1))``
    with ``s = sqrt(N) = 2**order``; the alphabet is ``s``-PSK.
    """
    order = int(order)
    if not 1 <= order <= _MAX_CAZAC_ORDER:
        raise SizeError(f"CAZAC order must be in [1, {_MAX_CAZAC_ORDER}], got {order}")
    s = 1 << order
    n0 = np.arange(s * s, dtype=np.int64)
    k = ((n0 % s + 1) * (n0 // s + 1)) % s
    return CazacSequence(psk_alphabet(s)[k], order)


def psk_alphabet(size: int) -> np.ndarray:
    """``exp(2j*pi*k/size)`` for k < size, exact on the axes."""
    table = np.exp(2j * np.pi * np.arange(size) / size)
    for quarter, v in enumerate((1, 1j, -1, -1j)):
        if (quarter * size) % 4 == 0:
            table[quarter * size // 4] = v
    return table


def circular_shift(s, k: int) -> np.ndarray:
    """Rotate ``s`` right by ``k``: ``out[n] = s[(n - k) mod len(s)]``."""
    s = np.asarray(s)
    if not 0 <= k < s.size:
        raise ValueError(f"shift {k} outside [0, {s.size})")
    return np.roll(s, k)


def generate_sweep(n_total: int, symbol_rate: float = DEFAULT_SYMBOL_RATE) -> DualPolSequence:
    """Real cosine chirp whose instantaneous frequency rises from 0 to F_symb/2.

    The Y axis carries the same chirp delayed by half a period. The phase
    restarts at every period, so the frequency drops abruptly from F_symb/2
    back to 0 at the boundary.
    """
    n_total = int(n_total)
    if n_total < 8 or n_total % 2:
        raise ValueError(f"sweep length must be even and >= 8, got {n_total}")
    n = np.arange(n_total, dtype=np.float64)
    x = np.cos(np.pi * n * n / (2 * n_total)).astype(np.complex128)
    return DualPolSequence(x, circular_shift(x, n_total // 2), Scheme.SWEEP, symbol_rate)


def build_probe(scheme, size: int, symbol_rate: float = DEFAULT_SYMBOL_RATE) -> DualPolSequence:
    """Assemble one probing period.

    ``size`` is the recursion depth K for Golay, the order M for CAZAC and
    the period length in symbols for the sweep.
    """
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.GOLAY_BPSK:
        p1 = generate_golay_pair(size)
        p2 = mate_pair(p1)
        x = np.concatenate([p1.a, p1.b]).astype(np.complex128)
        y = np.concatenate([p2.a, p2.b]).astype(np.complex128)
        return DualPolSequence(x, y, scheme, symbol_rate, source=(p1, p2))
    if scheme is Scheme.CAZAC:
        c = generate_cazac(size)
        y = circular_shift(c.symbols, len(c) // 2)
        return DualPolSequence(c.symbols, y, scheme, symbol_rate, source=c)
    return generate_sweep(size, symbol_rate)


def size_for_length(scheme, n_symbols: int) -> int:
    """Size parameter giving a probing period of exactly ``n_symbols``."""
    scheme = Scheme.parse(scheme)
    n = int(n_symbols)
    if scheme is Scheme.SWEEP:
        return n
    if scheme is Scheme.GOLAY_BPSK:
        depth = int(round(np.log2(max(n, 1) / 8)))
        if depth < 0 or 8 << depth != n:
            raise SizeError(f"Golay period must be 8 * 2**K, got {n}")
        return depth
    order = int(round(np.log(max(n, 1)) / np.log(4)))
    if order < 1 or 4**order != n:
        raise SizeError(f"CAZAC period must be a power of 4, got {n}")
    return order


def probe_for_length(scheme, n_symbols: int, symbol_rate: float = DEFAULT_SYMBOL_RATE) -> DualPolSequence:
    return build_probe(scheme, size_for_length(scheme, n_symbols), symbol_rate)


def default_window_len(n: int) -> int:
    """sqrt(n) rounded to the nearest power of two (at least 1)."""
    return 1 << max(0, int(round(np.log2(np.sqrt(n)))))


def spectrogram(s, window_len: int | None = None, hop: int | None = None) -> Spectrogram:
    """Magnitude of rectangular-window DFTs taken every ``hop`` samples."""
    s = np.asarray(s)
    if window_len is None:
        window_len = default_window_len(s.size)
    if hop is None:
        hop = window_len
    if window_len < 1 or window_len > s.size:
        raise ValueError(f"window length {window_len} must lie in [1, {s.size}]")
    if hop < 1:
        raise ValueError("hop must be >= 1")
    starts = np.arange(0, s.size - window_len + 1, hop)
    frames = s[starts[:, None] + np.arange(window_len)[None, :]]
    return Spectrogram(np.abs(np.fft.fft(frames, axis=1)), window_len, hop)
