"""Ground-truth Rayleigh backscatter channels as round-trip Jones matrices.

The fiber is cut into segments of one spatial resolution cell. Light reaching
segment ``i`` has crossed ``i + 1`` random birefringent elements, giving a
unitary forward matrix ``F_i``. The segment reflects a complex Gaussian
fraction ``r_i`` of the field, and the return trip applies ``F_i`` transposed
(reciprocity). The round-trip tap is therefore ``a_i * r_i * F_i.T @ F_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateChannelError

C_FIBER = 2e8
SINGULAR_DET = 1e-30
# std of the per-segment retardance, in radians
BIREFRINGENCE_STD = 0.05


@dataclass(frozen=True)
class ChannelRealization:
    """Ordered round-trip Jones taps, one per segment (``taps[i]`` is 2x2).

    ``attenuation`` and ``reflectivity`` are the drawn scalar factors so that
    ``|det(taps[i])| == |attenuation[i] * reflectivity[i]|**2``.
    """

    taps: np.ndarray
    segment_length: float
    fiber_length: float
    alpha_db_km: float
    c_f: float
    seed: int
    attenuation: np.ndarray
    reflectivity: np.ndarray

    def __len__(self) -> int:
        return self.taps.shape[0]

    @property
    def round_trip_time(self) -> float:
        return 2 * self.fiber_length / self.c_f

    def truncate(self, n_taps: int) -> "ChannelRealization":
        """First ``n_taps`` segments, i.e. the same fiber cut shorter."""
        n_taps = int(n_taps)
        if not 1 <= n_taps <= len(self):
            raise ValueError(f"cannot keep {n_taps} of {len(self)} taps")
        return replace(
            self,
            taps=self.taps[:n_taps],
            fiber_length=n_taps * self.segment_length,
            attenuation=self.attenuation[:n_taps],
            reflectivity=self.reflectivity[:n_taps],
        )

    def params(self) -> dict:
        return {
            "fiber_length_m": self.fiber_length,
            "segment_length_m": self.segment_length,
            "alpha_db_km": self.alpha_db_km,
            "c_f": self.c_f,
            "seed": self.seed,
            "n_taps": len(self),
        }


def _rotation(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def birefringence_elements(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` random unitary retarders ``R(t) diag(e^{jb/2}, e^{-jb/2}) R(-t)``."""
    theta = rng.uniform(0.0, np.pi, n)
    beta = rng.normal(0.0, BIREFRINGENCE_STD, n)
    rot = _rotation(theta)
    ret = np.zeros((n, 2, 2), dtype=np.complex128)
    ret[:, 0, 0] = np.exp(0.5j * beta)
    ret[:, 1, 1] = np.exp(-0.5j * beta)
    return rot @ ret @ np.swapaxes(rot, -1, -2)


def n_segments(length: float, segment_length: float) -> int:
    # rounding guards against 8192/2 landing at 4095.999...
    return math.floor(round(length / segment_length, 9))


def generate_channel(
    length: float,
    symbol_rate: float = 50e6,
    alpha_db_km: float = 0.2,
    c_f: float = C_FIBER,
    seed: int = 0,
) -> ChannelRealization:
    """Draw a static dual-polarization backscatter channel for ``length`` meters.

    Deterministic in ``seed``. Raises ``DegenerateChannelError`` when the fiber
    holds fewer than two segments.
    """
    if length <= 0 or symbol_rate <= 0 or c_f <= 0:
        raise ValueError("length, symbol rate and c_f must be positive")
    if alpha_db_km < 0:
        raise ValueError("attenuation must be non-negative")
    seg = spatial_resolution(symbol_rate, c_f)
    n = n_segments(length, seg)
    if n < 2:
        raise DegenerateChannelError(f"{length} m holds {n} segment(s) of {seg} m; need at least 2")

    rng = np.random.default_rng(seed)
    elements = birefringence_elements(n, rng)
    r = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)

    forward = np.empty_like(elements)
    acc = np.eye(2, dtype=np.complex128)
    for i in range(n):
        acc = elements[i] @ acc
        forward[i] = acc

    distance_km = np.arange(n) * seg / 1000.0
    a = 10.0 ** (-alpha_db_km * distance_km / 10.0)
    taps = (a * r)[:, None, None] * (np.swapaxes(forward, -1, -2) @ forward)
    return ChannelRealization(taps, seg, float(length), float(alpha_db_km), float(c_f), int(seed), a, r)


def spatial_resolution(symbol_rate: float, c_f: float = C_FIBER) -> float:
    """Fiber length covered by one symbol of round-trip delay."""
    if symbol_rate <= 0 or c_f <= 0:
        raise ValueError("symbol rate and c_f must be positive")
    return c_f / (2.0 * symbol_rate)


def tap_intensity_profile(taps) -> np.ndarray:
    """Squared Frobenius norm of each tap."""
    taps = getattr(taps, "taps", taps)
    return np.sum(np.abs(np.asarray(taps)) ** 2, axis=(-2, -1))


def matrix_phase(taps) -> np.ndarray:
    """Half the argument of each determinant, in (-pi/2, pi/2].

    Taps with ``|det| < 1e-30`` come back as NaN.
    """
    det = np.atleast_1d(np.linalg.det(np.asarray(taps)))
    phase = 0.5 * np.angle(det)
    # angle() returns -pi for -1-0j; fold onto the closed upper end
    phase[phase <= -np.pi / 2] += np.pi
    phase[np.abs(det) < SINGULAR_DET] = np.nan
    return phase


def true_phase(ch: ChannelRealization) -> np.ndarray:
    return matrix_phase(ch.taps)
