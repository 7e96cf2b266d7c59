"""Estimation-quality metrics and probing capacity formulas."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SINGULAR_DET, ChannelRealization, matrix_phase, spatial_resolution
from .errors import UndefinedMetricError
from .receiver import EstimatedResponse, wrap_half_turn
from .sequences import Scheme

__all__ = [
    "ErrorCurve",
    "aliasing_profile",
    "cumulative_mean",
    "det_relative_error",
    "max_length",
    "max_mechanical_bandwidth",
    "mechanical_bandwidth",
    "per_segment_errors",
    "phase_error",
    "spatial_resolution",
]

# Fraction of the round-trip-limited maximum each scheme reaches.
_LENGTH_FACTOR = {Scheme.GOLAY_BPSK: 0.25, Scheme.CAZAC: 0.5, Scheme.SWEEP: 0.5}


@dataclass(frozen=True)
class ErrorCurve:
    distances: np.ndarray
    det_rel_error: np.ndarray
    phase_error: np.ndarray
    scheme: Scheme
    seeds: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        if not (len(self.distances) == len(self.det_rel_error) == len(self.phase_error)):
            raise ValueError("error curve arrays must have equal length")


def _compared_taps(est: EstimatedResponse, ref: ChannelRealization, up_to_index, restrict_to_valid_span):
    stop = min(len(ref), len(est))
    if restrict_to_valid_span:
        lo, hi = est.valid_span
        stop = min(stop, hi)
    else:
        lo = 0
    if up_to_index is not None:
        stop = min(stop, int(up_to_index) + 1)
    if stop <= lo:
        raise UndefinedMetricError("no segments to average over")
    return est.taps_hat[lo:stop], ref.taps[lo:stop]


def per_segment_errors(est: EstimatedResponse, ref: ChannelRealization, up_to_index=None,
                       restrict_to_valid_span: bool = True):
    """Per-segment determinant relative error and absolute phase error.

    Segments whose reference or estimate is singular are NaN in both arrays.
    """
    h_hat, h = _compared_taps(est, ref, up_to_index, restrict_to_valid_span)
    det_hat = np.linalg.det(h_hat)
    det = np.linalg.det(h)
    singular = np.abs(det) < SINGULAR_DET
    with np.errstate(divide="ignore", invalid="ignore"):
        det_err = np.abs(det_hat - det) / np.abs(det)
    det_err[singular] = np.nan
    ph_err = np.abs(wrap_half_turn(matrix_phase(h_hat) - matrix_phase(h)))
    ph_err[singular] = np.nan
    return det_err, ph_err


def _mean(values: np.ndarray) -> float:
    kept = values[~np.isnan(values)]
    if kept.size == 0:
        raise UndefinedMetricError("every segment in range is singular")
    return float(np.mean(kept))


def det_relative_error(est, ref, up_to_index=None, restrict_to_valid_span: bool = True) -> float:
    """Mean of ``|det(H_hat) - det(H)| / |det(H)|`` over segments ``0..up_to_index``."""
    return _mean(per_segment_errors(est, ref, up_to_index, restrict_to_valid_span)[0])


def phase_error(est, ref, up_to_index=None, restrict_to_valid_span: bool = True) -> float:
    """Mean absolute extracted-phase error in radians, modulo pi."""
    return _mean(per_segment_errors(est, ref, up_to_index, restrict_to_valid_span)[1])


def cumulative_mean(values) -> np.ndarray:
    """Running mean ignoring NaN entries (NaN until the first finite value)."""
    values = np.asarray(values, dtype=np.float64)
    ok = ~np.isnan(values)
    counts = np.cumsum(ok)
    sums = np.cumsum(np.where(ok, values, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def max_length(scheme, n_sequence: int, symbol_rate: float, c_f: float) -> float:
    """Longest fiber a period of ``n_sequence`` symbols estimates without aliasing."""
    scheme = Scheme.parse(scheme)
    if n_sequence <= 0:
        raise ValueError("sequence length must be positive")
    return _LENGTH_FACTOR[scheme] * n_sequence * spatial_resolution(symbol_rate, c_f)


def mechanical_bandwidth(period_s: float) -> float:
    """Highest perturbation frequency observable when probing every ``period_s``."""
    if period_s <= 0:
        raise ValueError("period must be positive")
    return 1.0 / (2.0 * period_s)


def max_mechanical_bandwidth(scheme, length: float, c_f: float, convention: str = "nyquist") -> float:
    """Bandwidth when the period is the shortest one compatible with ``length``.

    ``"nyquist"`` applies ``1 / (2 T)`` to the minimal period; ``"rate"``
    returns the probing rate ``1 / T`` itself, twice the Nyquist value.
    """
    scheme = Scheme.parse(scheme)
    if length <= 0 or c_f <= 0:
        raise ValueError("length and c_f must be positive")
    min_period = 2 * length / c_f / _LENGTH_FACTOR[scheme]
    if convention == "nyquist":
        return mechanical_bandwidth(min_period)
    if convention == "rate":
        return 1.0 / min_period
    raise ValueError(f"unknown convention {convention!r}")


def aliasing_profile(est: EstimatedResponse) -> np.ndarray:
    """Squared Frobenius norm of every estimated tap over the whole window."""
    return np.sum(np.abs(est.taps_hat) ** 2, axis=(-2, -1))
