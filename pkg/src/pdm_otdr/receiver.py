"""MIMO correlation receiver: received field back to per-segment Jones matrices.

Every estimator correlates each received polarization with the transmitted
reference(s) over one full period (circularly, matching the steady state)
and arranges the four correlations into a 2x2 matrix per lag.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import matrix_phase
from .errors import FlaggedReferenceError
from .linksim import ReceivedField
from .sequences import CazacSequence, DualPolSequence, GolayPair, Scheme


@dataclass(frozen=True)
class EstimatedResponse:
    """Estimated taps over one full period of lags.

    ``valid_span`` is the half-open lag range ``[start, stop)`` where the
    scheme guarantees alias-free estimates.
    """

    taps_hat: np.ndarray  # (window, 2, 2)
    scheme: Scheme
    valid_span: tuple[int, int]

    def __len__(self) -> int:
        return self.taps_hat.shape[0]

    @property
    def valid_taps(self) -> np.ndarray:
        return self.taps_hat[slice(*self.valid_span)]


def circular_xcorr(r: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``g[k] = sum_j r[..., j] * conj(c[(j - k) mod N])``, along the last axis."""
    return np.fft.ifft(np.fft.fft(r, axis=-1) * np.conj(np.fft.fft(c)), axis=-1)


def _check_length(rx: ReceivedField, n: int):
    if len(rx) != n:
        raise ValueError(f"received period {len(rx)} does not match reference length {n}")


def _split_lags(g: np.ndarray) -> np.ndarray:
    """Arrange ``g[p, k]`` into taps with column Y read half a period later."""
    n = g.shape[1]
    h = np.empty((n, 2, 2), dtype=np.complex128)
    h[:, :, 0] = g.T
    h[:, :, 1] = np.roll(g, -(n // 2), axis=1).T
    return h


def estimate_cazac(rx: ReceivedField, c: CazacSequence) -> EstimatedResponse:
    n = len(c)
    _check_length(rx, n)
    g = circular_xcorr(rx.as_array(), c.symbols) / n
    return EstimatedResponse(_split_lags(g), Scheme.CAZAC, (0, n // 2))


def estimate_golay(rx: ReceivedField, pairs: tuple[GolayPair, GolayPair]) -> EstimatedResponse:
    """Four correlations against the per-axis composites ``[a || b]``.

    Correlating each slot against its own code and summing over a full
    period is the same as correlating against the composite sequence.
    """
    p1, p2 = pairs
    n_el = len(p1)
    period = 2 * n_el
    _check_length(rx, period)
    r = rx.as_array()
    ref_x = np.concatenate([p1.a, p1.b]).astype(np.complex128)
    ref_y = np.concatenate([p2.a, p2.b]).astype(np.complex128)
    h = np.empty((period, 2, 2), dtype=np.complex128)
    h[:, :, 0] = (circular_xcorr(r, ref_x) / period).T
    h[:, :, 1] = (circular_xcorr(r, ref_y) / period).T
    return EstimatedResponse(h, Scheme.GOLAY_BPSK, (0, n_el // 2))


def estimate_sweep(rx: ReceivedField, probe: DualPolSequence) -> EstimatedResponse:
    if probe.scheme is not Scheme.SWEEP:
        raise ValueError(f"expected a sweep probe, got {probe.scheme.value}")
    n = len(probe)
    _check_length(rx, n)
    energy = np.vdot(probe.pol_x, probe.pol_x).real
    g = circular_xcorr(rx.as_array(), probe.pol_x) / energy
    return EstimatedResponse(_split_lags(g), Scheme.SWEEP, (0, n // 2))


def estimate(rx: ReceivedField, probe: DualPolSequence | None = None) -> EstimatedResponse:
    """Dispatch to the estimator matching the probe's scheme."""
    probe = rx.probe if probe is None else probe
    if probe.scheme is Scheme.GOLAY_BPSK:
        return estimate_golay(rx, probe.source)
    if probe.scheme is Scheme.CAZAC:
        return estimate_cazac(rx, probe.source)
    return estimate_sweep(rx, probe)


def extract_phase(resp: EstimatedResponse, full_window: bool = False) -> np.ndarray:
    """``0.5 * arg(det(H_k))`` over the valid span; NaN marks singular taps."""
    taps = resp.taps_hat if full_window else resp.valid_taps
    return matrix_phase(taps)


def wrap_half_turn(x):
    """Wrap angles into (-pi/2, pi/2] with period pi."""
    return -(np.mod(-np.asarray(x) + np.pi / 2, np.pi) - np.pi / 2)


def differential_phase(phases, reference_index: int = 0) -> np.ndarray:
    """Phases relative to the reference segment, wrapped with period pi."""
    phases = np.asarray(phases, dtype=np.float64)
    if not 0 <= reference_index < phases.size:
        raise IndexError(f"reference index {reference_index} out of range")
    ref = phases[reference_index]
    if np.isnan(ref):
        nxt = np.flatnonzero(~np.isnan(phases[reference_index:]))
        hint = f"; next usable index is {reference_index + nxt[0]}" if nxt.size else ""
        raise FlaggedReferenceError(f"segment {reference_index} is singular{hint}")
    out = wrap_half_turn(phases - ref)
    out[reference_index] = 0.0
    return out
