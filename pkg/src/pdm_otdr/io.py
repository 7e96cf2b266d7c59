"""CSV import/export for sequences, channels, estimates and results.

Every writer takes an optional list of comment lines, emitted first as
``# ...``. Floats are written with 17 significant digits so files round-trip
exactly and reruns are byte-identical.
"""
from __future__ import annotations

import io as _io
import json
from pathlib import Path

import numpy as np

from .channel import ChannelRealization
from .metrics import ErrorCurve
from .receiver import EstimatedResponse
from .sequences import DualPolSequence, Scheme, Spectrogram

_FMT = "%.17g"
SEQUENCE_HEADER = "n,re_x,im_x,re_y,im_y"
MATRIX_HEADER = "i,re_h00,im_h00,re_h01,im_h01,re_h10,im_h10,re_h11,im_h11"
ERROR_CURVE_HEADER = "distance_m,det_rel_err,phase_err_rad,scheme,seed_count"


def _fmt(x) -> str:
    return _FMT % x


def config_comment(cfg: dict) -> str:
    return "config: " + json.dumps(cfg, sort_keys=True)


def _render(header: str, rows, comments=()) -> str:
    buf = _io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _write(target, text: str):
    if hasattr(target, "write"):
        target.write(text)
        return
    Path(target).write_text(text, encoding="utf-8")


def _complex_cols(z: np.ndarray):
    return [_fmt(z.real), _fmt(z.imag)]


def sequence_csv(x: np.ndarray, y: np.ndarray, comments=()) -> str:
    rows = ([str(n), *_complex_cols(a), *_complex_cols(b)] for n, (a, b) in enumerate(zip(x, y)))
    return _render(SEQUENCE_HEADER, rows, comments)


def write_sequence(target, probe: DualPolSequence, comments=()):
    head = [f"scheme: {probe.scheme.value}", f"symbol_rate: {_fmt(probe.symbol_rate)}", *comments]
    _write(target, sequence_csv(probe.pol_x, probe.pol_y, head))


def write_received(target, rx, comments=()):
    _write(target, sequence_csv(rx.rx_x, rx.rx_y, comments))


def read_sequence(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=_header_skip(path), ndmin=2)
    return data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4]


def _header_skip(path) -> int:
    # loadtxt counts comment lines in skiprows
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh):
            if not line.startswith("#"):
                return n + 1
    return 0


def matrix_csv(taps: np.ndarray, comments=()) -> str:
    flat = taps.reshape(-1, 4)
    rows = ([str(i), *(c for z in t for c in _complex_cols(z))] for i, t in enumerate(flat))
    return _render(MATRIX_HEADER, rows, comments)


def write_channel(target, ch: ChannelRealization, comments=()):
    head = ["channel: " + json.dumps(ch.params(), sort_keys=True), *comments]
    _write(target, matrix_csv(ch.taps, head))


def write_response(target, est: EstimatedResponse, comments=()):
    head = [f"scheme: {est.scheme.value}", f"valid_span: {est.valid_span[0]},{est.valid_span[1]}", *comments]
    _write(target, matrix_csv(est.taps_hat, head))


def read_matrices(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=_header_skip(path), ndmin=2)
    z = data[:, 1::2] + 1j * data[:, 2::2]
    return z.reshape(-1, 2, 2)


def write_error_curve(target, curve: ErrorCurve, comments=()):
    scheme = Scheme.parse(curve.scheme).value
    rows = (
        [_fmt(d), _fmt(e), _fmt(p), scheme, str(len(curve.seeds))]
        for d, e, p in zip(curve.distances, curve.det_rel_error, curve.phase_error)
    )
    _write(target, _render(ERROR_CURVE_HEADER, rows, comments))


def write_spectrogram(target, spec: Spectrogram, comments=()):
    head = [f"window_len: {spec.window_len}", f"hop: {spec.hop}", *comments]
    header = ",".join(f"bin_{k}" for k in range(spec.window_len))
    rows = ([_fmt(v) for v in row] for row in spec.magnitudes)
    _write(target, _render(header, rows, head))


def write_profile(target, profile: np.ndarray, segment_length: float, comments=()):
    rows = ([str(k), _fmt(k * segment_length), _fmt(v)] for k, v in enumerate(profile))
    _write(target, _render("lag,distance_m,intensity", rows, comments))
