"""Experiment runners for the aliasing, time-frequency and error-vs-length studies.

Each runner takes an :class:`ExperimentConfig`, computes every
(scheme, length, seed) point on a bounded thread pool, then writes all files
from the calling thread in a fixed order so reruns are byte-identical.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .channel import generate_channel, n_segments, spatial_resolution
from .errors import ConfigError
from .linksim import NoiseConfig, simulate_rx
from .metrics import ErrorCurve, aliasing_profile, per_segment_errors
from .receiver import estimate
from .sequences import DualPolSequence, Scheme, probe_for_length, size_for_length, spectrogram


RIDGE_CONFIDENCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    schemes: tuple[Scheme, ...] = (Scheme.GOLAY_BPSK, Scheme.CAZAC, Scheme.SWEEP)
    n_symbols: int = 1024
    tf_n_symbols: int = 1024
    symbol_rate: float = 50e6
    c_f: float = 2e8
    lengths: tuple[float, ...] = (500.0,)
    curve_max_length: float = 1250.0
    curve_points: int = 20
    alpha_db_km: float = 0.2
    awgn_sigma: float = 0.0
    linewidth_hz: float = 10.0
    seeds: tuple[int, ...] = (1, 2, 3)
    out_dir: str = "results"
    workers: int = 4

    def __post_init__(self):
        schemes = tuple(Scheme.parse(s) for s in self.schemes)
        object.__setattr__(self, "schemes", schemes)
        if not schemes:
            raise ConfigError("at least one scheme is required")
        if not self.lengths:
            raise ConfigError("at least one fiber length is required")
        for name in ("symbol_rate", "c_f", "curve_max_length", "n_symbols", "tf_n_symbols",
                     "curve_points", "workers"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if any(not length > 0 for length in self.lengths):
            raise ConfigError("fiber lengths must be positive")
        for name in ("alpha_db_km", "awgn_sigma", "linewidth_hz"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        try:
            for s in schemes:
                size_for_length(s, self.n_symbols)
                size_for_length(s, self.tf_n_symbols)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        d["lengths"] = list(self.lengths)
        d["seeds"] = list(self.seeds)
        return d

    @property
    def segment_length(self) -> float:
        return spatial_resolution(self.symbol_rate, self.c_f)


PRESETS = {
    "desk": ExperimentConfig(),
    "full": ExperimentConfig(
        n_symbols=2**14,
        tf_n_symbols=2**16,
        lengths=(8500.0,),
        curve_max_length=20000.0,
    ),
}


@dataclass
class RunResult:
    files: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _pool_map(fn, tasks, workers: int):
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _probe(cfg: ExperimentConfig, scheme: Scheme, n: int | None = None) -> DualPolSequence:
    return probe_for_length(scheme, n or cfg.n_symbols, cfg.symbol_rate)


def _noise(cfg: ExperimentConfig, seed: int, linewidth: float) -> NoiseConfig:
    return NoiseConfig(cfg.awgn_sigma, linewidth, seed)


def _out(cfg: ExperimentConfig, name: str) -> Path:
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / name


def _length_tag(length: float) -> str:
    return f"{length:g}m"


def _finish(cfg: ExperimentConfig, kind: str, result: RunResult) -> RunResult:
    manifest = {"experiment": kind, "config": cfg.to_dict(), "files": result.files, "summary": result.summary}
    path = _out(cfg, f"manifest_{kind}.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    result.files.append(str(path))
    return result


# --- full-window intensity of the estimate ---

def aliasing_stats(profile: np.ndarray, support: int) -> dict:
    """Where the energy of an estimated profile sits relative to the true support.

    ``copy_correlation`` is the normalized correlation between the profile
    over the support and the profile half a window later.
    """
    n = profile.size
    inside = float(np.sum(profile[:support]))
    outside = float(np.sum(profile[support:]))
    half = n // 2
    stats = {"support": int(support), "in_support_energy": inside, "out_of_support_ratio": outside / inside}
    if support <= half:
        a = profile[:support]
        b = profile[half:half + support]
        denom = np.linalg.norm(a) * np.linalg.norm(b)
        stats["copy_correlation"] = float(np.dot(a, b) / denom) if denom > 0 else 0.0
    return stats


def run_aliasing_experiment(cfg: ExperimentConfig) -> RunResult:
    tasks = [(s, length, seed) for length in cfg.lengths for seed in cfg.seeds for s in cfg.schemes]

    def work(task):
        scheme, length, seed = task
        ch = generate_channel(length, cfg.symbol_rate, cfg.alpha_db_km, cfg.c_f, seed)
        probe = _probe(cfg, scheme)
        est = estimate(simulate_rx(probe, ch, _noise(cfg, seed, cfg.linewidth_hz)))
        return ch, est

    outputs = _pool_map(work, tasks, cfg.workers)
    result = RunResult()
    comment = io.config_comment(cfg.to_dict())
    written_channels = set()
    for (scheme, length, seed), (ch, est) in zip(tasks, outputs):
        tag = f"{_length_tag(length)}_seed{seed}"
        if tag not in written_channels:
            path = _out(cfg, f"channel_{tag}.csv")
            io.write_channel(path, ch, [comment])
            result.files.append(str(path))
            written_channels.add(tag)
        profile = aliasing_profile(est)
        path = _out(cfg, f"aliasing_{scheme.value}_{tag}.csv")
        io.write_profile(path, profile, ch.segment_length, [comment, f"scheme: {scheme.value}"])
        result.files.append(str(path))
        path = _out(cfg, f"response_{scheme.value}_{tag}.csv")
        io.write_response(path, est, [comment])
        result.files.append(str(path))
        result.summary[f"{scheme.value}_{tag}"] = aliasing_stats(profile, min(len(ch), len(profile)))
    return _finish(cfg, "aliasing", result)


# --- time-frequency signatures ---

def ridge_analysis(spec, one_sided: bool = False) -> dict:
    """Ridge track, its linearity and how dominant it is.

    ``confidence`` is the mean fraction of each window's energy held by its
    strongest bin. For real signals only the non-negative half of the bins
    is searched.
    """
    power = spec.magnitudes**2
    w = spec.window_len
    if one_sided:
        power = power[:, : w // 2 + 1]
    ridge = np.argmax(power, axis=1)
    total = np.sum(power, axis=1)
    confidence = float(np.mean(np.max(power, axis=1) / np.where(total > 0, total, 1.0)))
    # the ridge wraps once per period: full circle for complex, half for real
    span = w // 2 if one_sided else w
    track = np.unwrap(ridge * 2 * np.pi / span) * span / (2 * np.pi)
    t = np.arange(track.size)
    if track.size > 1 and np.ptp(track) > 0:
        slope, intercept = np.polyfit(t, track, 1)
        resid = track - (slope * t + intercept)
        r2 = 1.0 - np.sum(resid**2) / np.sum((track - track.mean()) ** 2)
    else:
        slope, r2 = 0.0, 0.0
    return {
        "ridge": ridge,
        "confidence": confidence,
        "has_ridge": confidence >= RIDGE_CONFIDENCE_THRESHOLD,
        "slope_bins_per_window": float(slope),
        "linearity_r2": float(r2),
        "start_bin": int(ridge[0]),
        "end_bin": int(ridge[-1]),
    }


def polarization_separation(ridge_x: np.ndarray, ridge_y: np.ndarray, window_len: int,
                            one_sided: bool = False) -> dict:
    """Median frequency offset between the Y and X ridges.

    Complex signals are compared modulo the full band; for real signals the
    ridges live in ``[0, F_symb/2]`` and the plain absolute offset is used.
    The offset is reported in bins and as a fraction of the symbol rate,
    plus a folded value (the shorter way round the circle).
    """
    diff = ridge_y.astype(int) - ridge_x.astype(int)
    diff = np.abs(diff) if one_sided else np.mod(diff, window_len)
    bins = float(np.median(diff))
    frac = bins / window_len
    return {"bins": bins, "fraction_of_symbol_rate": frac, "folded_fraction": min(frac, 1.0 - frac)}


def tf_signature(probe: DualPolSequence) -> tuple[dict, dict]:
    spec_x = spectrogram(probe.pol_x)
    spec_y = spectrogram(probe.pol_y)
    real = probe.scheme is Scheme.SWEEP
    ax = ridge_analysis(spec_x, one_sided=real)
    ay = ridge_analysis(spec_y, one_sided=real)
    summary = {
        "n_symbols": len(probe),
        "window_len": spec_x.window_len,
        "x": {k: v for k, v in ax.items() if k != "ridge"},
        "y": {k: v for k, v in ay.items() if k != "ridge"},
    }
    if ax["has_ridge"] and ay["has_ridge"]:
        summary["separation"] = polarization_separation(ax["ridge"], ay["ridge"], spec_x.window_len, real)
    return {"x": spec_x, "y": spec_y}, summary


def run_tf_signature(cfg: ExperimentConfig) -> RunResult:
    probes = [_probe(cfg, s, cfg.tf_n_symbols) for s in cfg.schemes]
    outputs = _pool_map(tf_signature, probes, cfg.workers)
    result = RunResult()
    comment = io.config_comment(cfg.to_dict())
    for probe, (specs, summary) in zip(probes, outputs):
        for pol, spec in specs.items():
            path = _out(cfg, f"tf_{probe.scheme.value}_{pol}.csv")
            io.write_spectrogram(path, spec, [comment, f"scheme: {probe.scheme.value}", f"pol: {pol}"])
            result.files.append(str(path))
        result.summary[probe.scheme.value] = summary
    return _finish(cfg, "tf", result)


# --- error versus fiber length ---

def curve_distances(cfg: ExperimentConfig) -> np.ndarray:
    """Evaluation lengths every ``1/curve_points`` of the reference length."""
    seg = cfg.segment_length
    fractions = np.arange(1, cfg.curve_points + 1) / cfg.curve_points
    taps = np.unique([n_segments(f * cfg.curve_max_length, seg) for f in fractions])
    taps = taps[taps >= 2]
    if taps.size == 0:
        raise ConfigError("curve_max_length is shorter than two segments")
    return taps * seg


def portion_errors(probe, ch, n_taps: int, noise: NoiseConfig) -> tuple[float, float]:
    """Mean determinant and phase error when sensing the first ``n_taps`` segments."""
    part = ch.truncate(n_taps)
    est = estimate(simulate_rx(probe, part, noise))
    det_err, ph_err = per_segment_errors(est, part, restrict_to_valid_span=False)
    return float(np.nanmean(det_err)), float(np.nanmean(ph_err))


def run_error_vs_length(cfg: ExperimentConfig) -> RunResult:
    distances = curve_distances(cfg)
    seg = cfg.segment_length
    channels = {
        seed: generate_channel(cfg.curve_max_length, cfg.symbol_rate, cfg.alpha_db_km, cfg.c_f, seed)
        for seed in cfg.seeds
    }
    variants = {"no_pn": 0.0}
    if cfg.linewidth_hz > 0:
        variants["pn"] = cfg.linewidth_hz
    probes = {s: _probe(cfg, s) for s in cfg.schemes}
    tasks = [
        (variant, s, d, seed)
        for variant in variants
        for s in cfg.schemes
        for d in distances
        for seed in cfg.seeds
    ]

    def work(task):
        variant, s, d, seed = task
        n_taps = n_segments(d, seg)
        return portion_errors(probes[s], channels[seed], n_taps, _noise(cfg, seed, variants[variant]))

    values = dict(zip(tasks, _pool_map(work, tasks, cfg.workers)))
    result = RunResult()
    comment = io.config_comment(cfg.to_dict())
    for variant, linewidth in variants.items():
        for s in cfg.schemes:
            errs = np.array([[values[(variant, s, d, seed)] for seed in cfg.seeds] for d in distances])
            curve = ErrorCurve(distances, errs[:, :, 0].mean(axis=1), errs[:, :, 1].mean(axis=1), s,
                               tuple(cfg.seeds), variant)
            path = _out(cfg, f"error_curve_{s.value}_{variant}.csv")
            io.write_error_curve(path, curve, [comment, f"linewidth_hz: {linewidth:g}"])
            result.files.append(str(path))
            result.summary[f"{s.value}_{variant}"] = {
                "max_exact_length_m": _last_exact(curve),
                "final_det_rel_err": float(curve.det_rel_error[-1]),
                "final_phase_err_rad": float(curve.phase_error[-1]),
            }
    return _finish(cfg, "error_curve", result)


def _last_exact(curve: ErrorCurve, threshold: float = 1e-9):
    ok = curve.det_rel_error <= threshold
    if not ok[0]:
        return None
    bad = np.flatnonzero(~ok)
    return float(curve.distances[bad[0] - 1] if bad.size else curve.distances[-1])


def locate_knee(probe: DualPolSequence, ch, threshold: float = 1e-9, noise: NoiseConfig | None = None) -> int:
    """Smallest number of segments whose mean determinant error exceeds ``threshold``.

    Bisection over fiber portions of ``ch``; assumes the error stays below
    the threshold up to the knee. Returns ``len(ch) + 1`` if never exceeded.
    """
    noise = noise or NoiseConfig()

    def bad(n):
        return portion_errors(probe, ch, n, noise)[0] > threshold

    lo, hi = 1, len(ch)
    if not bad(hi):
        return hi + 1
    if bad(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bad(mid):
            hi = mid
        else:
            lo = mid
    return hi
