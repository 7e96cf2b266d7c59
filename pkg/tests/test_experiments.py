import json

import numpy as np
import pytest

from pdm_otdr.channel import generate_channel
from pdm_otdr.errors import ConfigError
from pdm_otdr.experiments import (
    ExperimentConfig,
    aliasing_stats,
    curve_distances,
    locate_knee,
    run_aliasing_experiment,
    run_error_vs_length,
    tf_signature,
)
from pdm_otdr.linksim import simulate_rx
from pdm_otdr.metrics import aliasing_profile
from pdm_otdr.receiver import estimate
from pdm_otdr.sequences import probe_for_length


def _profile(scheme, n, length, seed=1):
    ch = generate_channel(length, seed=seed)
    return aliasing_profile(estimate(simulate_rx(probe_for_length(scheme, n), ch))), len(ch)


def test_desk_aliasing_structure():
    prof, support = _profile("cazac", 256, 80)  # 40 taps
    stats = aliasing_stats(prof, support)
    assert stats["copy_correlation"] > 0.99
    golay, _ = _profile("golay", 256, 80)
    np.testing.assert_allclose(golay[:support], prof[:support], rtol=1e-9)


def test_full_scale_aliasing_structure():
    cazac, support = _profile("cazac", 2**14, 8500)
    assert aliasing_stats(cazac, support)["copy_correlation"] > 0.99
    golay, _ = _profile("golay", 2**14, 8500)
    # Golay aliasing is spread over the window instead of forming a copy
    assert aliasing_stats(golay, support)["copy_correlation"] < 0.9
    assert golay[support:].sum() > 0.1 * golay[:support].sum()


def test_tf_signatures_full_length():
    _, cazac = tf_signature(probe_for_length("cazac", 2**16))
    assert cazac["window_len"] == 256
    assert cazac["x"]["has_ridge"] and cazac["x"]["linearity_r2"] > 0.999
    assert cazac["separation"]["bins"] == 128
    _, golay = tf_signature(probe_for_length("golay", 2**16))
    assert not golay["x"]["has_ridge"] and not golay["y"]["has_ridge"]
    assert "separation" not in golay
    _, sweep = tf_signature(probe_for_length("sweep", 2**16))
    assert sweep["x"]["start_bin"] <= 1
    assert sweep["x"]["end_bin"] >= 127
    assert sweep["x"]["linearity_r2"] > 0.99
    assert sweep["separation"]["fraction_of_symbol_rate"] == pytest.approx(0.25, abs=1 / 256)


@pytest.mark.parametrize("scheme,expected", [("golay", 256), ("cazac", 512)])
def test_desk_knees(scheme, expected):
    ch = generate_channel(2 * 700, seed=5)
    first_bad = locate_knee(probe_for_length(scheme, 1024), ch)
    last_exact = first_bad - 1
    assert abs(last_exact - expected) <= 1


def test_error_curve_laser_noise_raises_floor(tmp_path):
    cfg = ExperimentConfig(n_symbols=1024, curve_max_length=1000.0, curve_points=4, seeds=(1, 2),
                           schemes=("golay", "cazac"), out_dir=str(tmp_path))
    summary = run_error_vs_length(cfg).summary
    assert json.loads((tmp_path / "manifest_error_curve.json").read_text())["summary"] == summary
    for s in ("golay", "cazac"):
        assert summary[f"{s}_pn"]["final_phase_err_rad"] >= summary[f"{s}_no_pn"]["final_phase_err_rad"]
    assert summary["golay_no_pn"]["max_exact_length_m"] == 500.0
    assert summary["cazac_no_pn"]["max_exact_length_m"] == 1000.0


def test_curve_distances():
    cfg = ExperimentConfig(curve_max_length=1250.0, curve_points=20)
    d = curve_distances(cfg)
    assert d.size == 20
    assert d[-1] == 1250.0
    assert np.all(np.diff(d) > 0)
    with pytest.raises(ConfigError):
        curve_distances(ExperimentConfig(curve_max_length=2.0))


def test_aliasing_run_summary(tmp_path):
    cfg = ExperimentConfig(n_symbols=256, lengths=(100.0,), seeds=(3,), out_dir=str(tmp_path))
    res = run_aliasing_experiment(cfg)
    assert res.summary["cazac_100m_seed3"]["copy_correlation"] > 0.99
    assert (tmp_path / "channel_100m_seed3.csv").exists()
    assert (tmp_path / "aliasing_golay_100m_seed3.csv").exists()
