import pytest

from config import presets
from config.settings import load_config_file
from src.analysis import p_critical
from src.core import ConfigError, InstanceParams


def test_config_file_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("version = 1\nsamples = 20   # per point\nmaster-seed = 7\nforced = yes\n")
    assert load_config_file(path) == {"samples": "20", "master_seed": "7", "forced": "yes"}


def test_config_file_needs_a_known_version(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("samples = 20\n")
    with pytest.raises(ConfigError):
        load_config_file(path)
    path.write_text("version = 2\nsamples = 20\n")
    with pytest.raises(ConfigError, match="version"):
        load_config_file(path)


def test_malformed_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("version = 1\njust some words\n")
    with pytest.raises(ConfigError):
        load_config_file(path)


def test_presets_build_valid_params():
    for preset in (presets.BINARY_TRANSITION, presets.TERNARY_TRANSITION,
                   presets.BELOW_THRESHOLD_GROWTH, presets.ABOVE_THRESHOLD_GROWTH,
                   presets.HEAVY_TAIL, presets.THRESHOLD_GAP, presets.COMPETITION):
        InstanceParams(**preset)


def test_above_threshold_tightness_is_above_threshold():
    p_cr = p_critical(presets.ABOVE_THRESHOLD_GROWTH["alpha"], presets.ABOVE_THRESHOLD_GROWTH["r"])
    assert all(p > p_cr for p in presets.ABOVE_THRESHOLD_TIGHTNESS)


def test_golden_thresholds_agree_with_presets():
    for (alpha, r), expected in presets.GOLDEN_THRESHOLDS.items():
        assert p_critical(alpha, r) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("base,grid,n_values", [
    (presets.BINARY_TRANSITION, presets.BINARY_P_GRID, presets.BINARY_TRANSITION_N_VALUES),
    (presets.TERNARY_TRANSITION, presets.TERNARY_P_GRID, presets.TERNARY_TRANSITION_N_VALUES),
])
def test_transition_grids_straddle_threshold(base, grid, n_values):
    p_cr = p_critical(base["alpha"], base["r"])
    assert min(grid) < p_cr < max(grid)
    assert base["p"] == pytest.approx(p_cr, abs=1e-4)
    assert len(n_values) >= 2 and n_values == sorted(set(n_values))
    for n in n_values:
        InstanceParams(**{**base, "n": n})


def test_ternary_transition_is_the_unit_family():
    assert (presets.TERNARY_TRANSITION["alpha"], presets.TERNARY_TRANSITION["r"]) == (1.0, 1.0)
    assert p_critical(1.0, 1.0) == pytest.approx(0.6321, abs=1e-4)
