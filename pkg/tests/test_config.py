import pytest

from g2scale.errors import ConfigError

pytestmark = pytest.mark.usefixtures("fresh_config")


def test_defaults(fresh_config):
    assert fresh_config.backend == "exact"
    assert fresh_config.jet_order == 3
    assert fresh_config.as_dict()["points"] == 20


def test_update_coerces_types(fresh_config):
    fresh_config.update(points="7", tol_scale="1e-4", backend="float", seed=None)
    assert fresh_config.points == 7
    assert fresh_config.tol_scale == 1e-4
    assert fresh_config.backend == "float"
    assert fresh_config.seed == 20171


def test_update_rejects_bad_settings(fresh_config):
    with pytest.raises(ConfigError):
        fresh_config.update(colour="red")
    with pytest.raises(ConfigError):
        fresh_config.update(points="many")
    with pytest.raises(ConfigError):
        fresh_config.update(backend="decimal")


def test_load_file(fresh_config, tmp_path):
    path = tmp_path / "g2scale.conf"
    path.write_text("# run settings\npoints = 5\n\nI = -0.75  # submaximal parameter\npoints = 6\n")
    fresh_config.load(str(path))
    assert fresh_config.points == 6
    assert fresh_config.I == -0.75


def test_load_errors_name_the_file(fresh_config, tmp_path):
    with pytest.raises(ConfigError):
        fresh_config.load(str(tmp_path / "missing.conf"))
    path = tmp_path / "broken.conf"
    path.write_text("points 5\n")
    with pytest.raises(ConfigError) as info:
        fresh_config.load(str(path))
    assert "broken.conf:1" in str(info.value)


def test_reset(fresh_config):
    fresh_config.update(points=3, log_level="DEBUG")
    assert fresh_config.reset().points == 20
    assert fresh_config.log_level == "WARNING"
