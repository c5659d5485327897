import pytest

from qpmspdc.config import RunConfig, load_config, parse_config_text, parse_floats, parse_range
from qpmspdc.errors import ConfigError


def test_empty_file_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    cfg = load_config(p)
    assert cfg == RunConfig()
    assert (cfg.pump_wavelength_nm, cfg.poling_period_um, cfg.length_mm) == (532.0, 6.8, 1.0)


def test_negative_length(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("length_mm = -1\n")
    with pytest.raises(ConfigError, match="length_mm"):
        load_config(p)


def test_override_precedence(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("length_mm = 1\ntheta_deg = 80  # comment\n")
    cfg = load_config(p, {"length_mm": 2.0})
    assert cfg.length_mm == 2.0 and cfg.theta_deg == 80.0


def test_unknown_key():
    with pytest.raises(ConfigError, match="line 2.*wavelength"):
        parse_config_text("theta_deg = 1\nwavelength = 3\n")


def test_bad_value_names_key():
    with pytest.raises(ConfigError, match="orders"):
        parse_config_text("orders = one\n")


def test_missing_equals():
    with pytest.raises(ConfigError):
        parse_config_text("theta_deg 80\n")


@pytest.mark.parametrize(
    "overrides",
    [
        {"theta_deg": 91.0},
        {"directions": "sideways"},
        {"beta_mode": "exotic"},
        {"grin_alpha_per_m": -1.0},
        {"poling_period_um": 0.0},
        {"orders": ()},
        {"theta_range_deg": (60.0, 100.0, 1.0)},
    ],
)
def test_validation(overrides):
    with pytest.raises(ConfigError, match=next(iter(overrides))):
        load_config(None, overrides)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_ranges():
    assert parse_range("1:2:0.5") == (1.0, 2.0, 0.5)
    assert parse_floats("880,900") == (880.0, 900.0)
    assert parse_floats("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)
    with pytest.raises(ValueError):
        parse_range("1:2")
    with pytest.raises(ValueError):
        parse_range("2:1:0.1")


def test_provenance_complete():
    prov = RunConfig().provenance()
    assert "output_path" not in prov
    assert prov["orders"] == "-1,1"
    assert prov["theta_range_deg"] == "65:90:0.1"
    assert len(prov) == len(RunConfig.__dataclass_fields__) - 1
