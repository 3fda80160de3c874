import pytest

from comoving.config import SCHEMA, RunConfig, validate_config
from comoving.errors import ConfigError


def test_defaults_have_no_diagnostics():
    assert validate_config(RunConfig()) == []


def test_parse_comments_and_values():
    cfg = RunConfig.parse("# header\nfield.B_gauss = 250  # weaker\n\nscene.dim=2\n")
    assert cfg["field.B_gauss"] == 250.0 and cfg["scene.dim"] == 2


def test_all_errors_reported_with_lines():
    text = "field.B_gauss = 1\nbogus.key = 3\nscene.dim = 3\nnot an assignment\n"
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse(text, source="run.cfg")
    msg = str(exc.value)
    for line in ("run.cfg:2", "run.cfg:3", "run.cfg:4"):
        assert line in msg
    assert "run.cfg:1" not in msg


@pytest.mark.parametrize("text", ["grid.n = 1.5", "field.B_gauss = nan", "scene.sync = both"])
def test_bad_values(text):
    with pytest.raises(ConfigError):
        RunConfig.parse(text)


def test_override():
    cfg = RunConfig()
    cfg.override("pulse.train=1@0,1.5@1")
    assert cfg.train().terms[1] == (1.5, 1e-3)
    with pytest.raises(ConfigError):
        cfg.override("pulse.train")
    with pytest.raises(ConfigError):
        cfg.override("nope.key=1")


def test_keys_carry_units_or_are_dimensionless():
    unitless = {"atom.M", "atom.lande_g", "atom.mass_u", "pulse.train", "device.phase_reference",
                "scene.dim", "scene.sync", "spectrum.n_points", "run.record_every"}
    for key in SCHEMA:
        section = key.split(".")[0]
        if key in unitless or section in ("grid", "packet", "scaled", "run"):
            continue
        assert "_" in key.split(".")[1], key


def test_pulse_outlasts_region_warning():
    cfg = RunConfig()
    cfg.set("pulse.tau1_ms", 2.0)
    diags = validate_config(cfg)
    assert [d.level for d in diags] == ["warning"]
    assert "pulse outlasts region" in diags[0].message


@pytest.mark.parametrize("key,value", [
    ("grid.n", 1000), ("grid.n", 128), ("packet.sigma", 0.01), ("packet.x0", 240.0),
    ("run.dt", 1e-2), ("atom.M", 3), ("pulse.tau_ms", 0.0), ("pulse.train", "x"),
])
def test_fatal_diagnostics(key, value):
    cfg = RunConfig()
    cfg.set(key, value)
    assert any(d.level == "fatal" for d in validate_config(cfg))


def test_builders_match_defaults():
    cfg = RunConfig()
    scene = cfg.scene()
    assert scene.source_distance == pytest.approx(0.02)
    assert scene.device.lambda_period == pytest.approx(5e-3)
    assert scene.device.signal.B == pytest.approx(0.04)
    assert len(cfg.thetas()) == 24 and cfg.thetas()[-1] == 0.12
    assert cfg.v0_list() == [18.0, 20.0, 22.0]


def test_load_and_dump(tmp_path):
    path = tmp_path / "a.cfg"
    path.write_text(RunConfig().dump())
    assert RunConfig.load(path).values == RunConfig().values
