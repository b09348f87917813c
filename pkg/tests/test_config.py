import math
from dataclasses import replace

import pytest

from fello_sim.config import (
    ConfigError,
    ScenarioConfig,
    apply_sweep,
    load_config,
    serialize_config,
    validate_config,
)


def write(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_empty_file_yields_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg == ScenarioConfig()
    assert cfg.architectures == ("fello", "cl", "dl")
    assert cfg.master_seed == 42
    assert cfg.n_orbits == 36 and cfg.sats_per_orbit == 20
    assert cfg.lesc_delta_d_km == 2600.0
    assert cfg.lesc_round_time_s is None


def test_parse_and_round_trip(tmp_path):
    text = """
[run]
architectures = fello,dl
master_seed = 7
paper_literal = true
workers = 3

[constellation]
inclination_deg = 53.0

[isl_optics]
pointing_sd_rad = 2e-6

[lesc]
delta_d_km = 2200
recluster_period = inf
round_time_s = 60

[train]
local_epochs = 1

[dataset]
n_classes = 4
n_features = 12
train_per_class = 100
test_per_class = 20
samples_per_client = 50

[corruption]
kind = awgn
awgn_scale = 2.5
"""
    cfg = load_config(write(tmp_path, text))
    assert cfg.architectures == ("fello", "dl")
    assert cfg.paper_literal is True
    assert cfg.inclination_deg == 53.0
    assert cfg.isl_pointing_sd_rad == 2e-6
    assert math.isinf(cfg.lesc_recluster_period)
    assert cfg.lesc_round_time_s == 60.0
    assert cfg.corruption_kind == "awgn"
    echoed = load_config(write(tmp_path, serialize_config(cfg), "echo.cfg"))
    assert echoed == cfg


def test_round_trip_preserves_full_float_precision(tmp_path):
    cfg = replace(ScenarioConfig(), isl_pointing_sd_rad=math.pi * 1e-6,
                  lesc_delta_d_km=2600.000000001)
    echoed = load_config(write(tmp_path, serialize_config(cfg)))
    assert echoed.isl_pointing_sd_rad == cfg.isl_pointing_sd_rad
    assert echoed.lesc_delta_d_km == cfg.lesc_delta_d_km


def test_unknown_section_and_key(tmp_path):
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(write(tmp_path, "[telemetry]\nfoo = 1\n"))
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, "[run]\nverbosity = 3\n"))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.cfg"))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "no section header\n"))


def test_bad_values_name_the_field(tmp_path):
    with pytest.raises(ConfigError, match="inclination"):
        load_config(write(tmp_path, "[constellation]\ninclination_deg = 200\n"))
    with pytest.raises(ConfigError, match="recluster_fraction"):
        load_config(write(tmp_path, "[lesc]\nrecluster_fraction = 0\n"))
    with pytest.raises(ConfigError, match="tx_power_w"):
        load_config(write(tmp_path, "[isl_optics]\ntx_power_w = -1\n"))
    with pytest.raises(ConfigError, match="architecture"):
        load_config(write(tmp_path, "[run]\narchitectures = fello,mesh\n"))
    with pytest.raises(ConfigError, match="duplicate"):
        load_config(write(tmp_path, "[run]\narchitectures = dl,dl\n"))
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(write(tmp_path, "[run]\nmaster_seed = soon\n"))
    with pytest.raises(ConfigError, match="samples_per_client"):
        load_config(write(
            tmp_path,
            "[dataset]\nn_classes = 2\ntrain_per_class = 10\n"
            "samples_per_client = 100\ntest_per_class = 5\nn_features = 4\n",
        ))


def test_mnist_requires_existing_files(tmp_path):
    with pytest.raises(ConfigError, match="train_images"):
        load_config(write(tmp_path, "[dataset]\nkind = mnist\n"))
    text = (
        "[dataset]\nkind = mnist\n"
        f"train_images = {tmp_path}/none.idx\ntrain_labels = {tmp_path}/none.idx\n"
        f"test_images = {tmp_path}/none.idx\ntest_labels = {tmp_path}/none.idx\n"
    )
    with pytest.raises(ConfigError, match="no such file"):
        load_config(write(tmp_path, text))


def test_sweep_parsing_and_validation(tmp_path):
    cfg = load_config(write(
        tmp_path, "[sweep]\nparameter = lesc.delta_d_km\nvalues = 1500, 2200, 2600\n"
    ))
    assert cfg.sweep_parameter == "lesc.delta_d_km"
    assert cfg.sweep_values == (1500.0, 2200.0, 2600.0)
    point = apply_sweep(cfg, cfg.sweep_values[1])
    assert point.lesc_delta_d_km == 2200.0
    assert point.sweep_parameter is None and point.sweep_values == ()
    with pytest.raises(ConfigError, match="addresses no config field"):
        load_config(write(tmp_path, "[sweep]\nparameter = lesc.bogus\nvalues = 1\n"))
    with pytest.raises(ConfigError, match="section.key"):
        load_config(write(tmp_path, "[sweep]\nparameter = rounds\nvalues = 1\n"))
    with pytest.raises(ConfigError, match="without values"):
        load_config(write(tmp_path, "[sweep]\nparameter = lesc.delta_d_km\n"))
    with pytest.raises(ConfigError, match="without sweep.parameter"):
        load_config(write(tmp_path, "[sweep]\nvalues = 1,2\n"))
    # Every sweep point is validated up front.
    with pytest.raises(ConfigError, match="sweep value"):
        load_config(write(
            tmp_path, "[sweep]\nparameter = lesc.delta_d_km\nvalues = 2600, -5\n"
        ))
    with pytest.raises(ConfigError, match="sweep the sweep"):
        load_config(write(tmp_path, "[sweep]\nparameter = sweep.values\nvalues = 1\n"))


def test_sweep_of_int_field_parses_ints(tmp_path):
    cfg = load_config(write(
        tmp_path, "[sweep]\nparameter = train.local_epochs\nvalues = 1,2,4\n"
    ))
    assert cfg.sweep_values == (1, 2, 4)
    assert apply_sweep(cfg, 4).train_local_epochs == 4


def test_validate_config_on_constructed_instances():
    validate_config(ScenarioConfig())
    with pytest.raises(ConfigError, match="workers"):
        validate_config(replace(ScenarioConfig(), workers=0))
    with pytest.raises(ConfigError, match="master_seed"):
        validate_config(replace(ScenarioConfig(), master_seed=-1))
    with pytest.raises(ConfigError, match="at least one"):
        validate_config(replace(ScenarioConfig(), architectures=()))
    with pytest.raises(ConfigError, match="accounting"):
        validate_config(replace(ScenarioConfig(), overhead_accounting="guess"))
    with pytest.raises(ConfigError, match="kind"):
        validate_config(replace(ScenarioConfig(), dataset_kind="cifar"))


def test_builders_mirror_flat_fields():
    cfg = ScenarioConfig()
    walker = cfg.walker()
    assert walker.n_orbits == 36
    assert walker.inclination == pytest.approx(math.radians(70.0))
    assert walker.phasing_factor == "standard"
    assert walker.y_sign == 1.0
    lesc = cfg.lesc()
    assert lesc.delta_d_km == 2600.0
    assert lesc.min_elevation == pytest.approx(math.radians(10.0))
    assert cfg.train().seed == cfg.master_seed
    assert cfg.isl_optics().pointing_sd_rad == 3e-6
    assert cfg.corruption().kind == "none"


def test_paper_literal_switches_the_bundle():
    cfg = replace(ScenarioConfig(), paper_literal=True,
                  isl_snr_mode="electrical", gsl_snr_mode="electrical")
    walker = cfg.walker()
    assert walker.phasing_factor == "paper_literal"
    assert walker.y_sign == -1.0
    # Verbatim-equation mode pins the optical-power SNR form.
    assert cfg.isl_optics().snr_mode == "paper"
    assert cfg.gsl_optics().snr_mode == "paper"
    plain = ScenarioConfig()
    assert plain.isl_optics().snr_mode == "paper"
    electrical = replace(plain, isl_snr_mode="electrical")
    assert electrical.isl_optics().snr_mode == "electrical"
