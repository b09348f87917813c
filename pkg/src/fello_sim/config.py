"""Scenario configuration: INI surface, defaults, validation, round trip.

One flat frozen dataclass mirrors the config file key for key (angles in
degrees, SI units otherwise); builder methods assemble the domain objects
from it. Serialization echoes every field at full precision via repr, so
a serialized config loads back equal to the original.
"""

import configparser
import io
import math
import os
from dataclasses import dataclass, fields, replace

from .fl_engine import CorruptionSpec, TrainConfig
from .lesc import LescConfig
from .optical_link import OpticalParams
from .orbits import WalkerConfig

ARCHITECTURES = ("fello", "cl", "dl")


class ConfigError(Exception):
    """Bad configuration file or field value."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Flat mirror of the config file; defaults reproduce the stock setup."""

    # [run]
    architectures: tuple = ("fello", "cl", "dl")
    master_seed: int = 42
    output_dir: str = "out"
    paper_literal: bool = False
    workers: int = 1
    # [constellation]
    n_orbits: int = 36
    sats_per_orbit: int = 20
    inclination_deg: float = 70.0
    altitude_km: float = 570.0
    earth_radius_km: float = 6371.0
    # [isl_optics]
    isl_wavelength_m: float = 1.5e-6
    isl_bandwidth_hz: float = 1.25e9
    isl_tx_power_w: float = 0.03
    isl_tx_efficiency: float = 0.8
    isl_rx_efficiency: float = 0.8
    isl_telescope_diameter_m: float = 0.06
    isl_pointing_sd_rad: float = 3e-6
    isl_responsivity_a_per_w: float = 0.6007
    isl_dark_current_a: float = 1e-9
    isl_noise_temp_k: float = 500.0
    isl_load_resistance_ohm: float = 1000.0
    isl_snr_mode: str = "paper"
    isl_ber_scheme: str = "ook"
    isl_ber_fixed: float = 0.0
    # [gsl_optics]
    gsl_wavelength_m: float = 1.5e-6
    gsl_bandwidth_hz: float = 1.25e9
    gsl_tx_power_w: float = 0.03
    gsl_tx_efficiency: float = 0.8
    gsl_rx_efficiency: float = 0.8
    gsl_telescope_diameter_m: float = 0.06
    gsl_pointing_sd_rad: float = 3e-6
    gsl_responsivity_a_per_w: float = 0.6007
    gsl_dark_current_a: float = 1e-9
    gsl_noise_temp_k: float = 500.0
    gsl_load_resistance_ohm: float = 1000.0
    gsl_snr_mode: str = "paper"
    gsl_ber_scheme: str = "ook"
    gsl_ber_fixed: float = 0.0
    # [lesc]
    lesc_threshold_mode: str = "distance"
    lesc_delta_d_km: float = 2600.0
    lesc_delta_gamma: float = 20.0
    lesc_recluster_period: float = 1.0
    lesc_recluster_fraction: float = 0.7
    lesc_gsl_snr_threshold: float = 20.0
    lesc_rounds: int = 40
    lesc_gs_lat_deg: float = 0.0
    lesc_gs_lon_deg: float = 0.0
    lesc_min_elevation_deg: float = 10.0
    lesc_snr_units: str = "db"
    lesc_round_time_s: float = None
    # [train]
    train_learning_rate: float = 0.1
    train_local_epochs: int = 2
    train_batch_size: int = 32
    train_hidden_size: int = 64
    # [dataset]
    dataset_kind: str = "synthetic"
    dataset_n_classes: int = 10
    dataset_n_features: int = 784
    dataset_train_per_class: int = 6000
    dataset_test_per_class: int = 100
    dataset_spread: float = 0.15
    dataset_samples_per_client: int = 2208
    dataset_train_images: str = ""
    dataset_train_labels: str = ""
    dataset_test_images: str = ""
    dataset_test_labels: str = ""
    # [corruption]
    corruption_kind: str = "none"
    corruption_awgn_scale: float = 1.0
    corruption_packet_bits: int = 8192
    # [overhead]
    overhead_accounting: str = "preset"
    overhead_cluster_size: int = 20
    overhead_device_flops: float = 1e12
    overhead_link_rate_bps: float = 1.25e9
    # [sweep]
    sweep_parameter: str = None
    sweep_values: tuple = ()

    def walker(self) -> WalkerConfig:
        kwargs = {}
        if self.paper_literal:
            kwargs = {"phasing_factor": "paper_literal", "y_sign": -1.0}
        return WalkerConfig(
            n_orbits=self.n_orbits,
            sats_per_orbit=self.sats_per_orbit,
            inclination=math.radians(self.inclination_deg),
            altitude_km=self.altitude_km,
            earth_radius_km=self.earth_radius_km,
            **kwargs,
        )

    def _optics(self, prefix: str) -> OpticalParams:
        get = lambda key: getattr(self, prefix + key)
        return OpticalParams(
            wavelength_m=get("wavelength_m"),
            bandwidth_hz=get("bandwidth_hz"),
            tx_power_w=get("tx_power_w"),
            rx_efficiency=get("rx_efficiency"),
            tx_efficiency=get("tx_efficiency"),
            telescope_diameter_m=get("telescope_diameter_m"),
            pointing_sd_rad=get("pointing_sd_rad"),
            responsivity_a_per_w=get("responsivity_a_per_w"),
            dark_current_a=get("dark_current_a"),
            noise_temp_k=get("noise_temp_k"),
            load_resistance_ohm=get("load_resistance_ohm"),
            snr_mode="paper" if self.paper_literal else get("snr_mode"),
            ber_scheme=get("ber_scheme"),
            ber_fixed=get("ber_fixed"),
        )

    def isl_optics(self) -> OpticalParams:
        return self._optics("isl_")

    def gsl_optics(self) -> OpticalParams:
        return self._optics("gsl_")

    def lesc(self) -> LescConfig:
        return LescConfig(
            threshold_mode=self.lesc_threshold_mode,
            delta_d_km=self.lesc_delta_d_km,
            delta_gamma=self.lesc_delta_gamma,
            recluster_period=self.lesc_recluster_period,
            recluster_fraction=self.lesc_recluster_fraction,
            gsl_snr_threshold=self.lesc_gsl_snr_threshold,
            rounds=self.lesc_rounds,
            gs_lat=math.radians(self.lesc_gs_lat_deg),
            gs_lon=math.radians(self.lesc_gs_lon_deg),
            min_elevation=math.radians(self.lesc_min_elevation_deg),
            snr_units=self.lesc_snr_units,
            round_time_s=self.lesc_round_time_s,
        )

    def train(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.train_learning_rate,
            local_epochs=self.train_local_epochs,
            batch_size=self.train_batch_size,
            hidden_size=self.train_hidden_size,
            seed=self.master_seed,
        )

    def corruption(self) -> CorruptionSpec:
        return CorruptionSpec(
            kind=self.corruption_kind,
            awgn_scale=self.corruption_awgn_scale,
            packet_bits=self.corruption_packet_bits,
        )


_OPTICS_SCHEMA = {
    "wavelength_m": "float",
    "bandwidth_hz": "float",
    "tx_power_w": "float",
    "tx_efficiency": "float",
    "rx_efficiency": "float",
    "telescope_diameter_m": "float",
    "pointing_sd_rad": "float",
    "responsivity_a_per_w": "float",
    "dark_current_a": "float",
    "noise_temp_k": "float",
    "load_resistance_ohm": "float",
    "snr_mode": "str",
    "ber_scheme": "str",
    "ber_fixed": "float",
}

# section -> key -> (flat field name, type tag)
SCHEMA = {
    "run": {
        "architectures": ("architectures", "str_list"),
        "master_seed": ("master_seed", "int"),
        "output_dir": ("output_dir", "str"),
        "paper_literal": ("paper_literal", "bool"),
        "workers": ("workers", "int"),
    },
    "constellation": {
        "n_orbits": ("n_orbits", "int"),
        "sats_per_orbit": ("sats_per_orbit", "int"),
        "inclination_deg": ("inclination_deg", "float"),
        "altitude_km": ("altitude_km", "float"),
        "earth_radius_km": ("earth_radius_km", "float"),
    },
    "isl_optics": {k: ("isl_" + k, tag) for k, tag in _OPTICS_SCHEMA.items()},
    "gsl_optics": {k: ("gsl_" + k, tag) for k, tag in _OPTICS_SCHEMA.items()},
    "lesc": {
        "threshold_mode": ("lesc_threshold_mode", "str"),
        "delta_d_km": ("lesc_delta_d_km", "float"),
        "delta_gamma": ("lesc_delta_gamma", "float"),
        "recluster_period": ("lesc_recluster_period", "float"),
        "recluster_fraction": ("lesc_recluster_fraction", "float"),
        "gsl_snr_threshold": ("lesc_gsl_snr_threshold", "float"),
        "rounds": ("lesc_rounds", "int"),
        "gs_lat_deg": ("lesc_gs_lat_deg", "float"),
        "gs_lon_deg": ("lesc_gs_lon_deg", "float"),
        "min_elevation_deg": ("lesc_min_elevation_deg", "float"),
        "snr_units": ("lesc_snr_units", "str"),
        "round_time_s": ("lesc_round_time_s", "float_or_auto"),
    },
    "train": {
        "learning_rate": ("train_learning_rate", "float"),
        "local_epochs": ("train_local_epochs", "int"),
        "batch_size": ("train_batch_size", "int"),
        "hidden_size": ("train_hidden_size", "int"),
    },
    "dataset": {
        "kind": ("dataset_kind", "str"),
        "n_classes": ("dataset_n_classes", "int"),
        "n_features": ("dataset_n_features", "int"),
        "train_per_class": ("dataset_train_per_class", "int"),
        "test_per_class": ("dataset_test_per_class", "int"),
        "spread": ("dataset_spread", "float"),
        "samples_per_client": ("dataset_samples_per_client", "int"),
        "train_images": ("dataset_train_images", "str"),
        "train_labels": ("dataset_train_labels", "str"),
        "test_images": ("dataset_test_images", "str"),
        "test_labels": ("dataset_test_labels", "str"),
    },
    "corruption": {
        "kind": ("corruption_kind", "str"),
        "awgn_scale": ("corruption_awgn_scale", "float"),
        "packet_bits": ("corruption_packet_bits", "int"),
    },
    "overhead": {
        "accounting": ("overhead_accounting", "str"),
        "cluster_size": ("overhead_cluster_size", "int"),
        "device_flops": ("overhead_device_flops", "float"),
        "link_rate_bps": ("overhead_link_rate_bps", "float"),
    },
    "sweep": {
        "parameter": ("sweep_parameter", "str_or_none"),
        "values": ("sweep_values", "raw_list"),
    },
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_value(tag: str, text: str, where: str):
    text = text.strip()
    try:
        if tag == "int":
            return int(text)
        if tag == "float":
            return float(text)
        if tag == "bool":
            return _BOOL_WORDS[text.lower()]
        if tag == "str":
            return text
        if tag == "str_or_none":
            return text or None
        if tag == "float_or_auto":
            return None if text in ("", "auto") else float(text)
        if tag == "str_list":
            return tuple(part.strip() for part in text.split(",") if part.strip())
        if tag == "raw_list":
            return tuple(part.strip() for part in text.split(",") if part.strip())
    except (ValueError, KeyError):
        raise ConfigError(f"{where}: cannot parse {text!r} as {tag}") from None
    raise ConfigError(f"{where}: unknown schema tag {tag}")


def _format_value(tag: str, value) -> str:
    if value is None:
        return ""
    if tag in ("int", "str", "str_or_none"):
        return str(value)
    if tag in ("float", "float_or_auto"):
        return repr(float(value))
    if tag == "bool":
        return "true" if value else "false"
    if tag in ("str_list", "raw_list"):
        return ",".join(_format_value("float", v) if isinstance(v, float)
                        else str(v) for v in value)
    raise ConfigError(f"unknown schema tag {tag}")


def _sweep_target(parameter: str) -> tuple:
    """(flat field, tag) addressed by a section.key sweep path."""
    if "." not in parameter:
        raise ConfigError(f"sweep parameter {parameter!r} must look like section.key")
    section, key = parameter.split(".", 1)
    if section not in SCHEMA or key not in SCHEMA[section]:
        raise ConfigError(f"sweep parameter {parameter!r} addresses no config field")
    if section == "sweep":
        raise ConfigError("cannot sweep the sweep section itself")
    return SCHEMA[section][key]


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate one INI scenario file; defaults fill gaps."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as f:
            parser.read_file(f)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from None
    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, text in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            field, tag = SCHEMA[section][key]
            values[field] = _parse_value(tag, text, f"{path}: [{section}] {key}")
    cfg = ScenarioConfig(**values)
    if cfg.sweep_parameter is not None:
        _, tag = _sweep_target(cfg.sweep_parameter)
        typed = tuple(
            _parse_value(tag, raw, f"{path}: [sweep] values")
            for raw in cfg.sweep_values
        )
        cfg = replace(cfg, sweep_values=typed)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ScenarioConfig) -> None:
    """Reject impossible values with a diagnostic naming the field."""
    if not cfg.architectures:
        raise ConfigError("run.architectures: need at least one architecture")
    for arch in cfg.architectures:
        if arch not in ARCHITECTURES:
            raise ConfigError(f"run.architectures: unknown architecture {arch!r}")
    if len(set(cfg.architectures)) != len(cfg.architectures):
        raise ConfigError("run.architectures: duplicate architecture")
    if cfg.workers < 1:
        raise ConfigError(f"run.workers: must be >= 1, got {cfg.workers}")
    if cfg.master_seed < 0:
        raise ConfigError(f"run.master_seed: must be >= 0, got {cfg.master_seed}")
    for builder, section in (
        (cfg.walker, "constellation"),
        (cfg.isl_optics, "isl_optics"),
        (cfg.gsl_optics, "gsl_optics"),
        (cfg.lesc, "lesc"),
        (cfg.train, "train"),
        (cfg.corruption, "corruption"),
    ):
        try:
            builder()
        except ValueError as e:
            raise ConfigError(f"[{section}] {e}") from None
    if cfg.dataset_kind not in ("synthetic", "mnist"):
        raise ConfigError(f"dataset.kind: unknown kind {cfg.dataset_kind!r}")
    if cfg.dataset_samples_per_client < 1:
        raise ConfigError("dataset.samples_per_client: must be >= 1")
    if cfg.dataset_kind == "synthetic":
        if cfg.dataset_n_classes < 2:
            raise ConfigError("dataset.n_classes: must be >= 2")
        if cfg.dataset_n_features < 1:
            raise ConfigError("dataset.n_features: must be >= 1")
        if cfg.dataset_train_per_class < 1 or cfg.dataset_test_per_class < 1:
            raise ConfigError("dataset.train_per_class/test_per_class: must be >= 1")
        if cfg.dataset_spread <= 0.0:
            raise ConfigError("dataset.spread: must be > 0")
        total = cfg.dataset_n_classes * cfg.dataset_train_per_class
        if cfg.dataset_samples_per_client > total:
            raise ConfigError(
                f"dataset.samples_per_client: {cfg.dataset_samples_per_client} exceeds "
                f"the {total} training samples"
            )
    else:
        for key in ("train_images", "train_labels", "test_images", "test_labels"):
            p = getattr(cfg, "dataset_" + key)
            if not p:
                raise ConfigError(f"dataset.{key}: required for mnist")
            if not os.path.exists(p):
                raise ConfigError(f"dataset.{key}: no such file {p!r}")
    if cfg.overhead_accounting not in ("preset", "analytic"):
        raise ConfigError(
            f"overhead.accounting: unknown mode {cfg.overhead_accounting!r}"
        )
    if cfg.overhead_cluster_size < 1:
        raise ConfigError("overhead.cluster_size: must be >= 1")
    if cfg.overhead_device_flops <= 0.0:
        raise ConfigError("overhead.device_flops: must be > 0")
    if cfg.overhead_link_rate_bps <= 0.0:
        raise ConfigError("overhead.link_rate_bps: must be > 0")
    if cfg.sweep_parameter is not None:
        field, tag = _sweep_target(cfg.sweep_parameter)
        if not cfg.sweep_values:
            raise ConfigError("sweep.values: sweep declared without values")
        for value in cfg.sweep_values:
            try:
                validate_config(apply_sweep(cfg, value))
            except ConfigError as e:
                raise ConfigError(f"sweep value {value!r}: {e}") from None
    elif cfg.sweep_values:
        raise ConfigError("sweep.values: set without sweep.parameter")


def apply_sweep(cfg: ScenarioConfig, value) -> ScenarioConfig:
    """The config with one sweep value substituted and the sweep cleared."""
    field, tag = _sweep_target(cfg.sweep_parameter)
    if isinstance(value, str):
        value = _parse_value(tag, value, f"sweep value for {cfg.sweep_parameter}")
    return replace(cfg, **{field: value, "sweep_parameter": None, "sweep_values": ()})


def serialize_config(cfg: ScenarioConfig) -> str:
    """Full-precision INI echo; load_config parses it back equal."""
    out = io.StringIO()
    for section, keys in SCHEMA.items():
        out.write(f"[{section}]\n")
        for key, (field, tag) in keys.items():
            out.write(f"{key} = {_format_value(tag, getattr(cfg, field))}\n")
        out.write("\n")
    return out.getvalue()
