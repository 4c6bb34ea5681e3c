"""Experiment configuration: sections, INI round-trip, and the built-in presets.

The file format is INI with sections [network], [model], [init], [optimizer],
[mpc], [output].  Unknown sections or keys are rejected.  A config file may be
partial; missing keys keep their current values (the built-in defaults equal
the n15 preset).  Optional keys are written as empty values.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace

from .errors import ConfigurationError, FileFormatError
from .model import NeuronParams
from .mpc import MpcConfig
from .netgen import SbmConfig
from .optimizer import OptimizerSettings
from .warmup import InitConfig

PRESETS = ("n15", "n30")


@dataclass(frozen=True)
class OutputSettings:
    dir: str = "out"
    verbose: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment, keyed by a single seed."""

    network: SbmConfig
    model: NeuronParams
    init: InitConfig
    optimizer: OptimizerSettings
    mpc: MpcConfig
    output: OutputSettings

    @property
    def seed(self) -> int:
        return self.network.seed

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, network=replace(self.network, seed=int(seed)))


def preset_config(name: str, seed: int = 0) -> ExperimentConfig:
    """The two shipped experiment setups (15 and 30 neurons)."""
    if name == "n15":
        network = SbmConfig(
            n=15, sizes=(5, 5, 5), p_within=0.5, p_between=1 / 8,
            inhibitory_fraction=0.2, seed=seed, inhibitory_indices=(6, 9, 13),
        )
    elif name == "n30":
        network = SbmConfig(
            n=30, sizes=(10, 10, 10), p_within=0.5, p_between=1 / 25,
            inhibitory_fraction=0.2, seed=seed,
            inhibitory_indices=(3, 4, 6, 20, 26, 27),
        )
    else:
        raise ConfigurationError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return ExperimentConfig(
        network=network,
        model=NeuronParams(),
        init=InitConfig(),
        optimizer=OptimizerSettings(),
        mpc=MpcConfig(),
        output=OutputSettings(),
    )


def default_config(seed: int = 0) -> ExperimentConfig:
    return preset_config("n15", seed=seed)


# (section, key) -> value type tag, used both to parse and to serialize
_SCHEMA: dict[str, dict[str, str]] = {
    "network": {
        "seed": "int",
        "n": "int",
        "sizes": "ints",
        "p_within": "float",
        "p_between": "float",
        "inhibitory_fraction": "float",
        "inhibitory_indices": "ints_opt",
    },
    "model": {
        "a": "float", "b": "float", "c": "float", "d": "float",
        "i_ex": "float", "i_in": "float", "sigma": "float",
        "firing_threshold": "float", "sigmoid_center": "float", "dt": "float",
        "hard_synapse": "bool",
    },
    "init": {
        "warmup_steps": "int",
        "current_low": "float",
        "current_high": "float",
    },
    "optimizer": {
        "lr": "float", "beta1": "float", "beta2": "float", "epsilon": "float",
        "iterations_per_increment": "int",
        "increments": "ints_opt",
        "multi_start_levels": "floats",
        "clip_low": "float_opt",
        "clip_high": "float_opt",
    },
    "mpc": {
        "horizon": "int",
        "t_switch": "float",
        "t_end": "float",
        "warm_start": "bool",
    },
    "output": {
        "dir": "str",
        "verbose": "bool",
    },
}


def _parse_value(tag: str, text: str, where: str):
    text = text.strip()
    try:
        if tag == "int":
            return int(text)
        if tag == "float":
            return float(text)
        if tag == "float_opt":
            return float(text) if text else None
        if tag == "bool":
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if tag == "ints":
            return tuple(int(s) for s in text.split(","))
        if tag == "ints_opt":
            return tuple(int(s) for s in text.split(",")) if text else None
        if tag == "floats":
            return tuple(float(s) for s in text.split(",")) if text else ()
        if tag == "str":
            return text
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc
    raise AssertionError(f"unhandled tag {tag}")


def _serialize_value(tag: str, value) -> str:
    if value is None:
        return ""
    if tag in ("int", "str"):
        return str(value)
    if tag in ("float", "float_opt"):
        return repr(float(value))
    if tag == "bool":
        return "true" if value else "false"
    if tag in ("ints", "ints_opt"):
        return ",".join(str(int(v)) for v in value)
    if tag == "floats":
        return ",".join(repr(float(v)) for v in value)
    raise AssertionError(f"unhandled tag {tag}")


def config_as_dict(cfg: ExperimentConfig) -> dict:
    """Plain nested dict of all resolved settings (used for the report echo)."""
    sections = {
        "network": cfg.network, "model": cfg.model, "init": cfg.init,
        "optimizer": cfg.optimizer, "mpc": cfg.mpc, "output": cfg.output,
    }
    out: dict[str, dict] = {}
    for name, obj in sections.items():
        out[name] = {}
        for key in _SCHEMA[name]:
            value = getattr(obj, key)
            if isinstance(value, tuple):
                value = list(value)
            out[name][key] = value
    return out


def _build(values: dict) -> ExperimentConfig:
    net = values["network"]
    opt = values["optimizer"]
    return ExperimentConfig(
        network=SbmConfig(
            n=net["n"], sizes=tuple(net["sizes"]), p_within=net["p_within"],
            p_between=net["p_between"],
            inhibitory_fraction=net["inhibitory_fraction"], seed=net["seed"],
            inhibitory_indices=net["inhibitory_indices"],
        ),
        model=NeuronParams(**values["model"]),
        init=InitConfig(**values["init"]),
        optimizer=OptimizerSettings(
            lr=opt["lr"], beta1=opt["beta1"], beta2=opt["beta2"],
            epsilon=opt["epsilon"],
            iterations_per_increment=opt["iterations_per_increment"],
            increments=tuple(opt["increments"]) if opt["increments"] is not None else None,
            multi_start_levels=tuple(opt["multi_start_levels"]),
            clip_low=opt["clip_low"], clip_high=opt["clip_high"],
        ),
        mpc=MpcConfig(**values["mpc"]),
        output=OutputSettings(**values["output"]),
    )


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse an INI file, overlaying its keys on ``base`` (default: n15 preset)."""
    if base is None:
        base = default_config()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise FileFormatError(f"{path}: {exc}") from exc

    values = {
        name: dict(section)
        for name, section in config_as_dict(base).items()
    }
    for section in parser.sections():
        if section not in _SCHEMA:
            raise FileFormatError(
                f"{path}: unknown section [{section}]; "
                f"expected one of {sorted(_SCHEMA)}"
            )
        for key, text in parser[section].items():
            if key not in _SCHEMA[section]:
                raise FileFormatError(
                    f"{path}: unknown key {key!r} in section [{section}]"
                )
            values[section][key] = _parse_value(
                _SCHEMA[section][key], text, f"{path} [{section}] {key}"
            )
    try:
        return _build(values)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def save_config(cfg: ExperimentConfig, path) -> None:
    """Write every resolved setting; load_config(save_config(cfg)) == cfg."""
    parser = configparser.ConfigParser(interpolation=None)
    for section, obj_values in config_as_dict(cfg).items():
        parser[section] = {
            key: _serialize_value(_SCHEMA[section][key], value)
            for key, value in obj_values.items()
        }
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)
