"""Flat key=value experiment config files.

Schema (version 1). Lines are ``key=value``; ``#`` starts a comment; blank
lines are ignored. Unknown keys are rejected. Tuples are comma-separated.

    config_version=1
    strategy=gaal|simple_gan|svm_active|random|supervised|mixed
    init_size=50
    batch_size=10
    budget=100
    oracle=ground_truth|nearest_neighbor|human
    oracle.skip_radius=<float>            # optional; default derived
    seeds=0,1,2
    image_shape=28,28                     # optional
    dataset.kind=two_gaussians|idx
    # two_gaussians:
    dataset.n, dataset.test_n, dataset.seed, dataset.sigma,
    dataset.mean_pos, dataset.mean_neg,
    dataset.shift.translation, dataset.shift.noise_sigma,
    dataset.shift.rotation_angle
    # idx:
    dataset.train_images, dataset.train_labels,
    dataset.test_images, dataset.test_labels, dataset.class_a, dataset.class_b
    gan.epochs, gan.batch_size, gan.d_steps, gan.learning_rate,
    gan.beta1, gan.beta2, gan.seed, gan.latent_dim, gan.hidden, gan.checkpoint
    svm.regularization, svm.epochs, svm.schedule, svm.project
    synth.steps, synth.restarts, synth.learning_rate, synth.momentum,
    synth.diversity_weight, synth.diversity_sigma
"""

from __future__ import annotations

import dataclasses

from gaal.datasets import ShiftSpec
from gaal.errors import ConfigError
from gaal.experiment import ExperimentConfig, IdxSpec, TwoGaussiansSpec

CONFIG_VERSION = "1"


def _parse_lines(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _floats(value: str) -> tuple:
    return tuple(float(v) for v in value.split(",") if v.strip())


def _ints(value: str) -> tuple:
    return tuple(int(v) for v in value.split(",") if v.strip())


def _bool(value: str) -> bool:
    if value.lower() in ("true", "1", "yes"):
        return True
    if value.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def parse_config(text: str) -> ExperimentConfig:
    pairs = _parse_lines(text)
    version = pairs.pop("config_version", None)
    if version != CONFIG_VERSION:
        raise ConfigError(f"config_version must be {CONFIG_VERSION}, got {version!r}")

    config = ExperimentConfig()
    kind = pairs.pop("dataset.kind", "two_gaussians")
    if kind == "two_gaussians":
        config.dataset = TwoGaussiansSpec()
    elif kind == "idx":
        config.dataset = IdxSpec()
    else:
        raise ConfigError(f"unknown dataset.kind {kind!r}")

    shift_keys = {k: v for k, v in pairs.items() if k.startswith("dataset.shift.")}
    if shift_keys:
        if kind != "two_gaussians":
            raise ConfigError("dataset.shift applies to two_gaussians only")
        shift = ShiftSpec()
        for key, value in shift_keys.items():
            del pairs[key]
            field = key.removeprefix("dataset.shift.")
            if field == "translation":
                shift.translation = _floats(value)
            elif field == "noise_sigma":
                shift.noise_sigma = float(value)
            elif field == "rotation_angle":
                shift.rotation_angle = float(value)
            else:
                raise ConfigError(f"unknown key dataset.shift.{field}")
        config.dataset.shift = shift

    setters = {
        "strategy": lambda v: setattr(config, "strategy", v),
        "init_size": lambda v: setattr(config, "init_size", int(v)),
        "batch_size": lambda v: setattr(config, "batch_size", int(v)),
        "budget": lambda v: setattr(config, "budget", int(v)),
        "oracle": lambda v: setattr(config, "oracle", v),
        "oracle.skip_radius": lambda v: setattr(config, "skip_radius", float(v)),
        "seeds": lambda v: setattr(config, "seeds", _ints(v)),
        "image_shape": lambda v: setattr(config, "image_shape", _ints(v)),
    }
    dataset_fields = {
        "two_gaussians": {
            "n": int, "test_n": int, "seed": int, "sigma": float,
            "mean_pos": _floats, "mean_neg": _floats,
        },
        "idx": {
            "train_images": str, "train_labels": str,
            "test_images": str, "test_labels": str,
            "class_a": int, "class_b": int,
        },
    }[kind]
    sub_fields = {
        "gan": {
            "epochs": int, "batch_size": int, "d_steps": int,
            "learning_rate": float, "beta1": float, "beta2": float,
            "seed": int, "latent_dim": int, "hidden": int, "checkpoint": str,
        },
        "svm": {
            "regularization": float, "epochs": int, "schedule": str,
            "project": _bool, "seed": int,
        },
        "synth": {
            "steps": int, "restarts": int, "learning_rate": float,
            "momentum": float, "diversity_weight": float,
            "diversity_sigma": float, "seed": int,
        },
    }

    for key, value in pairs.items():
        if key in setters:
            setters[key](value)
            continue
        prefix, _, field = key.partition(".")
        if prefix == "dataset" and field in dataset_fields:
            setattr(config.dataset, field, dataset_fields[field](value))
        elif prefix in sub_fields and field in sub_fields[prefix]:
            setattr(getattr(config, prefix), field, sub_fields[prefix][field](value))
        else:
            raise ConfigError(f"unknown config key {key!r}")

    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(config: ExperimentConfig) -> str:
    """Render a config back to the flat format (parse round-trips)."""
    lines = [f"config_version={CONFIG_VERSION}"]

    def emit(key, value):
        if value is None or value == "":
            return
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (tuple, list)):
            value = ",".join(format(v, "g") if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = format(value, ".17g")
        lines.append(f"{key}={value}")

    emit("strategy", config.strategy)
    emit("init_size", config.init_size)
    emit("batch_size", config.batch_size)
    emit("budget", config.budget)
    emit("oracle", config.oracle)
    emit("oracle.skip_radius", config.skip_radius)
    emit("seeds", tuple(config.seeds))
    if config.image_shape:
        emit("image_shape", tuple(config.image_shape))
    emit("dataset.kind", config.dataset.kind)
    ds = config.dataset
    if ds.kind == "two_gaussians":
        for name in ("n", "test_n", "seed", "sigma", "mean_pos", "mean_neg"):
            emit(f"dataset.{name}", getattr(ds, name))
        if ds.shift is not None:
            emit("dataset.shift.translation", ds.shift.translation)
            emit("dataset.shift.noise_sigma", ds.shift.noise_sigma)
            emit("dataset.shift.rotation_angle", ds.shift.rotation_angle)
    else:
        for name in ("train_images", "train_labels", "test_images", "test_labels",
                     "class_a", "class_b"):
            emit(f"dataset.{name}", getattr(ds, name))
    for prefix in ("gan", "svm", "synth"):
        section = getattr(config, prefix)
        for f in dataclasses.fields(section):
            emit(f"{prefix}.{f.name}", getattr(section, f.name))
    return "\n".join(lines) + "\n"
