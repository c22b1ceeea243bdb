# Copyright 2026 The amris Authors.
# SPDX-License-Identifier: Apache-2.0

from ._core import (
    Config,
    ConfigError,
    GeometryError,
    Trainer,
    aav_power,
    draw_rician,
    emit_plot_data,
    harvested_power,
    load_config,
    los_probability,
    parse_config,
    profile,
    rate,
    ris_steering,
    sweep,
    sweep_axes,
    train,
)

__all__ = [
    "Config",
    "ConfigError",
    "GeometryError",
    "Trainer",
    "aav_power",
    "draw_rician",
    "emit_plot_data",
    "harvested_power",
    "load_config",
    "los_probability",
    "parse_config",
    "profile",
    "rate",
    "ris_steering",
    "sweep",
    "sweep_axes",
    "train",
]
