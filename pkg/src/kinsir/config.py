"""Run configuration: a flat key = value document with a fixed schema.

Lines are `key = value`; blank lines and lines starting with `#` are
skipped. Every key has a documented default, unknown keys are rejected so
typos cannot pass silently, and the resolved configuration (defaults
filled in) can be echoed line by line into output headers.
"""

import math
import os
from dataclasses import dataclass

from .errors import ParseError, ValidationError
from .grids import InitialProfile
from .params import ModelParams

_FLOAT, _INT, _STRING, _FLOAT_LIST = "float", "int", "string", "float list"

# key -> (type, default, description); order defines the echo order
SCHEMA = {
    # model parameters
    "d1": (_FLOAT, 1.0, "death rate of healthy cells"),
    "d2": (_FLOAT, 1.0, "death rate of infected cells"),
    "d3": (_FLOAT, 1.0, "decay rate of virus particles"),
    "beta": (_FLOAT, 1.0, "infection rate"),
    "k": (_FLOAT, 1.0, "virus production rate"),
    "r": (_FLOAT, 2.0, "production rate of healthy cells"),
    "sigma1": (_FLOAT, 1.0, "velocity relaxation rate, healthy cells"),
    "sigma2": (_FLOAT, 1.0, "velocity relaxation rate, infected cells"),
    "sigma3": (_FLOAT, 1.0, "velocity relaxation rate, virus"),
    "chi0": (_FLOAT, 0.0, "velocity bias strength toward the infected gradient"),
    "q1": (_INT, 1, "relaxation scaling exponent, healthy cells"),
    "q2": (_INT, 1, "relaxation scaling exponent, infected cells"),
    "q3": (_INT, 1, "relaxation scaling exponent, virus"),
    "p": (_INT, 1, "bias scaling exponent"),
    "vmax": (_FLOAT, 1.0, "velocity domain half-width"),
    # discretization
    "length": (_FLOAT, 1.0, "periodic domain length"),
    "n_cells": (_INT, 128, "spatial cells"),
    "n_nodes": (_INT, 16, "velocity quadrature nodes (even)"),
    # initial profile
    "profile": (_STRING, "constant", "initial profile: constant, cosine, file"),
    "c0": (_FLOAT, 1.0, "healthy cell baseline"),
    "s0": (_FLOAT, 0.0, "infected cell baseline"),
    "u0": (_FLOAT, 0.0, "virus baseline"),
    "amplitude": (_FLOAT, 0.1, "relative cosine ripple amplitude"),
    "mode": (_INT, 1, "cosine mode number"),
    "profile_file": (_STRING, "", "per-cell profile path (profile = file)"),
    # run control
    "t_final": (_FLOAT, 1.0, "final time"),
    "dt": (_FLOAT, 1e-3, "ode step size"),
    "dt_max": (_FLOAT, 0.0, "macro step cap, 0 = stability bound"),
    "epsilon": (_FLOAT, 0.1, "kinetic scaling parameter"),
    "cfl": (_FLOAT, 0.8, "kinetic transport number, at most 0.9"),
    "snapshot_times": (_FLOAT_LIST, (), "snapshot times, empty = final only"),
    "eps_list": (_FLOAT_LIST, (0.4, 0.2, 0.1, 0.05), "study epsilons"),
    "ref_refine": (_INT, 4, "reference grid refinement factor"),
    "seed": (_INT, 0, "seed reserved for randomized extensions"),
}

_PARAM_KEYS = ("d1", "d2", "d3", "beta", "k", "r", "sigma1", "sigma2",
               "sigma3", "chi0", "q1", "q2", "q3", "p", "vmax")


def _parse_value(kind, text, where):
    try:
        if kind == _FLOAT:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("must be finite")
            return value
        if kind == _INT:
            return int(text)
        if kind == _FLOAT_LIST:
            parts = text.replace(",", " ").split()
            return tuple(float(p) for p in parts)
        return text
    except ValueError as exc:
        raise ParseError(f"{where}: expected {kind}, got {text!r}") from exc


def _format_value(kind, value):
    if kind == _FLOAT:
        return f"{value:.17g}"
    if kind == _FLOAT_LIST:
        return " ".join(f"{v:.17g}" for v in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved configuration: every schema key has a value."""

    values: dict
    params: ModelParams
    profile: InitialProfile

    def __getattr__(self, key):
        if key == "values":  # not yet bound during copying or unpickling
            raise AttributeError(key)
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def resolved_lines(self):
        """One `key = value` line per schema key, in schema order."""
        return [
            f"{key} = {_format_value(SCHEMA[key][0], self.values[key])}"
            for key in SCHEMA
        ]


def parse_config(text, source="<config>", base_dir="."):
    """Parse a key = value document into a validated RunConfig.

    Raises ParseError with line context for syntax problems, unknown or
    duplicate keys, and unreadable values; ValidationError when a value
    violates a model or solver invariant.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{lineno}: expected 'key = value'")
        key, _, rest = line.partition("=")
        key, rest = key.strip(), rest.strip()
        if key not in SCHEMA:
            raise ParseError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = _parse_value(SCHEMA[key][0], rest, f"{source}:{lineno}")

    for key, (_, default, _) in SCHEMA.items():
        values.setdefault(key, default)

    params = ModelParams(**{key: values[key] for key in _PARAM_KEYS})
    profile = _build_profile(values, base_dir)
    _check_run_values(values)
    return RunConfig(values=values, params=params, profile=profile)


def load_config(path):
    """parse_config on a file, resolving profile paths next to it."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path), base_dir=os.path.dirname(path))


def _build_profile(values, base_dir):
    kind = values["profile"]
    if kind == "file":
        path = values["profile_file"]
        if not path:
            raise ValidationError("profile = file needs profile_file")
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        if not os.path.exists(path):
            raise ValidationError(f"profile_file does not exist: {path}")
        return InitialProfile("file", path=path)
    return InitialProfile(
        kind,
        c0=values["c0"], s0=values["s0"], u0=values["u0"],
        amplitude=values["amplitude"], mode=values["mode"],
    )


def _check_run_values(values):
    if values["n_cells"] < 1:
        raise ValidationError("n_cells must be >= 1")
    if values["length"] <= 0:
        raise ValidationError("length must be > 0")
    if values["t_final"] < 0:
        raise ValidationError("t_final must be >= 0")
    if values["dt"] <= 0:
        raise ValidationError("dt must be > 0")
    if values["dt_max"] < 0:
        raise ValidationError("dt_max must be >= 0 (0 means automatic)")
    if not 0 < values["cfl"] <= 0.9:
        raise ValidationError("cfl must be in (0, 0.9]")
    if not 0 < values["epsilon"] <= 1:
        raise ValidationError("epsilon must be in (0, 1]")
    if values["ref_refine"] < 2:
        raise ValidationError("ref_refine must be >= 2")
    if values["seed"] < 0:
        raise ValidationError("seed must be >= 0")
    if any(t < 0 for t in values["snapshot_times"]):
        raise ValidationError("snapshot_times must be >= 0")
