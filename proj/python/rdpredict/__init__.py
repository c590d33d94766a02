"""Predictor feedback for reaction-diffusion PDEs with uncertain distributed input delay."""

import json as _json

from ._rdpredict import (
    ConfigError,
    Error,
    InvalidArgument,
    NumericalError,
    __version__,
    fit_decay,
    max_delta,
    paper_delay,
    place_poles,
    run_command,
    small_gain_lhs,
)
from . import _rdpredict


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def eig(config):
    return _rdpredict.eig(_text(config))


def certify(config):
    return _json.loads(_rdpredict.certify_json(_text(config)))


def simulate(config):
    out = _rdpredict.simulate(_text(config))
    out["metadata"] = _json.loads(out["metadata"])
    return out


def sweep(config, deltas):
    return _rdpredict.sweep(_text(config), list(deltas))


def config_hash(config):
    return _rdpredict.config_hash(_text(config))


def resolve_config(config):
    return _json.loads(_rdpredict.resolve_config(_text(config)))


__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "NumericalError",
    "__version__",
    "certify",
    "config_hash",
    "eig",
    "fit_decay",
    "max_delta",
    "paper_delay",
    "place_poles",
    "resolve_config",
    "run_command",
    "simulate",
    "small_gain_lhs",
    "sweep",
]
