#!/usr/bin/python
#
# Copyright 2026 The wgcn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""This module contains TrainConfig, the flat run configuration, and its JSON form.

Every field has a default, so a config file only names what differs. Values are
resolved in the order: defaults, the WGCN_SEED environment variable (seed only), the
config file, then "key=value" overrides.
"""

import collections
import hashlib
import json
import os

from . import model, reconstruct, util

SEED_VARIABLE = "WGCN_SEED"
SELECTIONS = ("best", "final")


def _boolean(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise ValueError(f"expected true or false, got {value!r}")


def _integer(value):
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def _real(value):
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def _text(value):
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {value!r}")
    return value


def _optional(coerce):
    def coerce_optional(value):
        return None if value is None else coerce(value)

    return coerce_optional


def _widths(value):
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    elif isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    return tuple(_integer(width) for width in value)


# JSON key -> (field name, default, coercion)
_FIELDS = collections.OrderedDict(
    [
        ("dataset", ("dataset", "sbm", _text)),
        ("data_dir", ("data_dir", ".", _text)),
        ("edges", ("edges", None, _optional(_text))),
        ("features", ("features", None, _optional(_text))),
        ("labels", ("labels", None, _optional(_text))),
        ("split", ("split", None, _optional(_text))),
        ("directed", ("directed", False, _boolean)),
        ("normalize_features", ("normalize_features", True, _boolean)),
        ("sbm_block_size", ("sbm_block_size", 50, _integer)),
        ("sbm_blocks", ("sbm_blocks", 2, _integer)),
        ("sbm_p_in", ("sbm_p_in", 0.5, _real)),
        ("sbm_p_out", ("sbm_p_out", 0.02, _real)),
        ("sbm_noise", ("sbm_noise", 0.1, _real)),
        ("num_walks", ("num_walks", 8, _integer)),
        ("walk_length", ("walk_length", 5, _integer)),
        ("alpha", ("alpha", 0.8, _real)),
        ("lambda", ("lam", 0.9, _real)),
        ("symmetrize", ("symmetrize", None, _optional(_boolean))),
        ("distinct_steps", ("distinct_steps", False, _boolean)),
        ("hidden_dims", ("hidden_dims", (16,), _widths)),
        ("learning_rate", ("learning_rate", 0.01, _real)),
        ("epochs", ("epochs", 200, _integer)),
        ("weight_decay", ("weight_decay", 5e-4, _real)),
        ("dropout", ("dropout", 0.5, _real)),
        ("optimizer", ("optimizer", "adam", _text)),
        ("init_seed", ("init_seed", None, _optional(_integer))),
        ("patience", ("patience", 0, _integer)),
        ("select", ("select", "best", _text)),
        ("seed", ("seed", 0, _integer)),
        ("jobs", ("jobs", 1, _integer)),
    ]
)


class TrainConfig(
    collections.namedtuple(
        "TrainConfig", [field for field, _, _ in _FIELDS.values()]
    )
):
    """An immutable, validated run configuration. Use from_dict() to build one from
    JSON keys; note that the mixing coefficient is stored as lam under the JSON key
    "lambda".
    """

    __slots__ = ()

    @classmethod
    def from_dict(cls, values=None):
        """Returns a validated config from a mapping of JSON keys to values. Missing
        keys take their defaults; unknown keys raise a ConfigError.
        """
        values = dict(values or {})
        unknown = sorted(set(values) - set(_FIELDS))
        if unknown:
            raise util.ConfigError(f"Unknown config key(s): {', '.join(unknown)}.")
        fields = {}
        for key, (field, default, coerce) in _FIELDS.items():
            if key not in values:
                fields[field] = default
                continue
            try:
                fields[field] = coerce(values[key])
            except (TypeError, ValueError) as ex:
                raise util.ConfigError(f"Bad value for {key}: {ex}.") from None
        config = cls(**fields)
        config.validate()
        return config

    def to_dict(self):
        """Returns the config as a JSON-compatible dict keyed like a config file."""
        values = collections.OrderedDict()
        for key, (field, _, _) in _FIELDS.items():
            value = getattr(self, field)
            values[key] = list(value) if isinstance(value, tuple) else value
        return values

    def replace(self, **values):
        """Returns a validated copy with the given JSON keys replaced."""
        merged = self.to_dict()
        merged.update(values)
        return TrainConfig.from_dict(merged)

    def validate(self):
        """Raises a UsageError if any value is outside its allowed range."""
        self.recon_config()
        self.hyper_params()
        if self.num_walks < 0:
            raise util.ParameterError(
                f"num_walks must be non-negative, got {self.num_walks}."
            )
        if self.walk_length < 1:
            raise util.ParameterError(
                f"walk_length must be at least 1, got {self.walk_length}."
            )
        if self.seed < 0:
            raise util.ParameterError(f"seed must be non-negative, got {self.seed}.")
        if self.patience < 0:
            raise util.ParameterError("patience must be non-negative.")
        if self.jobs < 1:
            raise util.ParameterError("jobs must be at least 1.")
        if self.select not in SELECTIONS:
            raise util.ParameterError(
                f"select must be one of {', '.join(SELECTIONS)}, got '{self.select}'."
            )
        paths = [self.edges, self.features, self.labels, self.split]
        if any(path is not None for path in paths) and None in paths:
            raise util.ConfigError(
                "Dataset configs need all of edges, features, labels and split."
            )

    def uses_sbm(self):
        return self.edges is None

    def recon_config(self):
        """Returns the reconstruct.ReconConfig; symmetrize defaults to not directed."""
        symmetrize = not self.directed if self.symmetrize is None else self.symmetrize
        return reconstruct.ReconConfig(self.alpha, self.lam, symmetrize)

    def hyper_params(self):
        """Returns the model.HyperParams; the init seed defaults to the run seed."""
        return model.HyperParams(
            hidden_dims=self.hidden_dims,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            weight_decay=self.weight_decay,
            dropout=self.dropout,
            optimizer=self.optimizer,
            init_seed=self.seed if self.init_seed is None else self.init_seed,
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def digest(self):
        """Returns the first 12 hex digits of the SHA-256 of the canonical JSON echo."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()[:12]


def parse_override(text):
    """Returns (key, value) for a "key=value" override. The value is read as a JSON
    literal, falling back to the bare string.
    """
    key, separator, raw = text.partition("=")
    key = key.strip()
    if not separator or not key:
        raise util.ConfigError(f"Overrides must look like key=value, got '{text}'.")
    if key not in _FIELDS:
        raise util.ConfigError(f"Unknown config key: {key}.")
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    return key, value


def load_config(path=None, overrides=(), environ=None):
    """Returns the TrainConfig read from the JSON file at path (if any), with the
    "key=value" overrides applied last.
    """
    environ = os.environ if environ is None else environ
    values = {}
    if environ.get(SEED_VARIABLE):
        try:
            values["seed"] = int(environ[SEED_VARIABLE])
        except ValueError:
            raise util.ConfigError(f"{SEED_VARIABLE} must be an integer.") from None
    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                loaded = json.load(handle)
        except OSError as ex:
            raise util.ConfigError(f"Couldn't read config {path}: {ex}.") from None
        except ValueError as ex:
            raise util.ConfigError(f"{path} is not valid JSON: {ex}.") from None
        if not isinstance(loaded, dict):
            raise util.ConfigError(f"{path} must contain a JSON object.")
        values.update(loaded)
        # relative dataset paths are searched next to the config file
        values.setdefault("data_dir", os.path.dirname(os.path.abspath(path)))
    for override in overrides:
        key, value = parse_override(override)
        values[key] = value
    return TrainConfig.from_dict(values)
