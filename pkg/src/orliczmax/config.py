"""Configuration parsing: grids, Young functions, fields, and experiment
instances. Invalid configs raise ConfigError with the offending key named.
"""

from __future__ import annotations

import json

import numpy as np

from .field import GridField
from .grid import Domain, Interval
from .young import YoungFunction

DEFAULT_SEED = 0xB5EBA

GRID_DEFAULTS = {"root": [0.0, 1.0], "depth": 6, "padded": True, "shifts": [0.0, 1.0 / 3.0]}


class ConfigError(ValueError):
    """Invalid configuration; message names the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"not valid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(path, str(exc)) from exc


def _reject_unknown(spec: dict, allowed: set, where: str) -> None:
    for key in spec:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}", "unknown key")


def parse_grid(spec: dict | None) -> dict:
    spec = dict(GRID_DEFAULTS if spec is None else {**GRID_DEFAULTS, **spec})
    _reject_unknown(spec, {"root", "depth", "padded", "shifts"}, "grid")
    root = spec["root"]
    if (
        not isinstance(root, (list, tuple))
        or len(root) != 2
        or not all(isinstance(v, (int, float)) for v in root)
        or not root[0] < root[1]
    ):
        raise ConfigError("grid.root", "expected [a, b] with a < b")
    depth = spec["depth"]
    if not isinstance(depth, int) or not 1 <= depth <= 14:
        raise ConfigError("grid.depth", "expected an integer in [1, 14]")
    for s in spec["shifts"]:
        if not (s == 0.0 or abs(s - 1.0 / 3.0) < 1e-9):
            raise ConfigError("grid.shifts", "supported shifts are 0 and 1/3")
    return spec


def build_domain(spec: dict | None, depth: int | None = None) -> Domain:
    spec = parse_grid(spec)
    d = spec["depth"] if depth is None else depth
    root = (float(spec["root"][0]), float(spec["root"][1]))
    if spec["padded"]:
        return Domain.padded(root, d)
    return Domain.single(root, d)


def parse_phi(spec: dict) -> YoungFunction:
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("phi.family", "missing Young-function family")
    fam = spec["family"]
    try:
        if fam == "power":
            _reject_unknown(spec, {"family", "a"}, "phi")
            return YoungFunction.power(spec["a"])
        if fam == "power_log":
            _reject_unknown(spec, {"family", "a", "b"}, "phi")
            return YoungFunction.power_log(spec["a"], spec["b"])
        if fam == "table":
            _reject_unknown(spec, {"family", "points"}, "phi")
            return YoungFunction.from_table(spec["points"])
        if fam == "conjugate_of":
            _reject_unknown(spec, {"family", "base"}, "phi")
            from .young import conjugate

            return conjugate(parse_phi(spec["base"]))
    except ConfigError:
        raise
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"phi.{exc}", "missing or malformed parameter") from exc
    except ValueError as exc:
        raise ConfigError("phi", str(exc)) from exc
    raise ConfigError("phi.family", f"unknown family {fam!r}")


_FIELD_KINDS = {
    "indicator": {"kind", "interval"},
    "constant": {"kind", "value"},
    "power_y": {"kind", "s", "coef"},
    "seeded": {"kind", "seed", "law", "range", "stream", "support"},
    "cells": {"kind", "values"},
    "scale_of_weight": {"kind", "c"},
    "deep_spike": {"kind", "scale"},
}


def build_field(
    spec: dict,
    domain: Domain,
    default_seed: int = DEFAULT_SEED,
    weight: GridField | None = None,
) -> GridField:
    """Construct a field from its JSON spec.

    ``scale_of_weight`` builds c * (the instance weight) and requires the
    weight argument; ``deep_spike`` concentrates growing mass on the deepest
    central dyadic box (negative-control instances).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("field.kind", "missing field kind")
    kind = spec["kind"]
    allowed = _FIELD_KINDS.get(kind)
    if allowed is None:
        raise ConfigError("field.kind", f"unknown kind {kind!r}")
    _reject_unknown(spec, allowed, f"field[{kind}]")
    try:
        if kind == "indicator":
            a, b = spec["interval"]
            return GridField.indicator(domain, Interval(float(a), float(b)))
        if kind == "constant":
            return GridField.constant(domain, float(spec["value"]))
        if kind == "power_y":
            return GridField.power_y(domain, float(spec["s"]), float(spec.get("coef", 1.0)))
        if kind == "seeded":
            seed = spec.get("seed", default_seed)
            if isinstance(seed, str):
                seed = int(seed, 0)
            f = GridField.seeded(
                domain,
                seed,
                stream=int(spec.get("stream", 0)),
                law=spec.get("law", "loguniform"),
                value_range=tuple(spec.get("range", (0.1, 10.0))),
            )
            if spec.get("support", "all") == "central":
                vals = f.values.copy()
                central = len(domain.roots) // 2
                vals[domain.cell_root != central] = 0.0
                return GridField(domain, vals)
            return f
        if kind == "cells":
            return GridField.from_values(domain, spec["values"])
        if kind == "scale_of_weight":
            if weight is None:
                raise ConfigError("field.kind", "scale_of_weight needs a weight in scope")
            return weight.scaled(float(spec["c"]))
        if kind == "deep_spike":
            scale = float(spec.get("scale", 16.0))
            central = len(domain.roots) // 2
            vals = np.zeros(domain.n_cells)
            vals[domain.cell_id(central, domain.depth, 0)] = scale**domain.depth
            return GridField(domain, vals)
    except ConfigError:
        raise
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"field[{kind}]", f"missing or malformed parameter ({exc})") from exc
    except ValueError as exc:
        raise ConfigError(f"field[{kind}]", str(exc)) from exc
    raise AssertionError("unreachable")


def shift_labels(spec: dict | None) -> list[str]:
    spec = parse_grid(spec)
    out = []
    for s in spec["shifts"]:
        out.append("1/3" if abs(s - 1.0 / 3.0) < 1e-9 else "0")
    return out
