"""Closed-form scalar fields and exponent fields built from config specs.

Function specs are dicts with a ``kind`` key; exponent specs use one of the
keys const / affine / step / csv.  Random fields always carry an explicit
seed so that every run is reproducible from its config echo.
"""

from __future__ import annotations

import numpy as np

from .exponents import VariableExponent, validate_p
from .grid import Grid, GridFunction, read_gridfunction_csv, sample


class ConfigError(ValueError):
    """A malformed or inadmissible configuration; maps to exit code 2."""


def _require_keys(spec: dict, allowed: set[str], context: str) -> None:
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {context}")


def _axis0(grid: Grid, x, y=None):
    return x


def build_function(grid: Grid, spec: dict) -> GridFunction:
    """Build a grid function from a catalog spec."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"function spec must be a dict with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    if kind == "const":
        _require_keys(spec, {"kind", "value"}, "const function spec")
        value = float(spec.get("value", 1.0))
        return sample(grid, (lambda x, y=None: np.full_like(x, value)))
    if kind == "affine":
        _require_keys(spec, {"kind", "a", "b"}, "affine function spec")
        a = float(spec.get("a", 0.0))
        b = float(spec.get("b", 1.0))
        return sample(grid, (lambda x, y=None: a + b * x))
    if kind == "power":
        _require_keys(spec, {"kind", "center", "gamma"}, "power function spec")
        gamma = float(spec.get("gamma", 0.5))
        center = spec.get("center", 0.0)
        if isinstance(center, (int, float)):
            center = [float(center)] * grid.dim
        center = [float(c) for c in center]
        if grid.dim == 1:
            return sample(grid, lambda x: np.abs(x - center[0]) ** gamma)
        return sample(
            grid, lambda x, y: (np.hypot(x - center[0], y - center[1])) ** gamma
        )
    if kind == "step":
        _require_keys(spec, {"kind", "left", "right", "split"}, "step function spec")
        left = float(spec.get("left", 0.0))
        right = float(spec.get("right", 1.0))
        split = float(spec.get("split", 0.5))
        return sample(grid, (lambda x, y=None: np.where(x < split, left, right)))
    if kind == "sine":
        _require_keys(spec, {"kind", "amplitude", "frequency", "offset"}, "sine function spec")
        amp = float(spec.get("amplitude", 1.0))
        freq = float(spec.get("frequency", 1.0))
        off = float(spec.get("offset", 0.0))
        return sample(grid, (lambda x, y=None: off + amp * np.sin(2.0 * np.pi * freq * x)))
    if kind == "random":
        _require_keys(spec, {"kind", "seed", "low", "high"}, "random function spec")
        if "seed" not in spec:
            raise ConfigError("random function spec must carry an explicit seed")
        rng = np.random.default_rng(int(spec["seed"]))
        low = float(spec.get("low", 0.0))
        high = float(spec.get("high", 1.0))
        return GridFunction(grid, rng.uniform(low, high, size=grid.shape))
    raise ConfigError(f"unknown function kind {kind!r}")


def function_label(spec: dict) -> str:
    kind = spec.get("kind", "?")
    if kind == "const":
        return f"const{spec.get('value', 1.0):g}"
    if kind == "affine":
        return f"affine({spec.get('a', 0.0):g},{spec.get('b', 1.0):g})"
    if kind == "power":
        return f"power{spec.get('gamma', 0.5):g}"
    if kind == "step":
        return "step"
    if kind == "sine":
        return "sine"
    if kind == "random":
        return f"random{spec.get('seed', 0)}"
    return str(kind)


def build_exponent(grid: Grid, spec: dict) -> VariableExponent:
    """Build and admit an exponent field from a spec dict."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"exponent spec must be a single-key dict, got {spec!r}")
    ((key, payload),) = spec.items()
    if key == "const":
        value = float(payload)
        field = sample(grid, (lambda x, y=None: np.full_like(x, value)))
    elif key == "affine":
        _require_keys(payload, {"a", "b"}, "affine exponent spec")
        a = float(payload.get("a", 2.0))
        b = float(payload.get("b", 0.0))
        field = sample(grid, (lambda x, y=None: a + b * x))
    elif key == "step":
        _require_keys(payload, {"left", "right", "split"}, "step exponent spec")
        left = float(payload.get("left", 2.0))
        right = float(payload.get("right", 4.0))
        split = float(payload.get("split", 0.5))
        field = sample(grid, (lambda x, y=None: np.where(x < split, left, right)))
    elif key == "csv":
        try:
            field = read_gridfunction_csv(payload, grid)
        except OSError as exc:
            raise ConfigError(f"cannot read exponent csv {payload!r}: {exc}") from exc
    else:
        raise ConfigError(f"unknown exponent spec key {key!r}")
    try:
        return validate_p(field)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def exponent_label(spec: dict) -> str:
    ((key, payload),) = spec.items()
    if key == "const":
        return f"const{float(payload):g}"
    if key == "affine":
        return f"affine({payload.get('a', 2.0):g},{payload.get('b', 0.0):g})"
    if key == "step":
        return f"step({payload.get('left', 2.0):g},{payload.get('right', 4.0):g})"
    return key
