"""Scenario configuration: loading, per-scenario defaults, strict validation.

Every run is fully described by its defaulted config, which is echoed into
the report so results can be reproduced from the report alone.  Unknown keys
are rejected at every level rather than silently ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .catalog import ConfigError
from .grid import CubeFamilyMode, Grid, make_grid

KNOWN_SCENARIOS = (
    "lemmas",
    "identities",
    "theorem1",
    "theorem2",
    "theorem3",
    "normequiv",
    "counterexamples",
    "all",
)

_TOP_KEYS = {
    "grid",
    "cube_family",
    "beta",
    "exponents",
    "pair_exponents",
    "functions",
    "tolerances",
    "stability_factor",
    "refinements",
}
_GRID_KEYS = {"dim", "cells", "box_origin", "box_side"}
_TOL_KEYS = {"identity_tol", "oracle_tol"}
_FUN_KEYS = {"b", "f"}

_SCENARIO_DEFAULTS: dict[str, dict] = {
    "lemmas": {"cells": 32, "cube_family": "full"},
    "identities": {"cells": 32, "cube_family": "full"},
    "theorem1": {"cells": 32, "cube_family": "dyadic"},
    "theorem2": {"cells": 32, "cube_family": "dyadic"},
    "theorem3": {"cells": 32, "cube_family": "dyadic"},
    "normequiv": {
        "cells": 32,
        "cube_family": "full",
        "refinements": [32, 64, 128],
        "exponents": [
            {"const": 2.0},
            {"const": 4.0},
            {"step": {"left": 2.0, "right": 3.0, "split": 0.5}},
            {"affine": {"a": 2.0, "b": 1.0}},
        ],
        "functions": {"b": [{"kind": "affine", "a": 0.0, "b": 1.0}], "f": []},
    },
    "counterexamples": {
        "cells": 32,
        "cube_family": "dyadic",
        "refinements": [32, 64, 128, 256],
        "exponents": [{"const": 2.0}],
        "functions": {
            "b": [
                {"kind": "const", "value": -1.0},
                {"kind": "step", "left": 0.0, "right": 1.0, "split": 0.5},
            ],
            "f": [],
        },
    },
    "all": {"cells": 32, "cube_family": "full"},
}


@dataclass(frozen=True)
class Tolerances:
    identity_tol: float = 1e-9
    oracle_tol: float = 1e-12


@dataclass
class ScenarioConfig:
    scenario: str
    dim: int
    cells: int
    box_origin: tuple[float, ...]
    box_side: float
    cube_family: CubeFamilyMode
    beta: float
    exponents: list[dict]
    pair_exponents: list[dict]
    functions_b: list[dict]
    functions_f: list[dict]
    tolerances: Tolerances
    stability_factor: float
    refinements: list[int]
    raw: dict

    def build_grid(self, cells: int | None = None) -> Grid:
        n = self.cells if cells is None else cells
        return make_grid(self.dim, n, box_origin=self.box_origin, box_side=self.box_side)

    def echo(self) -> dict:
        return {
            "scenario": self.scenario,
            "grid": {
                "dim": self.dim,
                "cells": self.cells,
                "box_origin": list(self.box_origin),
                "box_side": self.box_side,
            },
            "cube_family": self.cube_family.value,
            "beta": self.beta,
            "exponents": self.exponents,
            "pair_exponents": self.pair_exponents,
            "functions": {"b": self.functions_b, "f": self.functions_f},
            "tolerances": {
                "identity_tol": self.tolerances.identity_tol,
                "oracle_tol": self.tolerances.oracle_tol,
            },
            "stability_factor": self.stability_factor,
            "refinements": self.refinements,
        }


def load_config(path: str) -> dict:
    """Read a JSON config file; any read or parse failure is a config error."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def _default_pair_exponents(dim: int, beta: float) -> list[dict]:
    # Keeps 1 < p and p_+ < dim/beta so the Sobolev-type pair exists.
    d = dim / beta - 1.0
    return [
        {"const": (1.0 + dim / beta) / 2.0},
        {"affine": {"a": 1.0 + d / 4.0, "b": d / 4.0}},
    ]


def _default_functions(beta: float) -> dict:
    return {
        "b": [
            {"kind": "affine", "a": 0.0, "b": 1.0},
            {"kind": "power", "gamma": beta, "center": 0.0},
            {"kind": "sine", "amplitude": 1.0, "frequency": 1.0, "offset": 0.0},
            {"kind": "random", "seed": 7, "low": 0.0, "high": 1.0},
        ],
        "f": [
            {"kind": "const", "value": 1.0},
            {"kind": "step", "left": 0.5, "right": 2.0, "split": 0.5},
            {"kind": "random", "seed": 11, "low": 0.5, "high": 1.5},
        ],
    }


def _check_keys(raw: dict, allowed: set[str], context: str) -> None:
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {context}")


def parse_config(scenario: str, raw: dict | None) -> ScenarioConfig:
    """Overlay user config on scenario defaults and validate everything."""
    if scenario not in KNOWN_SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {KNOWN_SCENARIOS}")
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    defaults = _SCENARIO_DEFAULTS[scenario]

    grid_raw = raw.get("grid", {})
    if not isinstance(grid_raw, dict):
        raise ConfigError("'grid' must be an object")
    _check_keys(grid_raw, _GRID_KEYS, "grid config")
    dim = grid_raw.get("dim", 1)
    cells = grid_raw.get("cells", defaults["cells"])
    if not isinstance(dim, int) or not isinstance(cells, int):
        raise ConfigError("grid dim and cells must be integers")
    box_side = float(grid_raw.get("box_side", 1.0))
    origin_raw = grid_raw.get("box_origin", [0.0, 0.0])
    if isinstance(origin_raw, (int, float)):
        origin_raw = [float(origin_raw)] * 2
    box_origin = tuple(float(c) for c in origin_raw)
    try:
        make_grid(dim, cells, box_origin=box_origin, box_side=box_side)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    family_raw = raw.get("cube_family", defaults["cube_family"])
    try:
        cube_family = CubeFamilyMode.parse(family_raw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    beta = float(raw.get("beta", 0.5))
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")

    exponents = raw.get("exponents", defaults.get("exponents"))
    if exponents is None:
        exponents = [{"const": 2.0}, {"affine": {"a": 2.0, "b": 1.0}}]
    pair_exponents = raw.get("pair_exponents", _default_pair_exponents(dim, beta))
    if not isinstance(exponents, list) or not exponents:
        raise ConfigError("'exponents' must be a nonempty list of exponent specs")
    if not isinstance(pair_exponents, list) or not pair_exponents:
        raise ConfigError("'pair_exponents' must be a nonempty list of exponent specs")

    functions = raw.get("functions", defaults.get("functions", _default_functions(beta)))
    if not isinstance(functions, dict):
        raise ConfigError("'functions' must be an object with keys 'b' and 'f'")
    _check_keys(functions, _FUN_KEYS, "functions config")
    functions_b = functions.get("b", [])
    functions_f = functions.get("f", [])
    if not isinstance(functions_b, list) or not isinstance(functions_f, list):
        raise ConfigError("function banks 'b' and 'f' must be lists of function specs")

    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ConfigError("'tolerances' must be an object")
    _check_keys(tol_raw, _TOL_KEYS, "tolerances config")
    tolerances = Tolerances(
        identity_tol=float(tol_raw.get("identity_tol", 1e-9)),
        oracle_tol=float(tol_raw.get("oracle_tol", 1e-12)),
    )
    if tolerances.identity_tol < 0.0 or tolerances.oracle_tol < 0.0:
        raise ConfigError("tolerances must be nonnegative")

    stability_factor = float(raw.get("stability_factor", 3.0))
    if stability_factor <= 1.0:
        raise ConfigError(f"stability_factor must exceed 1, got {stability_factor}")

    refinements = raw.get("refinements", defaults.get("refinements", [cells]))
    if not isinstance(refinements, list) or not refinements:
        raise ConfigError("'refinements' must be a nonempty list of cell counts")
    for n in refinements:
        if not isinstance(n, int) or n < 2:
            raise ConfigError(f"refinement cell counts must be integers >= 2, got {n!r}")
    if any(b <= a for a, b in zip(refinements, refinements[1:])):
        raise ConfigError("'refinements' must be strictly increasing")

    return ScenarioConfig(
        scenario=scenario,
        dim=dim,
        cells=cells,
        box_origin=box_origin,
        box_side=box_side,
        cube_family=cube_family,
        beta=beta,
        exponents=exponents,
        pair_exponents=pair_exponents,
        functions_b=functions_b,
        functions_f=functions_f,
        tolerances=tolerances,
        stability_factor=stability_factor,
        refinements=refinements,
        raw=raw,
    )
