"""Modulars and Luxemburg norms for variable exponents on a grid.

The modular of f is sum over cells of |f(c)|^p(c) * h^dim, and the norm is
the unique lambda > 0 with modular(f/lambda) = 1, found by a doubling or
halving bracket seeded at max|f| followed by plain bisection.  The modular
is strictly decreasing in lambda, so the bracket is safe; 1e-12 relative
bracket width keeps |modular(f/value) - 1| below 1e-10 for the exponent
ranges this laboratory sweeps.

Also here: the norm identities that admit explicit discrete constants and
therefore hard checks, namely the generalized Holder inequality with
constant r_p = 1 + 1/p_- - 1/p_+, the power scaling |||f|^s||_p = ||f||^s_{sp},
and the indicator duality and embedding ratios on cubes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exponents import ExponentPair, VariableExponent, conjugate
from .grid import Cube, GridFunction, check_cube

__all__ = [
    "NormResult",
    "ConvergenceError",
    "modular",
    "lux_norm",
    "holder_constant",
    "holder_defect",
    "check_s_norm",
    "cube_duality_product",
    "cube_embedding_ratio",
]

MAX_ITERATIONS = 200
BRACKET_REL_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Raised when the norm bisection exhausts its budget; carries the bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (bracket [{bracket[0]:g}, {bracket[1]:g}])")
        self.bracket = bracket


@dataclass
class NormResult:
    """Bisection outcome: value plus the evidence it converged."""

    value: float
    iterations: int
    bracket: tuple[float, float]
    converged: bool

    def __float__(self) -> float:
        return self.value


def _check_same_grid(f: GridFunction, p: VariableExponent) -> None:
    if f.grid != p.grid:
        raise ValueError("function and exponent live on different grids")


def _modular_at(abs_vals: np.ndarray, p_vals: np.ndarray, cell_measure: float, lam: float) -> float:
    with np.errstate(over="ignore"):
        total = float(np.sum(np.power(abs_vals / lam, p_vals))) * cell_measure
    return total


def modular(f: GridFunction, p: VariableExponent) -> float:
    """sum |f(c)|^p(c) h^dim over all cells."""
    _check_same_grid(f, p)
    return _modular_at(np.abs(f.values), p.values.values, f.grid.cell_measure, 1.0)


def _lux_solve(abs_vals: np.ndarray, p_vals: np.ndarray, cell_measure: float) -> NormResult:
    """Core solver on raw arrays; support may be a cube slice of the grid."""
    top = float(abs_vals.max(initial=0.0))
    if top == 0.0:
        return NormResult(0.0, 0, (0.0, 0.0), True)
    evals = 0

    def phi(lam: float) -> float:
        nonlocal evals
        evals += 1
        return _modular_at(abs_vals, p_vals, cell_measure, lam)

    lam = top
    value = phi(lam)
    if value == 1.0:
        return NormResult(lam, evals, (lam, lam), True)
    if value > 1.0:
        lo = lam
        hi = 2.0 * lam
        while phi(hi) > 1.0:
            lo, hi = hi, 2.0 * hi
            if evals > MAX_ITERATIONS:
                raise ConvergenceError("bracket expansion exhausted", (lo, hi))
    else:
        hi = lam
        lo = 0.5 * lam
        while phi(lo) < 1.0:
            lo, hi = 0.5 * lo, lo
            if evals > MAX_ITERATIONS:
                raise ConvergenceError("bracket contraction exhausted", (lo, hi))
    # Invariant: phi(lo) >= 1 >= phi(hi).
    while hi - lo > BRACKET_REL_TOL * hi and evals < MAX_ITERATIONS:
        mid = 0.5 * (lo + hi)
        if phi(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    converged = hi - lo <= BRACKET_REL_TOL * hi
    if not converged:
        raise ConvergenceError("bisection budget exhausted", (lo, hi))
    return NormResult(0.5 * (lo + hi), evals, (lo, hi), True)


def _lux_solve_batch(abs_rows: np.ndarray, p_rows: np.ndarray, cell_measure: float) -> np.ndarray:
    """Solve many independent supports at once, one row each.

    Same bracket-and-bisect scheme as _lux_solve, advanced in lockstep
    across rows; rows that converge early just keep tightening.
    """
    out = np.zeros(abs_rows.shape[0])
    top = abs_rows.max(axis=1, initial=0.0)
    live = top > 0.0
    if not live.any():
        return out
    vals = abs_rows[live]
    pows = p_rows[live]

    def phi(lam: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.sum(np.power(vals / lam[:, None], pows), axis=1) * cell_measure

    lo = top[live].copy()
    hi = top[live].copy()
    for _ in range(MAX_ITERATIONS):
        high = phi(hi)
        if not (high > 1.0).any():
            break
        hi = np.where(high > 1.0, 2.0 * hi, hi)
    else:
        raise ConvergenceError("bracket expansion exhausted", (float(lo.min()), float(hi.max())))
    for _ in range(MAX_ITERATIONS):
        low = phi(lo)
        if not (low < 1.0).any():
            break
        lo = np.where(low < 1.0, 0.5 * lo, lo)
    else:
        raise ConvergenceError("bracket contraction exhausted", (float(lo.min()), float(hi.max())))
    # Invariant per row: phi(lo) >= 1 >= phi(hi).
    for _ in range(MAX_ITERATIONS):
        if not (hi - lo > BRACKET_REL_TOL * hi).any():
            break
        mid = 0.5 * (lo + hi)
        above = phi(mid) >= 1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    else:
        raise ConvergenceError("bisection budget exhausted", (float(lo.min()), float(hi.max())))
    out[live] = 0.5 * (lo + hi)
    return out


def lux_norm(f: GridFunction, p: VariableExponent) -> NormResult:
    """Luxemburg norm of f under exponent p."""
    _check_same_grid(f, p)
    return _lux_solve(np.abs(f.values), p.values.values, f.grid.cell_measure)


def holder_constant(p: VariableExponent) -> float:
    """Explicit constant r_p = 1 + 1/p_- - 1/p_+ of the generalized Holder bound."""
    return 1.0 + 1.0 / p.p_minus - 1.0 / p.p_plus


def holder_defect(f: GridFunction, g: GridFunction, p: VariableExponent) -> float:
    """r_p ||f||_p ||g||_p' minus the integral of |f g|; nonnegative up to rounding."""
    _check_same_grid(f, p)
    _check_same_grid(g, p)
    pc = conjugate(p)
    product = float(np.sum(np.abs(f.values * g.values))) * f.grid.cell_measure
    return holder_constant(p) * lux_norm(f, p).value * lux_norm(g, pc).value - product


def check_s_norm(f: GridFunction, p: VariableExponent, s: float) -> float:
    """| |||f|^s||_p - ||f||^s_{sp} | for the power scaling identity.

    The scaled exponent only needs (s p)_- >= 1, weaker than admissibility,
    so it is taken on raw values here instead of through validate_p.
    """
    _check_same_grid(f, p)
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    p_vals = p.values.values
    scaled = s * p_vals
    if scaled.min() < 1.0:
        raise ValueError(
            f"scaled exponent leaves the admissible range: (s p)_- = {scaled.min():g} < 1"
        )
    abs_vals = np.abs(f.values)
    cm = f.grid.cell_measure
    lhs = _lux_solve(abs_vals**s, p_vals, cm).value
    rhs = _lux_solve(abs_vals, scaled, cm).value ** s
    return abs(lhs - rhs)


def _indicator_norm_on_cube(cube: Cube, p: VariableExponent) -> float:
    sl = cube.slices()
    ones = np.ones((cube.side_cells,) * p.grid.dim)
    return _lux_solve(ones, p.values.values[sl], p.grid.cell_measure).value


def cube_duality_product(cube: Cube, q: VariableExponent) -> float:
    """(1/|Q|) ||chi_Q||_q ||chi_Q||_q'; equals 1 exactly for constant q."""
    check_cube(q.grid, cube)
    qc = conjugate(q)
    meas = cube.measure(q.grid)
    return _indicator_norm_on_cube(cube, q) * _indicator_norm_on_cube(cube, qc) / meas


def cube_embedding_ratio(cube: Cube, pair: ExponentPair) -> float:
    """||chi_Q||_p / (|Q|^{beta/dim} ||chi_Q||_q); equals 1 for constant pairs."""
    check_cube(pair.p.grid, cube)
    meas = cube.measure(pair.p.grid)
    dim = pair.p.grid.dim
    num = _indicator_norm_on_cube(cube, pair.p)
    den = meas ** (pair.beta / dim) * _indicator_norm_on_cube(cube, pair.q)
    return num / den


def embedding_bound(pair: ExponentPair) -> float:
    """Derived hard bound for the embedding ratio on any cube.

    Young's inequality with the pointwise split 1/p = 1/q + beta/dim gives
    modular control with factor sup(p/q) + sup(p beta/dim), hence the ratio
    is at most that factor to the power 1/p_-.  For constant pairs the
    factor is exactly 1.
    """
    pv = pair.p.values.values
    qv = pair.q.values.values
    dim = pair.p.grid.dim
    s = float(np.max(pv / qv)) + float(np.max(pv * pair.beta / dim))
    return s ** (1.0 / pair.p.p_minus)
