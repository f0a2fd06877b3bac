"""Variable exponents on a grid: admissibility, conjugation, pair building.

An exponent field p(.) is admissible when 1 < p_- <= p_+ < infinity over
the cell centers.  A discrete log-Holder modulus is reported alongside as a
diagnostic: max over cell-center pairs of |p(x) - p(y)| * log(e + 1/|x-y|).
It is computed exactly on small grids and from a seeded pair sample on
large ones, with the choice flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, GridFunction

__all__ = [
    "VariableExponent",
    "ExponentPair",
    "validate_p",
    "conjugate",
    "build_pair",
    "split_exponents",
    "log_holder_constant",
]

# Exact pair sweeps stay cheap up to these grid sizes; beyond them the
# log-Holder modulus falls back to adjacent pairs plus a seeded sample.
_EXACT_PAIRS_DIM1 = 4096
_EXACT_PAIRS_DIM2 = 64
_SAMPLE_PAIRS = 4096


@dataclass
class VariableExponent:
    """Validated exponent field with cached bounds and diagnostics."""

    values: GridFunction
    p_minus: float
    p_plus: float
    log_holder_const: float
    log_holder_exact: bool
    _conjugate: "VariableExponent | None" = field(default=None, repr=False, compare=False)

    @property
    def grid(self) -> Grid:
        return self.values.grid

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus


def _log_holder(values: GridFunction) -> tuple[float, bool]:
    grid = values.grid
    v = values.values
    n = grid.cells_per_axis
    h = grid.spacing
    best = 0.0
    if grid.dim == 1:
        if n <= _EXACT_PAIRS_DIM1:
            for d in range(1, n):
                diff = float(np.max(np.abs(v[d:] - v[:-d])))
                best = max(best, diff * math.log(math.e + 1.0 / (d * h)))
            return best, True
        return _sampled_log_holder(v, grid), False
    if n <= _EXACT_PAIRS_DIM2:
        for di in range(n):
            for dj in range(-(n - 1), n):
                if di == 0 and dj <= 0:
                    continue
                if dj >= 0:
                    diff = np.abs(v[di:, dj:] - v[: n - di, : n - dj])
                else:
                    diff = np.abs(v[di:, :dj] - v[: n - di, -dj:])
                if diff.size == 0:
                    continue
                dist = h * math.hypot(di, dj)
                best = max(best, float(diff.max()) * math.log(math.e + 1.0 / dist))
        return best, True
    return _sampled_log_holder(v, grid), False


def _sampled_log_holder(v: np.ndarray, grid: Grid) -> float:
    n = grid.cells_per_axis
    h = grid.spacing
    best = 0.0
    # All adjacent pairs first: they carry the largest log weight.
    if grid.dim == 1:
        flat = v.reshape(-1)
        best = float(np.max(np.abs(flat[1:] - flat[:-1]))) * math.log(math.e + 1.0 / h)
        coords = np.arange(n).reshape(-1, 1)
        flatv = flat
    else:
        w = math.log(math.e + 1.0 / h)
        best = max(
            float(np.max(np.abs(v[1:, :] - v[:-1, :]))) * w,
            float(np.max(np.abs(v[:, 1:] - v[:, :-1]))) * w,
        )
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        coords = np.column_stack([ii.reshape(-1), jj.reshape(-1)])
        flatv = v.reshape(-1)
    rng = np.random.default_rng(0)
    m = coords.shape[0]
    a = rng.integers(0, m, size=_SAMPLE_PAIRS)
    b = rng.integers(0, m, size=_SAMPLE_PAIRS)
    keep = a != b
    a, b = a[keep], b[keep]
    dist = h * np.sqrt(((coords[a] - coords[b]) ** 2).sum(axis=1))
    weights = np.log(math.e + 1.0 / dist)
    best = max(best, float(np.max(np.abs(flatv[a] - flatv[b]) * weights)))
    return best


def validate_p(p: GridFunction) -> VariableExponent:
    """Admit an exponent field, rejecting p_- <= 1 with the cell named."""
    v = p.values
    p_minus = float(v.min())
    p_plus = float(v.max())
    if p_minus <= 1.0:
        bad = np.argwhere(v <= 1.0)[0]
        cell = tuple(int(i) for i in bad)
        raise ValueError(
            f"exponent class violation: admissibility requires 1 < p_-, "
            f"got p({cell}) = {v[tuple(bad)]:g}"
        )
    if not np.isfinite(p_plus):
        raise ValueError("exponent class violation: p_+ must be finite")
    const, exact = _log_holder(p)
    return VariableExponent(p, p_minus, p_plus, const, exact)


def conjugate(p: VariableExponent) -> VariableExponent:
    """Pointwise conjugate p'(x) = p(x)/(p(x)-1); an involution."""
    if p._conjugate is None:
        vals = p.values.values
        conj = validate_p(p.values.with_values(vals / (vals - 1.0)))
        conj._conjugate = p
        p._conjugate = conj
    return p._conjugate


def log_holder_constant(p: VariableExponent) -> float:
    """Discrete log-Holder modulus recorded at validation time."""
    return p.log_holder_const


@dataclass(frozen=True)
class ExponentPair:
    """Pair (p, q) coupled by 1/q = 1/p - beta/dim on every cell."""

    p: VariableExponent
    q: VariableExponent
    beta: float
    q0_check: float


def build_pair(p: VariableExponent, beta: float) -> ExponentPair:
    """Derive q from p via 1/q(x) = 1/p(x) - beta/dim.

    Requires 0 < beta < dim/p_+ so that q stays finite, and checks the
    induced lower bound q_- (dim - beta)/dim > 1 which the recovered
    exponent pair relies on.
    """
    dim = p.grid.dim
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if beta >= dim / p.p_plus:
        raise ValueError(
            f"pair construction needs beta < dim/p_+ = {dim / p.p_plus:g}, got beta = {beta:g}"
        )
    pv = p.values.values
    qv = dim * pv / (dim - beta * pv)
    q = validate_p(p.values.with_values(qv))
    resid = np.max(np.abs(1.0 / qv - (1.0 / pv - beta / dim)))
    if resid > 1e-12:
        raise AssertionError(f"pair identity drift {resid:g} exceeds 1e-12")
    q0_check = q.p_minus * (dim - beta) / dim
    if q0_check <= 1.0:
        raise ValueError(
            f"recovered exponent q_-(dim-beta)/dim = {q0_check:g} must exceed 1"
        )
    return ExponentPair(p, q, float(beta), q0_check)


def split_exponents(
    q: VariableExponent, beta: float, r: float
) -> tuple[VariableExponent, VariableExponent, VariableExponent]:
    """Split q for the norm-product argument: returns (q0, r'q, p0).

    q0 = r q and r' q with 1/r + 1/r' = 1 give the two Holder factors,
    and p0 solves 1/p0 = 1/q0 + beta/dim.  Requires r > dim/(dim - beta)
    strictly, which keeps p0 admissible.
    """
    dim = q.grid.dim
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    threshold = dim / (dim - beta)
    if not r > threshold:
        raise ValueError(f"splitting needs r > dim/(dim-beta) = {threshold:g}, got r = {r:g}")
    r_prime = r / (r - 1.0)
    qv = q.values.values
    q0 = validate_p(q.values.with_values(r * qv))
    r_conj_q = validate_p(q.values.with_values(r_prime * qv))
    p0_vals = 1.0 / (1.0 / (r * qv) + beta / dim)
    p0 = validate_p(q.values.with_values(p0_vals))
    return q0, r_conj_q, p0
