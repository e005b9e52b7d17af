"""Homogenized limit of the rating dynamics on the spin simplex.

The economy is summarized by (p, q), the population probabilities of a
downgrade and an upgrade outlook; the neutral share is 1 - p - q.  One
map application sends (p, q) to the softmax of the three collective
weights, with the panic amplitude attached to the downgrade channel
from iteration zero.  The collective coupling jtilde absorbs the system
size, so the map itself is size-free.
"""

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class MeanFieldPoint:
    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise InvalidParameterError(
                f"mean-field point must be finite, got ({self.p}, {self.q})")
        if self.p < 0 or self.q < 0 or self.p + self.q > 1:
            raise InvalidParameterError(
                f"({self.p}, {self.q}) lies outside the probability simplex")


@dataclass(frozen=True)
class MeanFieldParams:
    jtilde: float
    h: float = 0.0
    tol: float = 1e-10
    max_iter: int = 100000

    def __post_init__(self):
        if not math.isfinite(self.jtilde):
            raise InvalidParameterError(f"jtilde must be finite, got {self.jtilde}")
        if self.h < 0:
            raise InvalidParameterError(f"h must be >= 0, got {self.h}")
        if self.tol <= 0:
            raise InvalidParameterError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParameterError(
                f"max_iter must be a positive integer, got {self.max_iter}")


def mf_step(point, params):
    """One application of the collective map."""
    a_down = params.jtilde * point.p + params.h
    a_up = params.jtilde * point.q
    a_neutral = params.jtilde * (1.0 - point.p - point.q)
    m = max(a_down, a_up, a_neutral)
    w_down = math.exp(a_down - m)
    w_up = math.exp(a_up - m)
    w_neutral = math.exp(a_neutral - m)
    d = w_down + w_up + w_neutral
    p = w_down / d
    q = w_up / d
    if p + q > 1.0:
        # float rounding at the simplex edge; the exceedance is O(eps)
        q = 1.0 - p
    return MeanFieldPoint(p=p, q=q)


@dataclass(frozen=True)
class FixedPointResult:
    point: MeanFieldPoint
    converged: bool
    iterations: int
    previous: MeanFieldPoint


def mf_fixed_point(start, params):
    """Iterate the map from start until successive points agree within tol
    in max norm, or max_iter applications pass.

    Non-convergence is flagged, not raised; the last two iterates are both
    returned so a cycle shows up as a (point, previous) pair that disagrees.
    iterations counts map applications performed.
    """
    prev = start
    cur = mf_step(prev, params)
    it = 1
    while True:
        if max(abs(cur.p - prev.p), abs(cur.q - prev.q)) < params.tol:
            return FixedPointResult(point=cur, converged=True, iterations=it,
                                    previous=prev)
        if it >= params.max_iter:
            return FixedPointResult(point=cur, converged=False, iterations=it,
                                    previous=prev)
        prev, cur = cur, mf_step(cur, params)
        it += 1


@dataclass(frozen=True)
class BasinCell:
    p0: float
    q0: float
    p_inf: float
    q_inf: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class BasinGrid:
    resolution: int
    cells: list


def basin_map(params, resolution=101):
    """Fixed-point outcome from every start on a uniform simplex grid.

    Starts are (i, j) / (resolution - 1) with i + j <= resolution - 1, so
    resolution counts points per axis and resolution=2 visits exactly the
    three corners.  Cells appear in row-major order over (i, j).
    """
    if not isinstance(resolution, int) or resolution < 2:
        raise InvalidParameterError(
            f"resolution must be an integer >= 2, got {resolution!r}")
    denom = resolution - 1
    cells = []
    for i in range(resolution):
        for j in range(resolution - i):
            start = MeanFieldPoint(p=i / denom, q=j / denom)
            res = mf_fixed_point(start, params)
            cells.append(BasinCell(
                p0=start.p, q0=start.q,
                p_inf=res.point.p, q_inf=res.point.q,
                converged=res.converged, iterations=res.iterations))
    return BasinGrid(resolution=resolution, cells=cells)
