"""Ensemble statistics and the standard experiments built on them.

Everything here consumes EnsembleResult values or launches ensembles
through the engine; nothing mutates simulation state.  Experiment seeds
are derived from the base master seed with tagged mixing (see seeding)
so that every sweep point or perturbed ensemble is reproducible on its
own, outside the experiment that first ran it.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .engine import run_ensemble
from .errors import InvalidParameterError
from .seeding import SUSCEPTIBILITY_TAG, SWEEP_TAG, derive_seed


def final_defaults(ensemble):
    """Final cumulative default count of every realization, as an array."""
    return np.array([r.nd_trajectory[-1] for r in ensemble.realizations],
                    dtype=np.int64)


@dataclass(frozen=True)
class AggregateStats:
    nd_mean: float
    nd_std: float
    nd_over_n_mean: float
    nd_over_n_std: float
    per_step_means: np.ndarray


def aggregate(ensemble):
    """Sample mean and standard deviation of final defaults, plus the
    per-step mean trajectory.

    Standard deviations use divisor count-1; a single realization gets
    std 0 rather than nan.
    """
    if ensemble.realization_count < 1 or not ensemble.realizations:
        raise InvalidParameterError("cannot aggregate an empty ensemble")
    n = ensemble.params.n
    nd = final_defaults(ensemble).astype(float)
    std = float(nd.std(ddof=1)) if nd.size > 1 else 0.0
    per_step = np.mean(
        [r.nd_trajectory for r in ensemble.realizations], axis=0)
    return AggregateStats(
        nd_mean=float(nd.mean()),
        nd_std=std,
        nd_over_n_mean=float(nd.mean()) / n,
        nd_over_n_std=std / n,
        per_step_means=per_step,
    )


def branch_fraction(ensemble, threshold=0.5):
    """Fraction of realizations whose final default share exceeds threshold.

    The default 0.5 sits between the two branches of the bimodal final
    distribution in the ordered regime.
    """
    if ensemble.realization_count < 1 or not ensemble.realizations:
        raise InvalidParameterError("cannot classify an empty ensemble")
    nd = final_defaults(ensemble)
    return float(np.mean(nd / ensemble.params.n > threshold))


@dataclass(frozen=True)
class SweepPoint:
    value: object
    params: object
    stats: AggregateStats


@dataclass(frozen=True)
class SweepTable:
    axis: str
    points: list


def _with_axis_value(params, axis, value):
    if axis == "j0":
        return replace(params, j0=float(value))
    if axis == "h":
        return replace(params, h=float(value))
    if axis == "n":
        return replace(params, n=int(value))
    if axis == "b":
        return replace(params, bailout_budget=int(value))
    if axis == "p0q0":
        p0, q0 = value
        return replace(params, p0=float(p0), q0=float(q0))
    raise InvalidParameterError(
        f"unknown sweep axis {axis!r}; expected one of j0, h, n, b, p0q0")


def _normalize_values(axis, values):
    if axis == "p0q0":
        out = []
        for v in values:
            pair = tuple(float(x) for x in v)
            if len(pair) != 2:
                raise InvalidParameterError(
                    f"p0q0 sweep values must be pairs, got {v!r}")
            out.append(pair)
        return out
    if axis in ("n", "b"):
        return [int(v) for v in values]
    return [float(v) for v in values]


def sweep(base_params, axis, values, realization_count, workers=None):
    """One ensemble per value along one parameter axis.

    Values are sorted ascending; point k runs under the master seed
    derived as (base seed, sweep tag, k), so a standalone ensemble with
    that seed and the point's parameters reproduces the point bit for
    bit.  All other parameters stay at their base values.
    """
    if not values:
        raise InvalidParameterError("sweep needs at least one value")
    vals = sorted(_normalize_values(axis, values))
    points = []
    for k, v in enumerate(vals):
        seed = derive_seed(base_params.master_seed, SWEEP_TAG, k)
        params = replace(_with_axis_value(base_params, axis, v),
                         master_seed=seed)
        ens = run_ensemble(params, realization_count, workers=workers)
        points.append(SweepPoint(value=v, params=params, stats=aggregate(ens)))
    return SweepTable(axis=axis, points=points)


@dataclass(frozen=True)
class SusceptibilityEstimate:
    j0: float
    chi: float
    chi_std: float
    delta_h: float
    realization_count: int


def susceptibility(params, delta_h=0.01, realization_count=200, paired=True,
                   workers=None):
    """Finite-difference response of the mean default count to the panic
    amplitude, measured at h = 0.

    chi ~ (mean ND at h=delta_h - mean ND at 0) / delta_h, in defaults per
    unit field.  With paired=True both ensembles run the same realization
    substreams (the amplitude only matters after the latch), so the
    difference is taken per realization and chi_std shrinks accordingly.
    Unpaired runs re-seed the perturbed ensemble independently and add
    the two variances.
    """
    if delta_h <= 0:
        raise InvalidParameterError(f"delta_h must be positive, got {delta_h}")
    if params.h != 0:
        raise InvalidParameterError(
            f"susceptibility is defined at h=0; params carry h={params.h}")
    base = run_ensemble(params, realization_count, workers=workers)
    pert_params = replace(params, h=float(delta_h))
    if not paired:
        pert_params = replace(
            pert_params,
            master_seed=derive_seed(params.master_seed, SUSCEPTIBILITY_TAG, 1))
    pert = run_ensemble(pert_params, realization_count, workers=workers)
    nd0 = final_defaults(base).astype(float)
    nd1 = final_defaults(pert).astype(float)
    r = realization_count
    if paired:
        diff = nd1 - nd0
        spread = diff.std(ddof=1) if r > 1 else 0.0
        chi_std = spread / np.sqrt(r) / delta_h
    else:
        v0 = nd0.var(ddof=1) if r > 1 else 0.0
        v1 = nd1.var(ddof=1) if r > 1 else 0.0
        chi_std = np.sqrt(v0 / r + v1 / r) / delta_h
    chi = (nd1.mean() - nd0.mean()) / delta_h
    return SusceptibilityEstimate(
        j0=params.j0, chi=float(chi), chi_std=float(chi_std),
        delta_h=float(delta_h), realization_count=r)


@dataclass(frozen=True)
class RescuePoint:
    b: int
    delta_nd_over_n: float


def rescue_benefit(base_params, b_values, realization_count, workers=None):
    """Default reduction from the bailout budget, per budget value.

    Every budget runs the same master seed as the zero-budget reference,
    and rescue redraws live on a side stream, so the comparison is a
    common-random-numbers difference: delta = (mean ND at B=0 - mean ND
    at B) / n.  The B=0 entry is exactly 0 by construction.
    """
    if not b_values:
        raise InvalidParameterError("rescue_benefit needs at least one budget")
    budgets = sorted({int(b) for b in b_values})
    if budgets[0] < 0:
        raise InvalidParameterError(
            f"bailout budgets must be non-negative, got {budgets[0]}")
    ref_params = replace(base_params, bailout_budget=0)
    ref = run_ensemble(ref_params, realization_count, workers=workers)
    nd_ref = final_defaults(ref).astype(float)
    n = base_params.n
    points = []
    for b in budgets:
        if b == 0:
            delta = 0.0
        else:
            ens = run_ensemble(replace(base_params, bailout_budget=b),
                               realization_count, workers=workers)
            delta = float((nd_ref - final_defaults(ens).astype(float)).mean()) / n
        points.append(RescuePoint(b=b, delta_nd_over_n=delta))
    return points
