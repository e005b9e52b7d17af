"""Time stepping and seeded ensembles.

One time step is a sweep of exactly n single-firm updates on firms drawn
uniformly with replacement.  Every selected firm redraws its spin, whether
its rating can still move or not; a defaulted firm's rating stays at 0.
The panic latch is re-examined after every single update, so a default in
the middle of a sweep biases the remainder of that same sweep.  A rescue,
while budget remains, fires at the instant a firm hits rating 0 and before
the default is observed anywhere: the firm re-enters with a uniform rating
in 1..7 and a uniform spin, the defaults counter stays put and the panic
field is not latched by that event.

Draw order per sweep, fixed so runs replay bit for bit: first a block of n
firm selections, then a block of n spin uniforms (one consumed per update,
in order), then, from the realization's rescue stream, one block of rating
redraws and one of spin redraws, each sized by the remaining budget (empty
when the budget is exhausted or zero).  With a zero budget no rescue draws
ever happen, so trajectories are bit-identical to a build without the
rescue mechanism.

Initialization draw order: ratings uniform on 1..7 (one block), then n
uniforms mapped u < p0 -> -1, u < p0 + q0 -> +1, else 0.
"""

import os
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Optional

import numpy as np

from . import _kernel
from .errors import InvalidParameterError
from .model import EconomyState, ModelParams, N_GRADES, sample_coupling_matrix
from .seeding import realization_streams

WORKERS_ENV = "CASCADE_SIM_WORKERS"


@dataclass
class RealizationResult:
    """Per-realization observables.

    nd_trajectory[t] is the cumulative default count after step t, with
    index 0 the post-initialization count (always 0).  rescues_trajectory
    follows the same indexing.  panic_onset_step is the first step whose
    sweep latched the panic field, or None.
    """

    nd_trajectory: np.ndarray
    rescues_used: int
    panic_onset_step: Optional[int]
    final_state_summary: np.ndarray
    rescues_trajectory: np.ndarray
    final_ratings: np.ndarray


@dataclass
class EnsembleResult:
    params: ModelParams
    realizations: list
    realization_count: int


def init_state(params, rng):
    """Draw the initial economy: ratings uniform 1..7, spins from (p0, q0)."""
    n = params.n
    ratings = rng.integers(1, N_GRADES, size=n)
    u = rng.random(n)
    spins = np.where(u < params.p0, -1, np.where(u < params.p0 + params.q0, 1, 0))
    return EconomyState(ratings=ratings.astype(np.int64), spins=spins.astype(np.int64))


def advance_time_step(state, couplings, params, rng, rescue_rng=None):
    """Run one sweep of n single-firm updates in place.

    Rescue redraws come from rescue_rng when given, else from rng after
    the selection and uniform blocks.
    """
    n = params.n
    sel = rng.integers(0, n, size=n)
    u = rng.random(size=n)
    src = rng if rescue_rng is None else rescue_rng
    remaining = params.bailout_budget - state.rescues_used
    resc_r = src.integers(1, N_GRADES, size=remaining)
    resc_s = src.integers(-1, 2, size=remaining)
    panic, defaults, rescues = _kernel.sweep(
        state.ratings, state.spins, couplings, float(params.h),
        state.panic_latched, state.defaults, state.rescues_used,
        params.bailout_budget, sel, u, resc_r, resc_s,
    )
    state.panic_latched = bool(panic)
    state.defaults = int(defaults)
    state.rescues_used = int(rescues)
    return state


def run_realization(params, couplings, rng, rescue_rng=None):
    """Initialize one economy and advance it params.steps sweeps."""
    if couplings.shape != (params.n, params.n):
        raise InvalidParameterError(
            f"coupling matrix shape {couplings.shape} does not match n={params.n}"
        )
    state = init_state(params, rng)
    steps = params.steps
    nd = np.zeros(steps + 1, dtype=np.int64)
    rescues = np.zeros(steps + 1, dtype=np.int64)
    panic_onset = None
    for t in range(1, steps + 1):
        advance_time_step(state, couplings, params, rng, rescue_rng)
        nd[t] = state.defaults
        rescues[t] = state.rescues_used
        if panic_onset is None and state.panic_latched:
            panic_onset = t
    summary = np.bincount(state.ratings, minlength=N_GRADES)
    return RealizationResult(
        nd_trajectory=nd,
        rescues_used=int(state.rescues_used),
        panic_onset_step=panic_onset,
        final_state_summary=summary,
        rescues_trajectory=rescues,
        final_ratings=state.ratings.copy(),
    )


def _run_indexed(args):
    params, index = args
    rng, rescue_rng = realization_streams(params.master_seed, index)
    couplings = sample_coupling_matrix(params.n, params.j0, params.sigma_j, rng)
    return run_realization(params, couplings, rng, rescue_rng)


def resolve_workers(workers=None):
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise InvalidParameterError(f"worker count must be >= 1, got {workers}")
    return workers


def _warmup():
    # compile the kernel in this process before any pool forks from it
    params = ModelParams(n=2, j0=0.0, sigma_j=0.0, steps=1)
    _run_indexed((params, 0))


def run_ensemble(params, realization_count, workers=None):
    """Run independent realizations; result does not depend on workers.

    Realization k draws from the substream spawned as (master_seed, k), so
    any execution order or degree of parallelism assembles the same list.
    """
    if not isinstance(realization_count, (int, np.integer)) or realization_count < 1:
        raise InvalidParameterError(
            f"realization_count must be a positive integer, got {realization_count!r}"
        )
    workers = resolve_workers(workers)
    tasks = [(params, k) for k in range(realization_count)]
    if workers > 1 and realization_count > 1:
        _warmup()
        chunk = max(1, realization_count // (workers * 4))
        with get_context("fork").Pool(workers) as pool:
            results = pool.map(_run_indexed, tasks, chunksize=chunk)
    else:
        results = [_run_indexed(t) for t in tasks]
    return EnsembleResult(params=params, realizations=results,
                          realization_count=int(realization_count))
