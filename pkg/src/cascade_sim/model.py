"""Core types and the single-firm update rule.

Each firm carries an effective credit rating on the integer scale 0..7 and a
spin recording its most recent outlook, one of -1, 0, +1.  Rating 0 is
bankruptcy and absorbs the rating only: a defaulted firm never re-rates, but
its spin keeps responding to the market like everyone else's, so dead firms
still transmit sentiment to their neighbours.  Rating 7 reflects: upgrades
are impossible there, so the allowed spin set shrinks to {-1, 0} and the two
weights are renormalized.

Pairwise influences are quenched Gaussian couplings, symmetric with zero
diagonal.  A firm's conditional spin distribution is a Boltzmann weight over
candidate spins s:

    w(s) = exp( sum_{j != i} J_ij * [spin_j == s] + h_eff * [s == -1] )

where h_eff equals the panic amplitude h once the panic field has latched
(first unrescued default anywhere in the economy) and 0 before.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, InvalidParameterError

RATING_TOP = 7
N_GRADES = 8


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one simulated economy."""

    n: int
    j0: float
    sigma_j: float = 0.001
    h: float = 0.0
    steps: int = 8
    bailout_budget: int = 0
    p0: float = 1.0 / 3.0
    q0: float = 1.0 / 3.0
    master_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if self.sigma_j < 0:
            raise InvalidParameterError(f"sigma_j must be >= 0, got {self.sigma_j}")
        if self.h < 0:
            raise InvalidParameterError(f"h must be >= 0, got {self.h}")
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 0:
            raise InvalidParameterError(f"steps must be a non-negative integer, got {self.steps!r}")
        if not isinstance(self.bailout_budget, (int, np.integer)) or self.bailout_budget < 0:
            raise InvalidParameterError(
                f"bailout_budget must be a non-negative integer, got {self.bailout_budget!r}"
            )
        for name in ("p0", "q0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {v}")
        if self.p0 + self.q0 > 1.0:
            raise InvalidParameterError(
                f"p0 + q0 must not exceed 1, got {self.p0} + {self.q0}"
            )
        if not isinstance(self.master_seed, (int, np.integer)) or not (
            0 <= int(self.master_seed) < 2**64
        ):
            raise InvalidParameterError(
                f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}"
            )


@dataclass
class EconomyState:
    """Mutable snapshot of all firms plus cascade bookkeeping.

    Invariants at observation points: ratings in 0..7, spins in {-1, 0, +1},
    defaults == count of zero ratings, rescues_used <= bailout budget, and
    panic_latched never goes back to False within a realization.
    """

    ratings: np.ndarray
    spins: np.ndarray
    panic_latched: bool = False
    rescues_used: int = 0
    defaults: int = 0

    def copy(self):
        return EconomyState(
            ratings=self.ratings.copy(),
            spins=self.spins.copy(),
            panic_latched=self.panic_latched,
            rescues_used=self.rescues_used,
            defaults=self.defaults,
        )


_triu_cache = {}


def _triu(n):
    if n not in _triu_cache:
        _triu_cache[n] = np.triu_indices(n, k=1)
    return _triu_cache[n]


def sample_coupling_matrix(n, j0, sigma_j, rng):
    """Draw a symmetric coupling matrix with zero diagonal.

    Exactly n*(n-1)/2 normal draws are consumed, one per unordered pair,
    in row-major order over i < j.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    if sigma_j < 0:
        raise InvalidParameterError(f"sigma_j must be >= 0, got {sigma_j}")
    m = n * (n - 1) // 2
    draws = rng.normal(j0, sigma_j, size=m)
    couplings = np.zeros((n, n))
    rows, cols = _triu(n)
    couplings[rows, cols] = draws
    couplings[cols, rows] = draws
    return couplings


def panic_field_active(ratings):
    """True as soon as any firm sits at rating 0."""
    return bool((np.asarray(ratings) == 0).any())


def conditional_distribution(i, state, couplings, h):
    """Probabilities of the next spin of firm i, ordered (-1, 0, +1).

    The panic amplitude h only enters once the latch is set.  At the top
    rating the upgrade probability is exactly 0 and the remaining two
    weights are renormalized.  Defaulted firms use the full weight set;
    only their rating is frozen, not their outlook.
    """
    rating = int(state.ratings[i])
    row = couplings[i]
    spins = state.spins
    # zero diagonal makes the j == i term vanish on its own
    a_minus = float(row[spins == -1].sum())
    a_zero = float(row[spins == 0].sum())
    a_plus = float(row[spins == 1].sum())
    if state.panic_latched:
        a_minus += h
    w_minus = np.exp(a_minus)
    w_zero = np.exp(a_zero)
    w_plus = 0.0 if rating == RATING_TOP else np.exp(a_plus)
    z = w_minus + w_zero + w_plus
    return np.array([w_minus / z, w_zero / z, w_plus / z])


def apply_spin(i, s, state):
    """Record spin s for firm i and, if the firm is live, move its rating."""
    rating = int(state.ratings[i])
    if s not in (-1, 0, 1):
        raise ContractViolationError(f"spin must be -1, 0 or +1, got {s!r}")
    if rating == RATING_TOP and s == 1:
        raise ContractViolationError(
            f"firm {i} already sits at the top rating and cannot be upgraded"
        )
    state.spins[i] = s
    if rating > 0:
        new_rating = rating + s
        state.ratings[i] = new_rating
        if new_rating == 0:
            state.defaults += 1
    return state
