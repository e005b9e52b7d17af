"""Independent reference computations the test suite checks the engine
against.

Everything here is deliberately written from the model definition, not
from the library internals: transition-matrix powers for the decoupled
limit, exact path enumeration for two firms, and a plain-python twin of
the sweep that mirrors the documented draw order.
"""

import itertools

import numpy as np
from scipy import stats

N_GRADES = 8


def decoupled_chain():
    """Single-firm rating chain with no couplings and no panic pathway.

    Absorbing at 0; interior grades move -1/0/+1 with probability 1/3
    each; the top grade moves -1/0 with probability 1/2 each.
    """
    t = np.zeros((N_GRADES, N_GRADES))
    t[0, 0] = 1.0
    for r in range(1, N_GRADES - 1):
        t[r, r - 1] = t[r, r] = t[r, r + 1] = 1.0 / 3.0
    t[7, 6] = t[7, 7] = 0.5
    return t


def decoupled_joint_chain():
    """Joint (rating, spin) chain for one decoupled firm, state index
    r * 3 + (s + 1).

    Defaulted firms keep redrawing their spin from the full set; the top
    grade draws from {-1, 0} only, which is what makes the stationary
    mean spin negative.
    """
    t = np.zeros((24, 24))
    for r in range(N_GRADES):
        if r == 0:
            moves = [(0, s) for s in (-1, 0, 1)]
        elif r == 7:
            moves = [(7 + s, s) for s in (-1, 0)]
        else:
            moves = [(r + s, s) for s in (-1, 0, 1)]
        for s_old in (-1, 0, 1):
            for r_new, s_new in moves:
                t[r * 3 + s_old + 1, r_new * 3 + s_new + 1] += 1.0 / len(moves)
    return t


def _joint_start():
    start = np.zeros(24)
    for r in range(1, N_GRADES):
        start[r * 3 + 0] = start[r * 3 + 1] = start[r * 3 + 2] = 1.0 / 21.0
    return start


def _update_count_pmf(n, steps):
    total = steps * n
    counts = np.arange(total + 1)
    pmf = stats.binom.pmf(counts, total, 1.0 / n)
    keep = pmf > 1e-16
    return counts[keep], pmf[keep]


def mean_spin_update_mixture(n, steps):
    """Expected firm-averaged spin in the decoupled limit with p0 = q0,
    uniform selection with replacement."""
    spin_val = np.array([s for _ in range(N_GRADES) for s in (-1, 0, 1)],
                        dtype=float)
    t = decoupled_joint_chain()
    dist = _joint_start()
    counts, pmf = _update_count_pmf(n, steps)
    acc = 0.0
    prev = 0
    for m, p in zip(counts, pmf):
        for _ in range(m - prev):
            dist = dist @ t
        prev = m
        acc += p * float(dist @ spin_val)
    return acc


def absorbed_mass(chain_steps):
    """P(rating = 0 after chain_steps single-firm updates), uniform start
    on 1..7."""
    start = np.full(N_GRADES, 1.0 / 7.0)
    start[0] = 0.0
    dist = start @ np.linalg.matrix_power(decoupled_chain(), chain_steps)
    return float(dist[0])


def absorption_plain(steps):
    """Absorption if every firm received exactly `steps` updates."""
    return absorbed_mass(steps)


def absorption_update_mixture(n, steps):
    """Absorption under uniform selection with replacement.

    A firm's update count over `steps` sweeps of n selections is
    Binomial(steps * n, 1/n); the absorption probability is the mixture
    of fixed-count absorptions over that law.
    """
    counts, pmf = _update_count_pmf(n, steps)
    return float(sum(p * absorbed_mass(int(m)) for m, p in zip(counts, pmf)))


def _weights(spins, ratings, i, j0, h, panic):
    """Unnormalized spin weights for firm i, two-firm economy, equal
    couplings j0, panic amplitude h."""
    other = 1 - i
    a = {-1: 0.0, 0: 0.0, 1: 0.0}
    a[spins[other]] += j0
    if panic:
        a[-1] += h
    w = {s: np.exp(a[s]) for s in (-1, 0, 1)}
    if ratings[i] == 7:
        w[1] = 0.0
    return w


def enumerate_two_firm_step(j0, h, p0, q0):
    """Exact distribution of (r0, r1) after one sweep of two updates,
    for two firms with coupling j0, budget 0, sigma 0.

    Starts are the initialization law: ratings uniform on 1..7, spins
    -1/+1/0 with probabilities (p0, q0, 1 - p0 - q0).  Spins of defaulted
    firms keep updating; their rating stays 0.  Panic latches the moment
    a default exists and biases every later update of the same sweep.
    """
    spin_p = {-1: p0, 1: q0, 0: 1.0 - p0 - q0}
    out = {}
    for r0, r1 in itertools.product(range(1, 8), repeat=2):
        for s0, s1 in itertools.product((-1, 0, 1), repeat=2):
            base = (1.0 / 49.0) * spin_p[s0] * spin_p[s1]
            if base == 0.0:
                continue
            for i1, i2 in itertools.product((0, 1), repeat=2):
                _walk(out, [r0, r1], [s0, s1], (i1, i2), base * 0.25,
                      j0, h, False)
    return out


def _walk(out, ratings, spins, selections, prob, j0, h, panic):
    if not selections:
        key = (ratings[0], ratings[1])
        out[key] = out.get(key, 0.0) + prob
        return
    i, rest = selections[0], selections[1:]
    w = _weights(spins, ratings, i, j0, h, panic)
    z = w[-1] + w[0] + w[1]
    for s in (-1, 0, 1):
        if w[s] == 0.0:
            continue
        nr = list(ratings)
        ns = list(spins)
        ns[i] = s
        if nr[i] > 0:
            nr[i] += s
        next_panic = panic or nr[i] == 0 or nr[1 - i] == 0
        _walk(out, nr, ns, rest, prob * w[s] / z, j0, h, next_panic)


def reference_advance(state, couplings, params, rng, rescue_rng=None):
    """Plain-python twin of one engine time step, same draw order."""
    n = params.n
    sel = rng.integers(0, n, size=n)
    u = rng.random(size=n)
    src = rng if rescue_rng is None else rescue_rng
    remaining = params.bailout_budget - state.rescues_used
    resc_r = src.integers(1, N_GRADES, size=remaining)
    resc_s = src.integers(-1, 2, size=remaining)
    rp = 0
    for m in range(n):
        i = int(sel[m])
        x = u[m]
        a = {-1: 0.0, 0: 0.0, 1: 0.0}
        for j in range(n):
            a[int(state.spins[j])] += couplings[i, j]
        if state.panic_latched:
            a[-1] += params.h
        w_minus = np.exp(a[-1])
        w_zero = np.exp(a[0])
        w_plus = 0.0 if state.ratings[i] == 7 else np.exp(a[1])
        t = x * (w_minus + w_zero + w_plus)
        if t < w_minus:
            s = -1
        elif w_plus > 0.0 and t >= w_minus + w_zero:
            s = 1
        else:
            s = 0
        state.spins[i] = s
        if state.ratings[i] > 0:
            state.ratings[i] += s
            if state.ratings[i] == 0:
                if state.rescues_used < params.bailout_budget:
                    state.ratings[i] = int(resc_r[rp])
                    state.spins[i] = int(resc_s[rp])
                    rp += 1
                    state.rescues_used += 1
                else:
                    state.defaults += 1
                    state.panic_latched = True
    return state
