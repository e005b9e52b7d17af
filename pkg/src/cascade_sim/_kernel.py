"""Hot loop: one sweep of n asynchronous single-firm updates, jitted.

State arrays are mutated in place.  All randomness arrives pre-drawn:
`sel` holds the n firm selections, `u` the spin-choice uniforms (one per
update, consumed in order), and `resc_r` / `resc_s` the rescue redraw
values, consumed pairwise.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def sweep(ratings, spins, couplings, h, panic, defaults, rescues_used, budget,
          sel, u, resc_r, resc_s):
    n = ratings.shape[0]
    rp = 0
    for m in range(n):
        i = sel[m]
        ri = ratings[i]
        x = u[m]
        a_minus = 0.0
        a_zero = 0.0
        a_plus = 0.0
        for j in range(n):
            v = couplings[i, j]
            sj = spins[j]
            if sj == 0:
                a_zero += v
            elif sj == -1:
                a_minus += v
            else:
                a_plus += v
        if panic:
            a_minus += h
        w_minus = np.exp(a_minus)
        w_zero = np.exp(a_zero)
        w_plus = 0.0 if ri == 7 else np.exp(a_plus)
        t = x * (w_minus + w_zero + w_plus)
        # inverse CDF over (-1, 0, +1); upgrade unreachable when w_plus is 0
        if t < w_minus:
            s = -1
        elif w_plus > 0.0 and t >= w_minus + w_zero:
            s = 1
        else:
            s = 0
        spins[i] = s
        if ri > 0:
            ratings[i] = ri + s
            if ratings[i] == 0:
                if rescues_used < budget:
                    ratings[i] = resc_r[rp]
                    spins[i] = resc_s[rp]
                    rp += 1
                    rescues_used += 1
                else:
                    defaults += 1
                    panic = True
    return panic, defaults, rescues_used
