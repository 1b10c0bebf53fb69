"""Compiled hot loops: pair skip-sampling and triangle intersection.

Both cores are deterministic given their integer seed state; randomness comes
from an inlined SplitMix64 stream so the compiled and pure-Python paths
produce identical graphs. numba is optional: without it the same functions
run as plain Python (slow, but exercised by the small-graph tests).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:          # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def _sm_uniform(state):
    """One SplitMix64 step; returns (new_state, uniform in [0, 1))."""
    state = (state + _SM_GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> np.uint64(30))) * _SM_M1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _SM_M2) & _MASK
    z = z ^ (z >> np.uint64(31))
    return state, float(z >> np.uint64(11)) * _INV53


@njit(cache=True)
def pair_sample_core(w_sorted, mu_n, kernel_id, state, out_i, out_j):
    """Sample independent pairs {i, j} with probability q(w_i w_j / mu_n).

    Weights must be sorted in descending order. Pairs are screened by the
    majorant min(u, 1), which dominates every admissible kernel, using
    geometric skips; survivors are thinned to the actual kernel:
    0 = min(u, 1), 1 = 1 - exp(-u), 2 = u / (1 + u). kernel_id = -1 keeps the
    majorant candidates (caller thins afterwards). Returns (count, state),
    count = -1 when the output buffers are too small.
    """
    n = w_sorted.size
    cap = out_i.size
    cnt = 0
    for i in range(n - 1):
        wi = w_sorted[i]
        j = i + 1
        p = wi * w_sorted[j] / mu_n
        if p > 1.0:
            p = 1.0
        if p <= 0.0:
            continue
        while j < n:
            if p < 1.0:
                state, u0 = _sm_uniform(state)
                fskip = np.floor(np.log1p(-u0) / np.log1p(-p))
                if fskip >= n - j:
                    break
                j += int(fskip)
            u_val = wi * w_sorted[j] / mu_n
            pj = u_val if u_val < 1.0 else 1.0
            state, u1 = _sm_uniform(state)
            if kernel_id == 0 or kernel_id == -1:
                q = pj
            elif kernel_id == 1:
                q = -np.expm1(-u_val)
            else:
                q = u_val / (1.0 + u_val)
            if u1 * p < q:
                if cnt >= cap:
                    return -1, state
                out_i[cnt] = i
                out_j[cnt] = j
                cnt += 1
            p = pj
            j += 1
    return cnt, state


@njit(cache=True)
def triangle_core(indptr, nbrs, mult, local):
    """Multiplicity-weighted triangle sum on a rank-oriented sorted CSR.

    Each triangle is found once, at its lowest-rank edge, by merging the
    out-neighbor lists of the edge's endpoints. ``local`` accumulates each
    triangle's weight at all three corners (for local clustering).
    """
    total = 0.0
    nv = indptr.size - 1
    for a in range(nv):
        for ei in range(indptr[a], indptr[a + 1]):
            b = nbrs[ei]
            mab = mult[ei]
            i1, e1 = indptr[a], indptr[a + 1]
            i2, e2 = indptr[b], indptr[b + 1]
            while i1 < e1 and i2 < e2:
                x = nbrs[i1]
                y = nbrs[i2]
                if x == y:
                    t = mab * mult[i1] * mult[i2]
                    total += t
                    local[a] += t
                    local[b] += t
                    local[x] += t
                    i1 += 1
                    i2 += 1
                elif x < y:
                    i1 += 1
                else:
                    i2 += 1
    return total
