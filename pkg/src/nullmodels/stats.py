"""Exact graph statistics: degree correlation, triangles, clustering.

The degree correlation r of a multigraph is the Pearson correlation of the
joint degrees across the stub-ordered edge list: both orientations of every
edge contribute, and a self-loop contributes its endpoint twice. Numerator
and denominator are assembled from exact integer sums, so r and its split
into the positive piece (the edge sum) and the negative piece (the squared
second-moment term) are reproducible to machine rounding; regular graphs
have a vanishing denominator and raise instead of returning NaN.

The triangle count is multiplicity-weighted: an unordered triple {i, j, k}
contributes X_ij * X_jk * X_ik, self-loops never contribute, and loops of
length three through repeated vertices are not triangles. On simple graphs
the global coefficient 6T / sum D(D-1) lies in [0, 1]; on multigraphs it may
exceed one and is reported unclamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fast
from .graphs import MultiGraph


class DegenerateStatisticError(ArithmeticError):
    """The statistic's denominator vanishes on this input."""


def _exact_sum(values: np.ndarray) -> int:
    """Exact integer sum of an int64 array, chunked so no partial sum overflows."""
    if values.size == 0:
        return 0
    peak = int(np.abs(values).max())
    if peak == 0:
        return 0
    chunk = max((1 << 62) // peak, 1)
    return sum(int(values[s:s + chunk].sum(dtype=np.int64))
               for s in range(0, values.size, chunk))


def degree_power_sums(obj, powers) -> dict:
    """Exact sums of degree powers, arbitrary-precision.

    Accepts a graph, a degree-sequence object, or a plain integer array.
    Powers outside {1, 2, 3, 4, 6} are rejected.
    """
    allowed = {1, 2, 3, 4, 6}
    powers = sorted(set(int(p) for p in powers))
    if not set(powers) <= allowed:
        raise ValueError(f"supported powers are {sorted(allowed)}, got {powers}")
    if isinstance(obj, MultiGraph):
        degrees = obj.degrees
    elif hasattr(obj, "values"):
        degrees = obj.values
    else:
        degrees = np.asarray(obj, dtype=np.int64)
    uniq, counts = np.unique(degrees, return_counts=True)
    out = {}
    for p in powers:
        out[p] = sum(int(c) * int(d) ** p for d, c in zip(uniq, counts))
    return out


@dataclass
class PearsonBreakdown:
    """Degree correlation with its positive/negative split and raw sums."""

    r: float
    r_plus: float
    r_minus: float
    numerator_edge_sum: int
    s2: int
    s3: int
    l: int


def pearson(g: MultiGraph) -> PearsonBreakdown:
    """Degree correlation over the edge list, loops weighted twice.

    The ordered double sum over edge endpoints is realized as
    2 * sum_{u<v} X_uv D_u D_v + 2 * sum_i X_ii D_i^2. All sums are exact
    integers; the final division is the only rounding step.
    """
    sums = degree_power_sums(g, (1, 2, 3))
    l, s2, s3 = sums[1], sums[2], sums[3]
    deg = g.degrees.astype(np.int64)
    loops = g.loop_mask()
    du = deg[g.edge_u]
    dv = deg[g.edge_v]
    other = np.where(loops, du, dv)
    if g.edge_mult.size and \
            2 * int(g.edge_mult.max()) * int(du.max()) * int(other.max()) < (1 << 62):
        edge_sum = _exact_sum(2 * g.edge_mult * du * other)
    else:
        edge_sum = 2 * sum(int(m) * int(a) * int(b)
                           for m, a, b in zip(g.edge_mult, du, other))

    denom = l * s3 - s2 * s2
    if denom == 0:
        raise DegenerateStatisticError(
            "all degrees equal: correlation denominator vanishes")
    r = (l * edge_sum - s2 * s2) / denom
    r_plus = (l * edge_sum) / denom
    r_minus = (s2 * s2) / denom
    return PearsonBreakdown(r=r, r_plus=r_plus, r_minus=r_minus,
                            numerator_edge_sum=edge_sum, s2=s2, s3=s3, l=l)


def _oriented_csr(g: MultiGraph):
    """Degree-rank orientation of the non-loop edges as a sorted CSR.

    Vertices are relabeled by increasing (degree, id); every edge points from
    the lower to the higher rank, so out-lists are short where degrees are
    large and each triangle is discovered exactly once.
    """
    n = g.n
    order = np.lexsort((np.arange(n), g.degrees))
    rank = np.empty(n, np.int64)
    rank[order] = np.arange(n, dtype=np.int64)
    keep = ~g.loop_mask()
    a = rank[g.edge_u[keep]]
    b = rank[g.edge_v[keep]]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    mult = g.edge_mult[keep].astype(np.float64)
    order2 = np.argsort(lo * n + hi, kind="stable")
    lo, hi, mult = lo[order2], hi[order2], mult[order2]
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(lo, minlength=n), out=indptr[1:])
    return indptr, hi, mult, rank


def triangle_count(g: MultiGraph) -> float:
    """Multiplicity-weighted triangle sum; self-loops never contribute."""
    return triangle_count_with_local(g)[0]


def triangle_count_with_local(g: MultiGraph):
    """(total, per-vertex participation) for the weighted triangle sum."""
    indptr, nbrs, mult, rank = _oriented_csr(g)
    local_rank = np.zeros(g.n, np.float64)
    total = _fast.triangle_core(indptr, nbrs, mult, local_rank)
    return float(total), local_rank[rank]


@dataclass
class ClusteringResult:
    triangles: float
    wedge_sum: int
    c_global: float


def clustering_global(g: MultiGraph) -> ClusteringResult:
    """6 * triangles / sum_i D_i (D_i - 1), degrees taken from the graph itself."""
    uniq, counts = np.unique(g.degrees, return_counts=True)
    wedge = sum(int(c) * int(d) * (int(d) - 1) for d, c in zip(uniq, counts))
    if wedge == 0:
        raise DegenerateStatisticError("no vertex has two stubs: wedge sum vanishes")
    tri = triangle_count(g)
    return ClusteringResult(triangles=tri, wedge_sum=wedge,
                            c_global=6.0 * tri / wedge)


def clustering_average(g: MultiGraph) -> float:
    """Mean local clustering over vertices of degree >= 2; simple graphs only."""
    if not g.is_simple():
        raise ValueError("average clustering is defined on simple graphs")
    tri, local = triangle_count_with_local(g)
    deg = g.degrees
    eligible = deg >= 2
    if not np.any(eligible):
        raise DegenerateStatisticError("no vertex of degree >= 2")
    pairs = deg[eligible].astype(np.float64)
    pairs = pairs * (pairs - 1.0) / 2.0
    return float(np.mean(local[eligible] / pairs))
