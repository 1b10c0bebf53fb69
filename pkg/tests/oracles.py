"""Independent reference implementations shared by the test modules.

These deliberately use the slowest, most literal formulations available:
exhaustive matching enumeration, dense double loops, and cubic triple
enumeration. They never call into the optimized code paths they check.
"""

import numpy as np

from nullmodels.graphs import MultiGraph


def enumerate_matchings(degrees):
    """Exact multigraph distribution of the uniform stub matching.

    Returns {canonical edge tuple: probability}; a canonical edge tuple is
    sorted ((u, v, multiplicity), ...). Feasible for stub totals up to ~12.
    """
    stubs = []
    for v, d in enumerate(degrees):
        stubs.extend([v] * int(d))
    outcomes = {}

    def rec(remaining, edges):
        if not remaining:
            key = {}
            for a, b in edges:
                key[(a, b)] = key.get((a, b), 0) + 1
            canon = tuple(sorted((a, b, m) for (a, b), m in key.items()))
            outcomes[canon] = outcomes.get(canon, 0) + 1
            return
        first = remaining[0]
        for k in range(1, len(remaining)):
            partner = remaining[k]
            rest = remaining[1:k] + remaining[k + 1:]
            rec(rest, edges + [(min(first, partner), max(first, partner))])

    rec(stubs, [])
    total = sum(outcomes.values())
    return {k: v / total for k, v in outcomes.items()}


def pair_loop_probabilities(degrees):
    """P(at least one edge) per unordered pair and P(loop) per vertex, exact."""
    dist = enumerate_matchings(degrees)
    k = len(degrees)
    pair_p = {}
    loop_p = {}
    for outcome, p in dist.items():
        present = {(a, b) for a, b, _ in outcome}
        for i in range(k):
            for j in range(i + 1, k):
                if (i, j) in present:
                    pair_p[(i, j)] = pair_p.get((i, j), 0.0) + p
            if (i, i) in present:
                loop_p[i] = loop_p.get(i, 0.0) + p
    return pair_p, loop_p


def naive_pearson(g: MultiGraph) -> float:
    """Dense double-sum degree correlation; loops weighted twice."""
    deg = g.degrees.astype(float)
    a = np.zeros((g.n, g.n))
    for (i, j), m in g.multiplicity_map().items():
        if i == j:
            a[i, i] = 2.0 * m
        else:
            a[i, j] = a[j, i] = float(m)
    l_n = deg.sum()
    s2 = (deg**2).sum()
    s3 = (deg**3).sum()
    return (deg @ a @ deg - s2 * s2 / l_n) / (s3 - s2 * s2 / l_n)


def naive_triangles(g: MultiGraph) -> float:
    """Cubic enumeration of unordered triples with multiplicity products."""
    mm = g.multiplicity_map()

    def x(i, j):
        return mm.get((min(i, j), max(i, j)), 0) if i != j else 0

    total = 0
    for i in range(g.n):
        for j in range(i + 1, g.n):
            for k in range(j + 1, g.n):
                total += x(i, j) * x(j, k) * x(i, k)
    return float(total)


def random_multigraph(n, rng):
    """Dense-ish random multigraph with loops and multiplicities up to 3."""
    edges = []
    for i in range(n):
        for j in range(i, n):
            if rng.random() < (0.15 if i != j else 0.05):
                edges.append((i, j, int(rng.integers(1, 4))))
    if not edges:
        edges = [(0, min(1, n - 1), 1)]
    return MultiGraph.from_edges(n, edges)


def even_partitions(max_total):
    """All degree multisets (as sorted tuples) with even sum <= max_total."""
    out = []

    def parts(total, max_part, acc):
        if total == 0:
            out.append(tuple(acc))
            return
        for p in range(min(total, max_part), 0, -1):
            parts(total - p, p, acc + [p])

    for total in range(2, max_total + 1, 2):
        parts(total, total, [])
    return out
