"""Multigraphs and the three generators: stub pairing, erasure, weighted pairs.

A MultiGraph stores its edge multiset as canonical (u <= v) arrays sorted by
pair, with one entry per distinct pair; X[i][i] counts self-loops (one loop =
one edge = two stubs of i). Degrees always satisfy D_i = 2 X_ii + sum_j X_ij.

Generators:

* ``generate_cm``     uniform stub matching for a fixed degree sequence
                      (Fisher-Yates shuffle of the stub array, consecutive
                      pairing), the multigraph null model;
* ``erase``           removes self-loops and collapses multi-edges, returning
                      the simple graph plus a full account of what was removed;
* ``generate_irg``    connects each pair {i, j} independently with probability
                      q(w_i w_j / (mu n)) for a kernel q from the admissible
                      class, via weight-sorted geometric skip sampling that is
                      exact pair-by-pair and near-linear in the edge count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import _fast
from .degree import DegreeSequence, as_generator


class OddStubTotalError(ValueError):
    """Stub pairing needs an even number of stubs."""


class KernelConditionError(ValueError):
    """A connection kernel violates the admissibility checks."""


class EdgeListParseError(ValueError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


@dataclass
class MultiGraph:
    """Undirected multigraph with canonical sparse edge storage."""

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_mult: np.ndarray
    degrees: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_stub_pairs(cls, n: int, pairs: np.ndarray, meta=None) -> "MultiGraph":
        """Build from an (m, 2) array of paired stub owners."""
        u = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
        v = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
        keys = u * n + v
        uniq, mult = np.unique(keys, return_counts=True)
        eu, ev = uniq // n, uniq % n
        degrees = np.bincount(pairs.ravel().astype(np.int64), minlength=n)
        return cls(n=n, edge_u=eu, edge_v=ev, edge_mult=mult.astype(np.int64),
                   degrees=degrees.astype(np.int64), meta=dict(meta or {}))

    @classmethod
    def from_edges(cls, n: int, edges, meta=None) -> "MultiGraph":
        """Build from (i, j, multiplicity) triples; duplicates are merged."""
        if len(edges) == 0:
            return cls(n=n, edge_u=np.empty(0, np.int64), edge_v=np.empty(0, np.int64),
                       edge_mult=np.empty(0, np.int64), degrees=np.zeros(n, np.int64),
                       meta=dict(meta or {}))
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
        u = np.minimum(arr[:, 0], arr[:, 1])
        v = np.maximum(arr[:, 0], arr[:, 1])
        if np.any(u < 0) or np.any(v >= n):
            raise ValueError("vertex id out of range")
        if np.any(arr[:, 2] < 1):
            raise ValueError("edge multiplicities must be >= 1")
        keys = u * n + v
        order = np.argsort(keys, kind="stable")
        keys, m = keys[order], arr[:, 2][order]
        uniq, start = np.unique(keys, return_index=True)
        mult = np.add.reduceat(m, start)
        eu, ev = uniq // n, uniq % n
        degrees = np.zeros(n, np.int64)
        np.add.at(degrees, eu, mult)
        np.add.at(degrees, ev, mult)   # loops get 2 per unit this way
        return cls(n=n, edge_u=eu, edge_v=ev, edge_mult=mult,
                   degrees=degrees, meta=dict(meta or {}))

    # -- queries -------------------------------------------------------------

    @property
    def edge_count(self) -> int:
        """Total edges including loops (one loop = one edge)."""
        return int(self.edge_mult.sum())

    def loop_mask(self) -> np.ndarray:
        return self.edge_u == self.edge_v

    def is_simple(self) -> bool:
        return not np.any(self.loop_mask()) and not np.any(self.edge_mult > 1)

    def multiplicity(self, i: int, j: int) -> int:
        a, b = (i, j) if i <= j else (j, i)
        key = a * self.n + b
        keys = self.edge_u * self.n + self.edge_v
        pos = np.searchsorted(keys, key)
        if pos < keys.size and keys[pos] == key:
            return int(self.edge_mult[pos])
        return 0

    def multiplicity_map(self) -> dict:
        return {(int(a), int(b)): int(m)
                for a, b, m in zip(self.edge_u, self.edge_v, self.edge_mult)}

    def validate(self):
        """Degrees must be recomputable from the multiplicities."""
        deg = np.zeros(self.n, np.int64)
        np.add.at(deg, self.edge_u, self.edge_mult)
        np.add.at(deg, self.edge_v, self.edge_mult)
        if not np.array_equal(deg, self.degrees):
            raise AssertionError("degree array inconsistent with edge multiplicities")
        if np.any(self.edge_mult < 1):
            raise AssertionError("stored multiplicity below 1")
        if int(self.degrees.sum()) != 2 * self.edge_count:
            raise AssertionError("stub count does not equal twice the edge count")

    # -- serialization: '#n <count>' header, then 'i j multiplicity' lines ----

    def to_text(self) -> str:
        lines = [f"#n {self.n}"]
        for key in sorted(self.meta):
            lines.append(f"#{key} {self.meta[key]}")
        for a, b, m in zip(self.edge_u, self.edge_v, self.edge_mult):
            lines.append(f"{a} {b} {m}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MultiGraph":
        n = None
        meta = {}
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split(None, 1)
                if not parts:
                    raise EdgeListParseError(lineno, "empty header line")
                if parts[0] == "n":
                    try:
                        n = int(parts[1])
                    except (IndexError, ValueError):
                        raise EdgeListParseError(lineno, "bad vertex count header")
                else:
                    meta[parts[0]] = parts[1] if len(parts) > 1 else ""
                continue
            parts = line.split()
            if len(parts) != 3:
                raise EdgeListParseError(lineno, "expected 'i j multiplicity'")
            try:
                i, j, m = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise EdgeListParseError(lineno, "non-integer field")
            if n is None:
                raise EdgeListParseError(lineno, "edge before '#n' header")
            if not (0 <= i < n and 0 <= j < n):
                raise EdgeListParseError(lineno, "vertex id out of range")
            if m < 1:
                raise EdgeListParseError(lineno, "multiplicity below 1")
            edges.append((i, j, m))
        if n is None:
            raise EdgeListParseError(0, "missing '#n' header")
        return cls.from_edges(n, edges, meta=meta)


@dataclass
class ErasureReport:
    """Exactly what erasure removed.

    removed_stubs is stub-accurate: entry i equals D_i minus the erased
    degree, so a removed self-loop contributes 2. The per-pair map stores
    Z_ij = X_ij - 1 for connected pairs and Z_ii = X_ii for loops.
    """

    z_total: int
    pair_u: np.ndarray
    pair_v: np.ndarray
    pair_removed: np.ndarray
    removed_stubs: np.ndarray

    def pair_map(self) -> dict:
        return {(int(a), int(b)): int(z)
                for a, b, z in zip(self.pair_u, self.pair_v, self.pair_removed)}

    def removed_stubs_loop_once(self) -> np.ndarray:
        """Per-vertex removal count with a self-loop counted once, not twice."""
        out = self.removed_stubs.copy()
        loops = self.pair_u == self.pair_v
        np.subtract.at(out, self.pair_u[loops], self.pair_removed[loops])
        return out

    def to_json(self) -> str:
        return json.dumps({
            "z_total": int(self.z_total),
            "pairs": [[int(a), int(b), int(z)] for a, b, z in
                      zip(self.pair_u, self.pair_v, self.pair_removed)],
            "removed_stubs": [int(x) for x in self.removed_stubs],
        })

    @classmethod
    def from_json(cls, text: str) -> "ErasureReport":
        d = json.loads(text)
        pairs = np.asarray(d["pairs"], dtype=np.int64).reshape(-1, 3)
        return cls(z_total=int(d["z_total"]), pair_u=pairs[:, 0], pair_v=pairs[:, 1],
                   pair_removed=pairs[:, 2],
                   removed_stubs=np.asarray(d["removed_stubs"], dtype=np.int64))


def generate_cm(seq: DegreeSequence, seed) -> MultiGraph:
    """Uniform random stub matching for a fixed degree sequence.

    Shuffles the stub array and pairs consecutive entries; every perfect
    matching of the stubs is equally likely. Resulting degrees equal the
    input sequence exactly.
    """
    if seq.total % 2 != 0:
        raise OddStubTotalError(f"stub total {seq.total} is odd; pairing impossible")
    rng = as_generator(seed)
    stubs = np.repeat(np.arange(seq.n, dtype=np.int64), seq.values)
    pairs = rng.permutation(stubs).reshape(-1, 2)
    g = MultiGraph.from_stub_pairs(seq.n, pairs, meta={"model": "cm"})
    return g


def erase(g: MultiGraph):
    """Simple graph view plus the erasure account; the input is untouched."""
    loops = g.loop_mask()
    keep = ~loops
    removed_per_pair = np.where(loops, g.edge_mult, g.edge_mult - 1)
    touched = removed_per_pair > 0
    z_total = int(removed_per_pair.sum())

    new_mult = np.ones(int(keep.sum()), dtype=np.int64)
    eu, ev = g.edge_u[keep], g.edge_v[keep]
    degrees = np.zeros(g.n, np.int64)
    np.add.at(degrees, eu, new_mult)
    np.add.at(degrees, ev, new_mult)
    simple = MultiGraph(n=g.n, edge_u=eu.copy(), edge_v=ev.copy(),
                        edge_mult=new_mult, degrees=degrees,
                        meta={**g.meta, "model": g.meta.get("model", "") + "+erased"})

    removed_stubs = (g.degrees - degrees).astype(np.int64)
    report = ErasureReport(
        z_total=z_total,
        pair_u=g.edge_u[touched].copy(),
        pair_v=g.edge_v[touched].copy(),
        pair_removed=removed_per_pair[touched].copy(),
        removed_stubs=removed_stubs,
    )
    return simple, report


def generate_ecm(seq: DegreeSequence, seed):
    """Coupled construction: the multigraph, its erased graph, and the report."""
    g = generate_cm(seq, seed)
    simple, report = erase(g)
    return g, simple, report


# -- connection kernels -------------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    """A connection-probability profile q(u) = u * h(u)."""

    name: str
    q: object
    h: object

    @classmethod
    def chung_lu(cls):
        return cls("chung_lu",
                   q=lambda u: np.minimum(np.asarray(u, dtype=float), 1.0),
                   h=lambda u: np.minimum(1.0, 1.0 / np.maximum(np.asarray(u, dtype=float), 1e-300)))

    @classmethod
    def poisson(cls):
        def h(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(u > 0, -np.expm1(-u) / np.where(u > 0, u, 1.0), 1.0)
            return val
        return cls("poisson", q=lambda u: -np.expm1(-np.asarray(u, dtype=float)), h=h)

    @classmethod
    def max_entropy(cls):
        return cls("max_entropy",
                   q=lambda u: np.asarray(u, dtype=float) / (1.0 + np.asarray(u, dtype=float)),
                   h=lambda u: 1.0 / (1.0 + np.asarray(u, dtype=float)))

    @classmethod
    def named(cls, name: str) -> "KernelSpec":
        try:
            return {"chung_lu": cls.chung_lu, "poisson": cls.poisson,
                    "max_entropy": cls.max_entropy}[name]()
        except KeyError:
            raise KeyError(f"unknown kernel '{name}'; "
                           "choose chung_lu, poisson, or max_entropy")

    def validate(self, grid=None):
        """Grid checks of the admissibility conditions; raises naming the clause."""
        if grid is None:
            grid = np.concatenate([[0.0], np.logspace(-6, 6, 201)])
        h_vals = np.asarray(self.h(grid), dtype=float)
        q_vals = np.asarray(self.q(grid), dtype=float)
        if np.any(q_vals > np.minimum(grid, 1.0) + 1e-9):
            raise KernelConditionError(f"kernel '{self.name}': q must satisfy q(u) <= min(u, 1)")
        if not math.isclose(float(h_vals[0]), 1.0, abs_tol=1e-9):
            raise KernelConditionError(f"kernel '{self.name}': h(0) must equal 1")
        if np.any(np.diff(h_vals) > 1e-12):
            raise KernelConditionError(f"kernel '{self.name}': h must be nonincreasing")
        if h_vals[-1] > 1e-3:
            raise KernelConditionError(f"kernel '{self.name}': h must decrease to 0")
        if np.any(np.diff(q_vals) < -1e-12):
            raise KernelConditionError(f"kernel '{self.name}': q must be nondecreasing")
        if q_vals[-1] < 1.0 - 1e-3:
            raise KernelConditionError(f"kernel '{self.name}': q must increase to 1")

    def kernel_id(self) -> int:
        return {"chung_lu": 0, "poisson": 1, "max_entropy": 2}.get(self.name, -1)


def connection_probability(kernel: KernelSpec, w_i, w_j, mu, n):
    """q(w_i w_j / (mu n)), clamped to [0, 1]."""
    if mu <= 0 or n <= 0:
        raise ValueError("mu and n must be positive")
    u = np.asarray(w_i, dtype=float) * np.asarray(w_j, dtype=float) / (mu * n)
    return np.clip(kernel.q(u), 0.0, 1.0)


def generate_irg(weights, kernel: KernelSpec, seed, mu=None) -> MultiGraph:
    """Simple graph with independent edges at probability q(w_i w_j / (mu n)).

    mu defaults to the empirical mean weight, which matches the stub count
    a pairing construction would have. Weight-descending geometric skipping
    under the min(u, 1) majorant makes the cost near-linear in the expected
    edge count while leaving every pair's marginal probability exact.
    """
    kernel.validate()
    values = weights.values if isinstance(weights, DegreeSequence) else np.asarray(weights)
    w = values.astype(np.float64)
    n = w.size
    if mu is None:
        mu = float(w.mean())
    mu_n = mu * n

    order = np.argsort(-w, kind="stable")
    w_sorted = w[order]

    seed_state = np.uint64(as_generator(seed).integers(0, 2**63 - 1, dtype=np.int64))
    cap = int(1.5 * mu_n / 2.0) + 4096
    kid = kernel.kernel_id()
    while True:
        out_i = np.empty(cap, np.int64)
        out_j = np.empty(cap, np.int64)
        cnt, state = _fast.pair_sample_core(w_sorted, mu_n, kid, seed_state, out_i, out_j)
        if cnt >= 0:
            break
        cap *= 2
    out_i, out_j = out_i[:cnt], out_j[:cnt]

    if kid == -1:
        # majorant candidates: thin to the actual kernel
        u_val = w_sorted[out_i] * w_sorted[out_j] / mu_n
        majorant = np.minimum(u_val, 1.0)
        accept_rng = np.random.default_rng(np.uint64(state))
        keep = accept_rng.random(cnt) * majorant < np.asarray(kernel.q(u_val), dtype=float)
        out_i, out_j = out_i[keep], out_j[keep]

    orig_i = order[out_i]
    orig_j = order[out_j]
    u = np.minimum(orig_i, orig_j)
    v = np.maximum(orig_i, orig_j)
    order2 = np.argsort(u * n + v, kind="stable")
    eu, ev = u[order2], v[order2]
    degrees = np.zeros(n, np.int64)
    np.add.at(degrees, eu, 1)
    np.add.at(degrees, ev, 1)
    return MultiGraph(n=n, edge_u=eu, edge_v=ev,
                      edge_mult=np.ones(eu.size, np.int64), degrees=degrees,
                      meta={"model": "irg", "kernel": kernel.name})
