"""Monte Carlo harness: scaling-law fits, limit-law comparisons, diagnostics.

Every experiment is driven by an ExperimentConfig and a master seed; each
replica derives its own generator stream from (seed, size index, replica
index), so results are bit-reproducible regardless of worker count and
execution order. Slope fits use medians of |statistic| because several of
the limit variables have infinite mean; degenerate replicas (regular degree
draws and the like) are counted and excluded, never silently dropped.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp, spearmanr

from .degree import DegreeLaw, DegreeSequence, sample_sequence, replica_rng
from .graphs import KernelSpec, generate_cm, generate_irg, erase
from .stable import (clustering_cm_norming, clustering_ecm_norming, pearson_norming,
                     power_sum_norming, sample_limit_batch)
from .stats import (DegenerateStatisticError, clustering_global, degree_power_sums,
                    pearson)

QUANTILES = (5, 25, 50, 75, 95)


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    model: str                      # cm | ecm | irg
    gamma: float
    sizes: list
    replicas: object                # int, or one int per size
    statistic: str
    seed: int
    kernel: str = "poisson"        # irg only
    normalization: str = "raw"     # raw | paper
    scale: float = 1.0

    def __post_init__(self):
        if self.model not in ("cm", "ecm", "irg"):
            raise ValueError(f"unknown model '{self.model}'")
        if not 1.0 < self.gamma < 2.0:
            raise ValueError(f"tail exponent must lie in (1, 2), got {self.gamma}")
        sizes = [int(s) for s in self.sizes]
        if sorted(set(sizes)) != sizes:
            raise ValueError("sizes must be strictly increasing")
        self.sizes = sizes
        reps = self.replicas
        self.replicas = [int(reps)] * len(sizes) if np.ndim(reps) == 0 \
            else [int(r) for r in reps]
        if len(self.replicas) != len(sizes) or min(self.replicas) < 2:
            raise ValueError("need at least 2 replicas per size")
        _parse_statistic(self.statistic)

    @property
    def law(self) -> DegreeLaw:
        return DegreeLaw(self.gamma, self.scale)


# -- per-replica statistic evaluation -----------------------------------------

STATISTICS = ("pearson_abs", "pearson_cm", "pearson_ecm", "clustering_global",
              "clustering_cm", "clustering_ecm", "erased_edges")


def _parse_statistic(name):
    if name.startswith("degree_power_sum(") and name.endswith(")"):
        return "degree_power_sum", int(name[len("degree_power_sum("):-1])
    if name not in STATISTICS:
        raise ValueError(f"unknown statistic '{name}'")
    return name, None


def _replica_value(config: ExperimentConfig, n: int, size_ix: int, rep_ix: int):
    """One replica's statistic; returns (value or None, degenerate flag)."""
    stat, power = _parse_statistic(config.statistic)
    law = config.law
    seq = sample_sequence(law, n, replica_rng(config.seed, size_ix, rep_ix, 0))
    if stat == "degree_power_sum":
        return float(degree_power_sums(seq.raw_values(), (power,))[power]), False

    gen_rng = replica_rng(config.seed, size_ix, rep_ix, 1)
    try:
        if config.model == "irg":
            g = generate_irg(seq, KernelSpec.named(config.kernel), gen_rng)
            simple = g
        else:
            g = generate_cm(seq, gen_rng)
            simple = None
            if config.model == "ecm" or stat in ("pearson_ecm", "clustering_ecm",
                                                 "erased_edges"):
                simple, report = erase(g)

        if stat == "erased_edges":
            return float(report.z_total), False
        if stat in ("pearson_cm",):
            return pearson(g).r, False
        if stat == "pearson_ecm":
            return pearson(simple).r, False
        if stat == "pearson_abs":
            target = simple if config.model in ("ecm", "irg") else g
            return abs(pearson(target).r), False
        if stat == "clustering_cm":
            return clustering_global(g).c_global, False
        if stat == "clustering_ecm":
            return clustering_global(simple).c_global, False
        if stat == "clustering_global":
            target = simple if config.model in ("ecm", "irg") else g
            return clustering_global(target).c_global, False
    except DegenerateStatisticError:
        return None, True
    raise AssertionError(f"unhandled statistic {stat}")


def scaling_records(config: ExperimentConfig, threads: int = 1):
    """One record per replica, in deterministic (size, replica) order."""
    tasks = [(config, n, i, j)
             for i, n in enumerate(config.sizes)
             for j in range(config.replicas[i])]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_replica_star, tasks, chunksize=8))
    else:
        results = [_replica_star(t) for t in tasks]
    return [{"size": n, "replica": j, "value": v, "degenerate": d}
            for (_, n, _, j), (v, d) in zip(tasks, results)]


def _group_records(config: ExperimentConfig, records):
    out = []
    pos = 0
    for i, n in enumerate(config.sizes):
        chunk = records[pos:pos + config.replicas[i]]
        pos += config.replicas[i]
        vals = np.array([r["value"] for r in chunk if not r["degenerate"]],
                        dtype=float)
        out.append((n, vals, sum(1 for r in chunk if r["degenerate"])))
    return out


def _collect(config: ExperimentConfig, threads: int = 1):
    """All replica values, grouped per size, in deterministic order."""
    return _group_records(config, scaling_records(config, threads=threads))


def _replica_star(task):
    return _replica_value(*task)


def _ols_slope(x, y):
    """(slope, standard error) of y on x; nan when x carries no spread."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 2 or np.ptp(x) == 0.0:
        return float("nan"), float("nan")
    xc = x - x.mean()
    slope = float(xc @ y / (xc @ xc))
    resid = y - y.mean() - slope * xc
    dof = max(x.size - 2, 1)
    se = float(np.sqrt(resid @ resid / dof / (xc @ xc)))
    return slope, se


@dataclass
class ScalingResult:
    statistic: str
    sizes: list
    medians: list
    quartiles: list                  # (q25, q75) per size
    counts: list
    degenerate: list
    sign_fraction: list              # fraction of negative values per size
    slope: float
    slope_stderr: float

    def summary(self) -> dict:
        return {
            "statistic": self.statistic,
            "sizes": self.sizes,
            "medians": self.medians,
            "quartiles": self.quartiles,
            "counts": self.counts,
            "degenerate": self.degenerate,
            "sign_fraction": self.sign_fraction,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
        }


def run_scaling(config: ExperimentConfig, threads: int = 1,
                records=None) -> ScalingResult:
    """Per-size medians of |statistic| and the log-log slope fit."""
    groups = _group_records(config, records) if records is not None \
        else _collect(config, threads=threads)
    medians, quarts, counts, degs, signs = [], [], [], [], []
    for n, vals, dropped in groups:
        if vals.size == 0:
            raise ExperimentError(f"all replicas degenerate at size {n}")
        medians.append(float(np.median(np.abs(vals))))
        quarts.append((float(np.percentile(np.abs(vals), 25)),
                       float(np.percentile(np.abs(vals), 75))))
        counts.append(int(vals.size))
        degs.append(int(dropped))
        signs.append(float(np.mean(vals < 0)))
    slope, se = _ols_slope(np.log(config.sizes), np.log(medians))
    return ScalingResult(statistic=config.statistic, sizes=config.sizes,
                         medians=medians, quartiles=quarts, counts=counts,
                         degenerate=degs, sign_fraction=signs,
                         slope=slope, slope_stderr=se)


@dataclass
class DistributionResult:
    statistic: str
    size: int
    rescaled: np.ndarray
    limit: np.ndarray
    ks: float
    quantiles: dict                  # percentile -> (empirical, limit)
    degenerate: int

    def summary(self) -> dict:
        return {
            "statistic": self.statistic, "size": self.size, "ks": self.ks,
            "n_empirical": int(self.rescaled.size), "n_limit": int(self.limit.size),
            "degenerate": self.degenerate,
            "quantiles": {str(q): list(v) for q, v in self.quantiles.items()},
        }


def _paper_rescale(config, stat, power, n, values):
    mu = config.law.mean()
    if stat == "degree_power_sum":
        return values / power_sum_norming(config.gamma, power, n, config.scale)
    if stat in ("pearson_ecm", "pearson_cm", "pearson_abs"):
        return values * pearson_norming(config.gamma, n, mu, config.scale)
    if stat in ("clustering_cm",) or (stat == "clustering_global" and config.model == "cm"):
        return values / clustering_cm_norming(config.gamma, n, config.scale)
    if stat in ("clustering_ecm",) or (stat == "clustering_global" and
                                       config.model in ("ecm", "irg")):
        return values / clustering_ecm_norming(config.gamma, n, config.scale)
    raise ValueError(f"no norming defined for statistic '{stat}'")


_LIMIT_COLUMN = {
    "degree_power_sum": lambda p: f"s{p}",
    "pearson_ecm": lambda p: "composed.pearson_ecm",
    "pearson_abs": lambda p: "composed.pearson_ecm",
    "clustering_cm": lambda p: "composed.clustering_cm",
    "clustering_ecm": lambda p: "composed.clustering_ecm",
}


def run_distribution(config: ExperimentConfig, n_limit: int = 20_000,
                     truncation: int = 4096, threads: int = 1) -> DistributionResult:
    """Rescale the largest-size replicas and compare to limit draws by KS."""
    stat, power = _parse_statistic(config.statistic)
    if stat == "clustering_global":
        stat = "clustering_cm" if config.model == "cm" else "clustering_ecm"
    if stat not in _LIMIT_COLUMN:
        raise ValueError(f"statistic '{config.statistic}' has no limit law")
    size_ix = len(config.sizes) - 1
    n = config.sizes[size_ix]
    sub = ExperimentConfig(model=config.model, gamma=config.gamma, sizes=[n],
                           replicas=[config.replicas[size_ix]],
                           statistic=config.statistic, seed=config.seed,
                           kernel=config.kernel, scale=config.scale)
    (_, vals, dropped), = _collect(sub, threads=threads)
    if vals.size == 0:
        raise ExperimentError(f"all replicas degenerate at size {n}")
    rescaled = _paper_rescale(config, stat, power, n, vals)
    if stat == "pearson_abs":
        rescaled = -rescaled
    lim = sample_limit_batch(config.gamma, n_limit, replica_rng(config.seed, 10**6),
                             truncation=truncation)
    limit = lim[_LIMIT_COLUMN[stat](power)]
    ks = float(ks_2samp(rescaled, limit).statistic)
    quantiles = {q: (float(np.percentile(rescaled, q)), float(np.percentile(limit, q)))
                 for q in QUANTILES}
    return DistributionResult(statistic=config.statistic, size=n, rescaled=rescaled,
                              limit=limit, ks=ks, quantiles=quantiles,
                              degenerate=dropped)


# -- fixed-sequence diagnostics -----------------------------------------------


@dataclass
class ConditionalVarianceResult:
    estimate: float                  # n * Var over pairings of the correlation
    prediction: float                # (n/L)(2 - sum D^6 / (sum D^3)^2)
    corrected_reference: float       # 2 n / L; the loop-pair cancellation is exact
    pairings: int

    @property
    def ratio(self) -> float:
        return self.estimate / self.prediction


def run_conditional_variance(seq: DegreeSequence, pairings: int, seed) \
        -> ConditionalVarianceResult:
    """Resample stub pairings on a fixed sequence; compare n Var(r) to theory.

    ``prediction`` is the degree-sum form (n/L)(2 - sum D^6/(sum D^3)^2);
    ``corrected_reference`` is 2n/L. Direct expansion of the pairing
    covariances shows the loop term contributes +2 sum D^6 / L, cancelling
    the -2 sum D^6 from the distinct-pair term, so the variance estimate
    tracks 2n/L; both values are reported.
    """
    if pairings < 1000:
        raise ValueError("need at least 1000 pairings for a stable variance")
    n = seq.n
    ps = degree_power_sums(seq, (2, 3, 6))
    s2, s3, s6 = ps[2], ps[3], ps[6]
    l_n = seq.total
    denom = s3 - s2 * s2 / l_n
    if denom == 0:
        raise DegenerateStatisticError("regular degree sequence")
    rng = replica_rng(seed) if isinstance(seed, int) else seed
    stubs = np.repeat(np.arange(n, dtype=np.int64), seq.values)
    deg = seq.values.astype(np.float64)
    rs = np.empty(pairings)
    neg = s2 * s2 / l_n
    for m in range(pairings):
        p = rng.permutation(stubs).reshape(-1, 2)
        edge_sum = 2.0 * float(deg[p[:, 0]] @ deg[p[:, 1]])
        rs[m] = (edge_sum - neg) / denom
    estimate = n * float(rs.var(ddof=1))
    prediction = (n / l_n) * (2.0 - s6 / (s3 * s3))
    return ConditionalVarianceResult(estimate=estimate, prediction=prediction,
                                     corrected_reference=2.0 * n / l_n,
                                     pairings=pairings)


@dataclass
class EdgeProbabilityResult:
    deviations: np.ndarray           # |empirical - exponential approx| per pair
    approx: np.ndarray
    empirical: np.ndarray
    weights: np.ndarray              # D_i D_j per sampled pair
    hub_deviation: float
    hub_pair: tuple
    pairings: int

    def percentile(self, q) -> float:
        return float(np.percentile(self.deviations, q))

    def weighted_mean_deviation(self) -> float:
        return float(np.sum(self.deviations * self.weights) / np.sum(self.weights))


def check_edge_probability(seq: DegreeSequence, n_pairs: int, pairings: int, seed) \
        -> EdgeProbabilityResult:
    """Empirical P(connected) over pairings vs 1 - exp(-D_i D_j / L) per pair.

    Pairs are sampled uniformly; the two largest-degree vertices are always
    tracked separately since the approximation is worst there.
    """
    n = seq.n
    rng = replica_rng(seed) if isinstance(seed, int) else seed
    chosen = set()
    while len(chosen) < n_pairs:
        i, j = (int(x) for x in rng.integers(0, n, 2))
        if i != j:
            chosen.add((min(i, j), max(i, j)))
    pair_arr = np.array(sorted(chosen), dtype=np.int64)
    top = np.argsort(seq.values)[-2:]
    hub = (int(min(top)), int(max(top)))
    keys = pair_arr[:, 0] * n + pair_arr[:, 1]
    hub_key = hub[0] * n + hub[1]

    stubs = np.repeat(np.arange(n, dtype=np.int64), seq.values)
    hits = np.zeros(keys.size)
    hub_hits = 0
    for m in range(pairings):
        p = rng.permutation(stubs).reshape(-1, 2)
        u = np.minimum(p[:, 0], p[:, 1])
        v = np.maximum(p[:, 0], p[:, 1])
        ek = np.unique(u * n + v)
        pos = np.clip(np.searchsorted(ek, keys), 0, ek.size - 1)
        hits += ek[pos] == keys
        hpos = np.searchsorted(ek, hub_key)
        hub_hits += hpos < ek.size and ek[hpos] == hub_key

    deg = seq.values.astype(np.float64)
    empirical = hits / pairings
    approx = -np.expm1(-deg[pair_arr[:, 0]] * deg[pair_arr[:, 1]] / seq.total)
    hub_approx = -np.expm1(-deg[hub[0]] * deg[hub[1]] / seq.total)
    return EdgeProbabilityResult(
        deviations=np.abs(empirical - approx), approx=approx, empirical=empirical,
        weights=deg[pair_arr[:, 0]] * deg[pair_arr[:, 1]],
        hub_deviation=abs(hub_hits / pairings - hub_approx), hub_pair=hub,
        pairings=pairings)


def expected_triangles_truncated(seq: DegreeSequence, epsilon: float,
                                 use_mu: bool, mu=None) -> float:
    """Band-restricted expected triangle sum from the degrees alone.

    Sums prod over pairs of (1 - exp(-D D' / denominator)) over all vertex
    triples whose degrees lie in [eps sqrt(mu n), sqrt(mu n) / eps]; the
    denominator is mu n when use_mu is set, the realized stub total
    otherwise. An empty band gives 0.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("band parameter must lie in (0, 1)")
    if mu is None:
        mu = float(np.mean(seq.values))
    n = seq.n
    root = np.sqrt(mu * n)
    band = seq.values[(seq.values >= epsilon * root) & (seq.values <= root / epsilon)]
    if band.size < 3:
        return 0.0
    denom = mu * n if use_mu else float(seq.total)
    d = band.astype(np.float64)
    p = -np.expm1(-np.outer(d, d) / denom)
    np.fill_diagonal(p, 0.0)
    total = 0.0
    for k in range(2, d.size):
        w = p[:k, k]
        total += 0.5 * float(w @ p[:k, :k] @ w)
    return total


@dataclass
class JointResult:
    empirical: np.ndarray            # columns: pearson, clustering_cm, clustering_ecm
    limit: np.ndarray
    empirical_spearman: np.ndarray
    limit_spearman: np.ndarray
    degenerate: int

    def max_entrywise_diff(self) -> float:
        return float(np.max(np.abs(self.empirical_spearman - self.limit_spearman)))

    def summary(self) -> dict:
        return {
            "replicas": int(self.empirical.shape[0]),
            "degenerate": self.degenerate,
            "empirical_spearman": self.empirical_spearman.tolist(),
            "limit_spearman": self.limit_spearman.tolist(),
            "max_entrywise_diff": self.max_entrywise_diff(),
        }


def run_joint(config: ExperimentConfig, n_limit: int = 20_000,
              threads: int = 1) -> JointResult:
    """Coupled triple per degree draw vs the coupled limit triple.

    Each replica builds one multigraph, reads the degree correlation and
    clustering off the erased graph and the clustering off the multigraph,
    rescales all three, and rank-correlates the columns; the limit side does
    the same on composed limit samples sharing one exponential series.
    """
    n = config.sizes[-1]
    size_ix = len(config.sizes) - 1
    reps = config.replicas[size_ix]
    law = config.law
    mu = law.mean()
    rows = []
    dropped = 0
    tasks = [(config.seed, size_ix, j, n, config.gamma, config.scale)
             for j in range(reps)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_joint_star, tasks, chunksize=4))
    else:
        results = [_joint_star(t) for t in tasks]
    for row in results:
        if row is None:
            dropped += 1
        else:
            rows.append(row)
    if len(rows) < 3:
        raise ExperimentError("too few non-degenerate replicas for rank correlations")
    emp = np.array(rows)
    emp[:, 0] *= pearson_norming(config.gamma, n, mu, config.scale)
    emp[:, 1] /= clustering_cm_norming(config.gamma, n, config.scale)
    emp[:, 2] /= clustering_ecm_norming(config.gamma, n, config.scale)
    lim = sample_limit_batch(config.gamma, n_limit, replica_rng(config.seed, 10**6 + 1))
    limit = np.column_stack([lim["composed.pearson_ecm"],
                             lim["composed.clustering_cm"],
                             lim["composed.clustering_ecm"]])
    emp_s = spearmanr(emp).statistic
    lim_s = spearmanr(limit).statistic
    return JointResult(empirical=emp, limit=limit, empirical_spearman=np.asarray(emp_s),
                       limit_spearman=np.asarray(lim_s), degenerate=dropped)


def _joint_star(task):
    seed, size_ix, j, n, gamma, scale = task
    law = DegreeLaw(gamma, scale)
    seq = sample_sequence(law, n, replica_rng(seed, size_ix, j, 0))
    g = generate_cm(seq, replica_rng(seed, size_ix, j, 1))
    simple, _ = erase(g)
    try:
        return (pearson(simple).r, clustering_global(g).c_global,
                clustering_global(simple).c_global)
    except DegenerateStatisticError:
        return None


def run_erased_sums(config: ExperimentConfig, threads: int = 1) -> dict:
    """Slopes of the erased-edge functionals sum D^p Y (p = 0, 1, 2) and the
    removed-multiplicity cross sum; returns one ScalingResult per functional."""
    if config.model != "ecm":
        raise ValueError("erased-edge sums are defined for the erased model")
    names = ["p0", "p1", "p2", "cross"]
    tasks = [(config.seed, i, j, n, config.gamma, config.scale)
             for i, n in enumerate(config.sizes)
             for j in range(config.replicas[i])]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_erased_star, tasks, chunksize=4))
    else:
        results = [_erased_star(t) for t in tasks]
    out = {}
    per_size = {name: [] for name in names}
    pos = 0
    for i, n in enumerate(config.sizes):
        chunk = np.array(results[pos:pos + config.replicas[i]])
        pos += config.replicas[i]
        for col, name in enumerate(names):
            per_size[name].append(np.median(chunk[:, col]))
    for name in names:
        med = per_size[name]
        slope, se = _ols_slope(np.log(config.sizes), np.log(np.maximum(med, 1e-300)))
        out[name] = ScalingResult(statistic=f"erased_sum_{name}", sizes=config.sizes,
                                  medians=[float(m) for m in med],
                                  quartiles=[], counts=list(config.replicas),
                                  degenerate=[0] * len(config.sizes),
                                  sign_fraction=[0.0] * len(config.sizes),
                                  slope=slope, slope_stderr=se)
    return out


def _erased_star(task):
    seed, size_ix, j, n, gamma, scale = task
    law = DegreeLaw(gamma, scale)
    seq = sample_sequence(law, n, replica_rng(seed, size_ix, j, 0))
    g = generate_cm(seq, replica_rng(seed, size_ix, j, 1))
    _, rep = erase(g)
    deg = seq.values.astype(np.float64)
    y = rep.removed_stubs.astype(np.float64)
    nonloop = rep.pair_u != rep.pair_v
    du = deg[rep.pair_u[nonloop]]
    dv = deg[rep.pair_v[nonloop]]
    cross = float((rep.pair_removed[nonloop] * du * dv).sum())
    return (float(y.sum()), float(deg @ y), float((deg * deg) @ y), cross)
