"""One-sided stable limit variables built from a shared exponential series.

The building block is the increasing sequence G_1 < G_2 < ... of partial sums
of unit-mean exponentials. For any b > 1 the series sum_i G_i**(-b) converges
almost surely to a positive stable random variable of index 1/b. Evaluating
the series at b = p/gamma for p in {2, 3, 4, 6} from ONE exponential draw
yields a coupled vector of limits; the couplings matter because the limit
objects for degree correlations and clustering are ratios and polynomials of
these variables driven by the same extreme degrees.

Truncation after N terms is repaired with the continuum tail
integral(G_N, oo) t**(-b) dt, which is the exact conditional mean of the
discarded terms (the points beyond G_N form a unit-rate Poisson process, so
Campbell's formula applies). The residual is pure fluctuation with standard
deviation G_N**(0.5-b) / sqrt(2b-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .degree import DegreeLaw, as_generator
from .integrals import poisson_triple_constant

POWERS = (2, 3, 4, 6)


class TruncationError(ValueError):
    """Series truncation too short for the requested tolerance."""


def stable_constant(alpha: float):
    """Norming constants of the positive stable law of index alpha.

    Returns the pair (base, powered) with
    base = (1 - alpha) / (Gamma(2 - alpha) * cos(pi * alpha / 2)) and
    powered = base**alpha. base**(-1/alpha) is the scale of the series
    sum_i G_i**(-1/alpha) relative to the unit-scale stable law.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"stability index must lie in (0, 1), got {alpha}")
    base = (1.0 - alpha) / (gamma_fn(2.0 - alpha) * np.cos(np.pi * alpha / 2.0))
    return base, base**alpha


def truncation_fluctuation(b: float, n_terms: int) -> float:
    """Std. dev. of the tail-corrected truncation residual for exponent b."""
    return float(n_terms ** (0.5 - b) / np.sqrt(2.0 * b - 1.0))


@dataclass
class GammaSeries:
    """Partial sums of unit exponentials, the randomness behind every limit."""

    gamma_values: np.ndarray
    truncation: int
    seed: object = None

    def __post_init__(self):
        g = np.asarray(self.gamma_values, dtype=float)
        if g.ndim != 1 or g.size != self.truncation:
            raise ValueError("gamma_values must be 1-d with length equal to truncation")
        if g[0] <= 0 or np.any(np.diff(g) <= 0):
            raise ValueError("partial sums must be strictly increasing and positive")
        self.gamma_values = g

    @classmethod
    def draw(cls, truncation: int, seed, spacings=None) -> "GammaSeries":
        if spacings is not None:
            sp = np.asarray(spacings, dtype=float)
            if sp.size != truncation:
                raise ValueError("injected spacings must have length equal to truncation")
            return cls(np.cumsum(sp), truncation, seed=None)
        rng = as_generator(seed)
        return cls(np.cumsum(rng.exponential(size=truncation)), truncation, seed=seed)

    def powered_sum(self, b: float):
        """(truncated series, continuum tail) for sum_i G_i**(-b)."""
        head = float(np.sum(self.gamma_values ** (-b)))
        tail = float(self.gamma_values[-1] ** (1.0 - b) / (b - 1.0))
        return head, tail


@dataclass
class LimitSample:
    """A coupled draw of the four series limits plus the composed variables.

    composed maps statistic names to the limit random variables:
      pearson_ecm     -> -s2**2 / s3                      (always negative)
      clustering_cm   -> (s2**2 - 3*s4 + 2*s6/s2) / mu**3 (always >= 0)
      clustering_ecm  -> mu**(-1.5*gamma) * A / s2        (always positive)
    with A the poisson-kernel triple-integral constant for this gamma. Under
    the pure-Pareto degree law the series variables are already on the scale
    matched by the power-sum normings, so no extra constants appear here.
    """

    gamma: float
    mu: float
    s: dict
    tail_correction: dict
    composed: dict = field(default_factory=dict)


def _compose(gamma, mu, s2, s3, s4, s6, a_const):
    return {
        "pearson_ecm": -(s2**2) / s3,
        "clustering_cm": (s2**2 - 3.0 * s4 + 2.0 * s6 / s2) / mu**3,
        "clustering_ecm": mu ** (-1.5 * gamma) * a_const / s2,
    }


def sample_limit(gamma: float, truncation: int, seed, mu=None, spacings=None,
                 tolerance: float = 5e-3) -> LimitSample:
    """Draw the coupled limit vector (S at p = 2, 3, 4, 6) from one series.

    mu defaults to the mean of the unit-scale Pareto degree law for this
    gamma. Raises TruncationError when the fluctuation bound of the weakest
    exponent (p=2) exceeds ``tolerance``.
    """
    if truncation < 100:
        raise TruncationError(f"need at least 100 series terms, got {truncation}")
    if not 1.0 < gamma < 2.0:
        raise ValueError(f"tail exponent must lie in (1, 2), got {gamma}")
    worst = truncation_fluctuation(2.0 / gamma, truncation)
    if worst > tolerance:
        raise TruncationError(
            f"truncation {truncation} gives residual ~{worst:.2e} "
            f"above tolerance {tolerance:.2e}; increase the term count"
        )
    if mu is None:
        mu = DegreeLaw(gamma).mean()
    series = GammaSeries.draw(truncation, seed, spacings=spacings)
    s, tails = {}, {}
    for p in POWERS:
        head, tail = series.powered_sum(p / gamma)
        s[p] = head + tail
        tails[p] = tail
    composed = _compose(gamma, mu, s[2], s[3], s[4], s[6],
                        poisson_triple_constant(gamma))
    return LimitSample(gamma=gamma, mu=mu, s=s, tail_correction=tails, composed=composed)


def sample_limit_batch(gamma: float, n_samples: int, seed, truncation: int = 4096,
                       mu=None, block: int = 2048) -> dict:
    """Vectorized limit draws: arrays s2, s3, s4, s6 and the composed columns.

    One exponential matrix block at a time; every power shares the same rows,
    so the coupling between columns is exact.
    """
    if not 1.0 < gamma < 2.0:
        raise ValueError(f"tail exponent must lie in (1, 2), got {gamma}")
    if truncation < 100:
        raise TruncationError(f"need at least 100 series terms, got {truncation}")
    if mu is None:
        mu = DegreeLaw(gamma).mean()
    rng = as_generator(seed)
    cols = {p: np.empty(n_samples) for p in POWERS}
    done = 0
    while done < n_samples:
        rows = min(block, n_samples - done)
        g = np.cumsum(rng.exponential(size=(rows, truncation)), axis=1)
        last = g[:, -1]
        for p in POWERS:
            b = p / gamma
            cols[p][done:done + rows] = (g ** (-b)).sum(axis=1) + last ** (1.0 - b) / (b - 1.0)
        done += rows
    a_const = poisson_triple_constant(gamma)
    composed = _compose(gamma, mu, cols[2], cols[3], cols[4], cols[6], a_const)
    out = {f"s{p}": cols[p] for p in POWERS}
    out.update({f"composed.{k}": v for k, v in composed.items()})
    return out


def limit_samples_to_csv(samples: dict, path):
    """Write the batch-sampler columns as CSV for external plotting."""
    names = sorted(samples.keys())
    data = np.column_stack([samples[k] for k in names])
    header = ",".join(names)
    np.savetxt(path, data, delimiter=",", header=header, comments="")


# -- normings for the pure-Pareto degree law ---------------------------------
#
# With P(D > t) = c * t**(-gamma) the top order statistics behave like
# (c*n / G_i)**(1/gamma), so the p-th power sums divided by (c*n)**(p/gamma)
# converge to the series limits directly. The constants below are therefore
# plain powers of c and n; anything fancier belongs to other normalizations
# of the stable family, not to the series representation used here.


def power_sum_norming(gamma: float, p: int, n: int, scale: float = 1.0) -> float:
    """a(n, p) with sum(D_i**p) / a -> S at index gamma/p."""
    if p / gamma <= 1.0:
        raise ValueError(f"need p/gamma > 1 for a stable limit, got p={p}, gamma={gamma}")
    return (scale * n) ** (p / gamma)


def pearson_norming(gamma: float, n: int, mu: float, scale: float = 1.0) -> float:
    """Multiplier b(n) with b(n) * r_hat -> -S_2**2 / S_3."""
    return mu * scale ** (-1.0 / gamma) * n ** (1.0 - 1.0 / gamma)


def clustering_cm_norming(gamma: float, n: int, scale: float = 1.0) -> float:
    """a(n) with multigraph clustering / a -> (S_2**2 - 3 S_4 + 2 S_6/S_2)/mu**3."""
    return scale ** (4.0 / gamma) * n ** (4.0 / gamma - 3.0)


def clustering_ecm_norming(gamma: float, n: int, scale: float = 1.0) -> float:
    """a(n) with erased-graph clustering / a -> mu**(-1.5 gamma) A / S_2.

    The gamma**3 factor is the cube of the local intensity of the rescaled
    degree point process near sqrt(n); it multiplies the triple integral in
    the triangle count and must live in the norming once the limit is quoted
    with the bare integral constant.
    """
    exponent = (-3.0 * gamma**2 + 6.0 * gamma - 4.0) / (2.0 * gamma)
    return gamma**3 * scale ** (3.0 - 2.0 / gamma) * n**exponent


def normalized_degree_sum_reference(gamma: float, p: int, n: int, scale: float = 1.0) -> float:
    """Alias of power_sum_norming, the reference norming used by experiments."""
    return power_sum_norming(gamma, p, n, scale)
