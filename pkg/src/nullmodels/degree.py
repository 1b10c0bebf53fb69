"""Heavy-tailed integer degree law and i.i.d. degree sequences.

The law is a pure Pareto tail on the integers: P(D > t) = c * t**(-gamma)
exactly for every integer t >= c**(1/gamma), with tail exponent
gamma in (1, 2). Degrees then have a finite mean but infinite variance,
which is the regime where the configuration model is essentially never
simple and erasure matters.

Sampling is by inversion with a ceiling, so the survival function is exact
at integers and every draw is a deterministic function of one uniform
variate. All moments and truncated moments of the law are computed from
exact Hurwitz-zeta expressions rather than Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta


class InvalidUniformError(ValueError):
    """Raised when an inversion variate lies outside (0, 1)."""


@dataclass(frozen=True)
class DegreeLaw:
    """Integer Pareto law P(D > t) = scale * t**(-gamma) with gamma in (1, 2)."""

    gamma: float
    scale: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.gamma < 2.0:
            raise ValueError(f"tail exponent must lie in (1, 2), got {self.gamma}")
        if not self.scale > 0:
            raise ValueError(f"tail constant must be positive, got {self.scale}")
        if self.scale > 1.0:
            # survival at t=1 would exceed 1
            raise ValueError(f"tail constant must be <= 1, got {self.scale}")

    def survival(self, t):
        """P(D > t). D is integer-valued, so this is a step function in t."""
        t = np.floor(np.asarray(t, dtype=float))
        out = self.scale * np.where(t >= 1.0, t, 1.0) ** (-self.gamma)
        return np.where(t < 1.0, 1.0, out)

    def pmf(self, d):
        """P(D = d) at integer d >= 1."""
        d = np.asarray(d, dtype=float)
        return self.survival(d - 1.0) - self.survival(d)

    def mean(self) -> float:
        """E[D] = 1 + scale * zeta(gamma), exact for the integer Pareto law."""
        return 1.0 + self.scale * float(zeta(self.gamma, 1))


def sample_degree(law: DegreeLaw, u) -> np.ndarray:
    """Invert one or more uniform(0,1) variates into integer degrees.

    D = max(1, ceil((c/u)**(1/gamma))), so that P(D > t) = c * t**(-gamma)
    holds exactly for integers t >= c**(1/gamma). Deterministic in u.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise InvalidUniformError("uniform variate must lie strictly inside (0, 1)")
    d = np.ceil((law.scale / u_arr) ** (1.0 / law.gamma))
    d = np.maximum(d, 1.0).astype(np.int64)
    if np.ndim(u) == 0:
        return int(d)
    return d


@dataclass
class DegreeSequence:
    """An i.i.d. degree sample with even-sum bookkeeping.

    ``values`` holds the raw draws except that, when the raw sum is odd, one
    is added to the last entry so the stub count is even; ``parity_adjusted``
    records whether that happened. ``raw_values`` undoes the adjustment for
    statistics that must see the unmodified sample.
    """

    values: np.ndarray
    parity_adjusted: bool
    total: int = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("degree sequence must be a non-empty 1-d array")
        if np.any(self.values < 1):
            raise ValueError("all degrees must be >= 1")
        self.total = int(self.values.sum())

    @property
    def n(self) -> int:
        return self.values.size

    def raw_values(self) -> np.ndarray:
        """The sample before the parity fix."""
        if not self.parity_adjusted:
            return self.values
        raw = self.values.copy()
        raw[-1] -= 1
        return raw

    def to_text(self) -> str:
        """Newline-delimited integers."""
        return "\n".join(str(int(v)) for v in self.values) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DegreeSequence":
        values = np.array([int(line) for line in text.split() if line], dtype=np.int64)
        return cls(values=values, parity_adjusted=False)


def sample_sequence(law: DegreeLaw, n: int, seed) -> DegreeSequence:
    """Draw n i.i.d. degrees and make the total even.

    When the raw sum is odd, 1 is added to the last entry; the flag on the
    returned sequence records this. Same (law, n, seed) always returns the
    same sequence.
    """
    if n < 1:
        raise ValueError(f"need at least one vertex, got n={n}")
    rng = as_generator(seed)
    u = rng.random(n)
    # rng.random can emit exactly 0.0; the open-interval contract needs u > 0
    while True:
        zero = u == 0.0
        if not zero.any():
            break
        u[zero] = rng.random(int(zero.sum()))
    values = sample_degree(law, u)
    parity = bool(values.sum() % 2 == 1)
    if parity:
        values = values.copy()
        values[-1] += 1
    return DegreeSequence(values=values, parity_adjusted=parity)


def law_moment_tail(law: DegreeLaw, t: float) -> float:
    """E[D * min(1, D/t)], evaluated exactly.

    Splits the sum at m = ceil(t): terms below m carry the factor d/t and are
    summed directly; the remainder equals E[D; D >= m], which reduces by Abel
    summation to m * P(D > m-1) + c * zeta(gamma, m). For t <= 1 the minimum
    saturates and the value is E[D]. Decays like t**(1-gamma) for large t.
    """
    if not t > 0:
        raise ValueError(f"threshold must be positive, got {t}")
    if t <= 1.0:
        return law.mean()
    m = int(np.ceil(t))
    d = np.arange(1, m, dtype=float)
    head = float(np.sum(law.pmf(d) * d * d)) / t if m > 1 else 0.0
    surv_below = float(law.survival(m - 1))
    tail = m * surv_below + law.scale * float(zeta(law.gamma, m))
    return head + tail


def as_generator(seed) -> np.random.Generator:
    """Accept an int, a SeedSequence, or a Generator; return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def replica_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Independent stream for one replica, keyed by (master seed, indices)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(path)))
