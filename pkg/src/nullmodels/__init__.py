"""Heavy-tailed random-graph null models and their scaling laws.

Generation (stub matching, erasure, independent weighted pairs), exact graph
statistics (degree correlation with its sign split, multiplicity-weighted
triangles, clustering), coupled stable-limit sampling from one exponential
series, the clustering limit integrals, and a reproducible Monte Carlo
harness for slope fits and distributional comparisons.
"""

__version__ = "0.1.0"

from .degree import DegreeLaw, DegreeSequence, sample_degree, sample_sequence
from .graphs import (ErasureReport, KernelSpec, MultiGraph, connection_probability,
                     erase, generate_cm, generate_ecm, generate_irg)
from .integrals import (TripleIntegralSpec, factorized_triple_constant,
                        karamata_reference, mc_triple_estimate,
                        poisson_triple_constant, triple_integral, truncated_value)
from .stable import (GammaSeries, LimitSample, clustering_cm_norming,
                     clustering_ecm_norming, normalized_degree_sum_reference,
                     pearson_norming, power_sum_norming, sample_limit,
                     sample_limit_batch, stable_constant)
from .stats import (ClusteringResult, DegenerateStatisticError, PearsonBreakdown,
                    clustering_average, clustering_global, degree_power_sums,
                    pearson, triangle_count)

__all__ = [name for name in dir() if not name.startswith("_")]
