"""The clustering limit constant three ways, plus the finite-size band sum.

The erased-graph clustering limit is proportional to a triple integral of
(xyz)^(-gamma-1) q(xy) q(xz) q(yz) over the positive octant. This script
evaluates it by adaptive log-space quadrature, by the exact pair-product
factorization, and by importance sampling on a truncated box, for each of
the three standard kernels. It then compares the band-restricted expected
triangle count against the realized triangle count of erased graphs.
"""

import numpy as np

from nullmodels import DegreeLaw, KernelSpec, erase, generate_cm, sample_sequence
from nullmodels.experiments import expected_triangles_truncated
from nullmodels.integrals import (TripleIntegralSpec, factorized_triple_constant,
                                  mc_triple_estimate, poisson_triple_constant,
                                  triple_integral, truncated_value)
from nullmodels.stats import triangle_count

GAMMA = 1.5

print(f"octant integral at gamma = {GAMMA}:")
for name, tol in (("poisson", 1e-4), ("max_entropy", 1e-3), ("chung_lu", 0.2)):
    k = KernelSpec.named(name)
    val, err = triple_integral(TripleIntegralSpec(gamma=GAMMA, kernel=k.q,
                                                  tolerance=tol))
    ref = factorized_triple_constant(GAMMA, k.q)
    print(f"  {name:12s} quadrature {val:9.4f} +- {err:.1e}   "
          f"factorized {ref:9.4f}")
print(f"  poisson closed form -Gamma(-gamma/2)^3/2 = "
      f"{poisson_triple_constant(GAMMA):.4f}")

print("\ntruncated to [0.1, 10]^3, quadrature vs importance sampling:")
for g in (1.2, 1.5, 1.8):
    quad, qerr = truncated_value(g, 0.1, tolerance=1e-3)
    mc, se = mc_triple_estimate(g, 0.1, n_samples=500_000, seed=5)
    print(f"  gamma={g}: {quad:8.4f} vs {mc:8.4f} +- {3 * se:.4f}")

print("\nband-restricted triangle prediction vs erased-graph reality (n=1e5):")
law = DegreeLaw(GAMMA)
rows = {eps: [] for eps in (0.2, 0.05, 0.02)}
for rep in range(10):
    seq = sample_sequence(law, 100_000, seed=100 + rep)
    g = generate_cm(seq, seed=200 + rep)
    simple, _ = erase(g)
    realized = triangle_count(simple)
    for eps in rows:
        predicted = expected_triangles_truncated(seq, epsilon=eps, use_mu=True,
                                                 mu=law.mean())
        rows[eps].append(realized / predicted)
for eps, ratios in rows.items():
    print(f"  eps={eps}: realized/predicted median {np.median(ratios):.2f}, "
          f"range [{min(ratios):.2f}, {max(ratios):.2f}]")
print("  (band truncation converges slowly at this exponent: the out-of-band"
      "\n   triangle mass shrinks only like a half power of eps)")
