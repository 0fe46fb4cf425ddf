"""The first known channels whose mixed-unitary rank exceeds their Choi rank.

The Weyl channel at an odd prime p has a unique mixed-unitary
decomposition (its operator system has the critical dimension
p^2 - p + 1).  Direct-summing it with a one-dimensional identity raises
the Choi rank by one but forces the mixed-unitary rank to double:
Choi rank p + 1, mixed-unitary rank 2p.
"""
import numpy as np

from muchan import (certified_gap_rank, rank_bounds,
                    uniqueness_certificate, verify_decomposition, direct_sum,
                    identity_channel)
from muchan.gallery import weyl_channel

for p in (3, 5):
    phi = weyl_channel(p)
    b = rank_bounds(phi)
    print(f"weyl({p}): r={b.r}, s={b.s}, upper bound={b.upper}, exact={b.exact}")
    print("  unique decomposition certified:", uniqueness_certificate(phi))

    cert = certified_gap_rank(phi, 1)
    print(f"  gap channel weyl({p}) (+) 1: Choi rank {cert.choi_rank}, "
          f"mixed-unitary rank {cert.mu_rank}")
    summed = direct_sum(phi, identity_channel(1))
    res = verify_decomposition(summed, cert.decomposition)
    print(f"  {cert.decomposition.n_terms}-term certificate verified, "
          f"residual {res.choi_residual:.2e}")

print("\nthe six 4x4 unitaries for p = 3 (x 6 weight each):")
cert = certified_gap_rank(weyl_channel(3), 1)
for k, u in enumerate(cert.decomposition.unitaries, 1):
    print(f"A_{k} =")
    print(np.round(u, 6))
