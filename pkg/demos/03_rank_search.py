"""Numerically hunting the mixed-unitary rank with the Stiefel search.

A channel has mixed-unitary rank at most N exactly when some isometry V
makes every V Psi(X) V* (Psi complementary) have vanishing diagonal on
traceless X.  The scan below watches the search fail at N = 4 and 5 for
the gap channel and then succeed at N = 6, its true rank.

A failure is soft evidence only; found decompositions are verified.
"""
from muchan import SearchConfig, minimize_kraus, murank_search, verify_decomposition
from muchan.gallery import gap_channel

phi = gap_channel(3, 1)
report = murank_search(phi, SearchConfig(restarts=60, seed=0))

print("bounds:", report.bounds.as_dict())
for res in report.results:
    best = min(res.restart_log)
    print(f"N={res.n_terms}: {res.status:10s} best objective {best:.3e} "
          f"over {len(res.restart_log)} restarts")

print("\nsmallest N found:", report.n_found)
check = verify_decomposition(minimize_kraus(phi), report.decomposition)
print(f"decomposition verified: ok={check.ok}, residual={check.choi_residual:.2e}")
for p, u in zip(report.decomposition.probs, report.decomposition.unitaries):
    print(f"  weight {p:.4f}, unitary block structure "
          f"{'diag' if abs(u[0, 3]) < 1e-8 else 'full'}")
