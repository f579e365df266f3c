"""
Mapping the stability boundary
==============================

For the combined policy the boundary sits at arrival rate = k: the swarm
stands as long as each arrival can be matched by k chunk downloads spread
across the population. The sweep below estimates the stable fraction on a
small (k, rate) grid.
"""

from fountainswarm import sweep_boundary

k_values = (2, 3, 4)
rates = (1.5, 2.5, 3.5, 4.5, 6.0)

# short horizons keep this a coffee-length demo; the acceptance runs use
# 50k-slot horizons for the calibrated version of the same picture
rows = sweep_boundary(k_values, rates, replicates=3, master_seed=5,
                      max_slots=4_000, pop_threshold=400)

cell = {(r["k"], r["lambda"]): r["stable_fraction"] for r in rows}
print("stable fraction (3 seeds each)\n")
print("  rate:   " + "".join(f"{lam:>6}" for lam in rates))
for k in k_values:
    line = "".join(f"{cell[(k, lam)]:>6.2f}" for lam in rates)
    print(f"  k = {k}  {line}")

print("""
stable above the diagonal (rate < k), divergent below it. Just past the
boundary the collapse can take a long time to nucleate (the swarm sits in
a long-lived diverse state before the missing-chunk club forms), so cells
like k=4 at rate 4.5 still read stable on a horizon this short.""")
