"""
Watching the one-club collapse
==============================

A plain swarm (uncoded pieces, server picked like any other peer) is unstable
whenever more than one peer arrives per slot on average. Peers that hold
every piece but one pile up into a club that can only be drained by the
server, one member per slot, while arrivals keep coming at rate two.
"""

from fountainswarm import POLICIES, SimConfig, run
from fountainswarm.metrics import growth_slope

cfg = SimConfig(policy=POLICIES["baseline"], lam=2.0, k=5,
                max_slots=10_000, pop_threshold=1_000, seed=11)
res = run(cfg)

print(f"verdict: {res.verdict} (population passed {cfg.pop_threshold} "
      f"at slot {res.diverged_at})")

# sample the trajectory: population plus the share of peers sitting at each
# rank. alpha[k-1] is the one-club share.
print("\n  slot  population  one_club  alpha profile")
for rec in res.records[:: len(res.records) // 12]:
    alpha = " ".join(f"{a:.2f}" for a in rec.alpha)
    print(f"  {rec.slot:>5} {rec.population:>10} {str(rec.one_club):>9}   [{alpha}]")

# once the club dominates, the swarm grows by about arrivals minus the one
# departure per slot the server can produce: lambda - 1 = 1 peer per slot
n = len(res.records)
slope = growth_slope(res.records, (n // 2, n))
print(f"\ngrowth slope over the back half: {slope:.2f} peers/slot "
      f"(arrivals {cfg.lam:.0f}/slot, server drains 1/slot)")
