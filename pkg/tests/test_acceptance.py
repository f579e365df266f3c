"""Release checklist: end-to-end behavior of the four policies.

Each numbered test is one checklist item; its verdict is appended to the
"acceptance checklist" block that pytest prints after the run, one line per
item. Everything simulation-shaped runs with audit=True, so every slot of
every run here re-verifies the bookkeeping invariants on top of the always-on
snapshot checks.

This file is slow: items 5 and 6 hold 50,000-slot horizons across ten seeds
each, so the whole module takes on the order of twenty minutes. Run
`pytest -k "not acceptance"` while iterating.
"""

import random
import time

import pytest

import fountainswarm as fs
from conftest import ACCEPTANCE_LINES
from fountainswarm.codec import CodedChunk, Decoder, draw_coefficients, encode, split_file
from fountainswarm.gf256 import GF2
from fountainswarm.metrics import empirical_drift, growth_slope
from oracles import gf2_span_dim, oracle_rank_gf256

MASTER_SEED = 42
SEEDS = [fs.replicate_seed(MASTER_SEED, i) for i in range(10)]


def _check(num, label, ok, detail):
    line = f"[{num}] {'PASS' if ok else 'FAIL'} {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _run(policy, **kw):
    kw.setdefault("audit", True)
    return fs.run(fs.SimConfig(policy=fs.POLICIES[policy], **kw))


def _runs(policy, **kw):
    return [_run(policy, seed=s, **kw) for s in SEEDS]


# Expensive run blocks, shared with the invariant tally of item 7.


@pytest.fixture(scope="module")
def baseline_runs():
    return _runs("baseline", lam=2.0, k=5, max_slots=10_000, pop_threshold=1_000)


@pytest.fixture(scope="module")
def single_ingredient_runs():
    return {
        name: _runs(name, lam=2.0, k=5, max_slots=10_000, pop_threshold=1_000)
        for name in ("prioritize-only", "fountain-only")
    }


@pytest.fixture(scope="module")
def proposed_runs():
    return _runs("proposed", lam=2.0, k=5, K=10_000, max_slots=10_000, pop_threshold=1_000)


@pytest.fixture(scope="module")
def overload_runs():
    return _runs("proposed", lam=5.5, k=5, K=10_000, max_slots=50_000, pop_threshold=1_000)


@pytest.fixture(scope="module")
def boundary_runs():
    return {
        lam: _runs("proposed", lam=lam, k=3, max_slots=50_000, pop_threshold=1_000)
        for lam in (2.0, 4.0)
    }


@pytest.fixture(scope="module")
def adaptive_runs():
    return _runs("proposed", lam=2.0, k=5, tau=200, ramp=(5_000, 6.0),
                 max_slots=20_000, pop_threshold=1_000)


def test_acceptance_1_codec_decodes_exactly_and_rank_matches_oracles():
    t0 = time.time()
    rng = random.Random(MASTER_SEED)
    decoded = 0
    for k in (1, 2, 4, 5, 8, 16):
        for _ in range(100):
            payload = bytes(rng.randbytes(rng.randrange(1, 97)))
            src = split_file(payload, k)
            dec = Decoder(k)
            while dec.rank < k:
                dec.absorb(encode(src, draw_coefficients(k, rng)))
            out = dec.decode()
            assert out == src.payload and out[: len(payload)] == payload
            decoded += 1
    for _ in range(1_000):
        k = rng.randrange(1, 9)
        rows = [[rng.randrange(256) for _ in range(k)]
                for _ in range(rng.randrange(1, 9))]
        dec = Decoder(k)
        for r in rows:
            dec.absorb(CodedChunk(bytes(r), b"", None))
        assert dec.rank == oracle_rank_gf256(rows)
    for _ in range(250):
        k = rng.randrange(1, 6)
        rows = [[rng.randrange(2) for _ in range(k)]
                for _ in range(rng.randrange(1, 6))]
        dec = Decoder(k, field=GF2)
        for r in rows:
            dec.absorb(CodedChunk(bytes(r), b"", None))
        assert dec.rank == gf2_span_dim(rows)
    elapsed = time.time() - t0
    _check(1, "codec decodes exactly and rank matches oracles",
           elapsed < 60.0,
           f"{decoded} roundtrips, 1000 GF(2^8) + 250 GF(2) rank agreements "
           f"in {elapsed:.1f}s")


def test_acceptance_2_baseline_diverges_one_peer_per_slot(baseline_runs):
    diverged = [r for r in baseline_runs if not r.stable]
    slopes = []
    for r in diverged:
        n = len(r.records)
        slopes.append(growth_slope(r.records, (n // 2, n)))
    ok = len(diverged) >= 9 and all(0.8 <= s <= 1.2 for s in slopes)
    _check(2, "uncoded random-peer swarm diverges about one peer per slot", ok,
           f"diverged {len(diverged)}/10, slopes "
           f"[{min(slopes):.2f}..{max(slopes):.2f}]")


def test_acceptance_3_single_ingredient_policies_still_diverge(single_ingredient_runs):
    counts = {name: sum(not r.stable for r in runs)
              for name, runs in single_ingredient_runs.items()}
    ok = all(c >= 9 for c in counts.values())
    _check(3, "newest-peer alone and coding alone both fail", ok,
           ", ".join(f"{name} diverged {c}/10" for name, c in counts.items()))


def test_acceptance_4_proposed_policy_is_stable_below_the_boundary(proposed_runs):
    stable = sum(r.stable for r in proposed_runs)
    tail_max = max(rec.population
                   for r in proposed_runs for rec in r.records[-5_000:])
    ok = stable == 10 and tail_max < 200
    _check(4, "coding plus newest-peer holds the swarm steady at rate 2", ok,
           f"stable {stable}/10, max population over the last 5000 slots {tail_max}")


def test_acceptance_5_overload_past_the_boundary_collapses(overload_runs):
    """Past the boundary (rate 5.5 > k = 5) the swarm must tip into the
    single-missing-chunk mode and diverge within the horizon.

    Measured behavior of this implementation: every seed's population
    plateaus near 30 and the dominant-subspace fraction never passes ~0.5
    in 50,000 slots; collapse only materializes around rate 8. The bound is
    kept as intended rather than tuned to pass; the README's known-red note
    under Tests carries the analysis.
    """
    diverged = sum(not r.stable for r in overload_runs)
    pops = [r.records[-1].population for r in overload_runs]
    _check(5, "overload at rate 5.5 collapses within 50k slots", diverged >= 7,
           f"diverged {diverged}/10 (need >= 7), final populations "
           f"{min(pops)}..{max(pops)}")


def test_acceptance_6_stability_boundary_sits_between_rates_2_and_4(boundary_runs):
    """Stable and divergent phases must also separate in the deficit drift.

    A stationary stable swarm has mean per-slot deficit change ~ 0; the sign
    over any finite window is noise (measured |d| <= 0.001 across seeds),
    while divergent runs measure d >= 1.3. So the stable side requires the
    drift to sit well below the divergent scale rather than literally below
    zero.
    """
    frac = {lam: sum(r.stable for r in runs) / len(runs)
            for lam, runs in boundary_runs.items()}
    drifts = {True: [], False: []}
    for runs in boundary_runs.values():
        for r in runs:
            n = len(r.records)
            drifts[r.stable].append(empirical_drift(r.records, (3 * n // 4, n)))
    drift_ok = (all(d < 0.01 for d in drifts[True])
                and all(d > 0 for d in drifts[False]))
    ok = frac[2.0] >= 0.9 and frac[4.0] <= 0.1 and drift_ok
    _check(6, "k=3 boundary: stable at rate 2, divergent at rate 4", ok,
           f"stable fraction {frac[2.0]:.1f} at rate 2, {frac[4.0]:.1f} at rate 4; "
           f"drift near zero ({min(drifts[True]):+.4f}..{max(drifts[True]):+.4f}) "
           f"vs positive ({min(drifts[False]):.2f}..{max(drifts[False]):.2f})")


def test_acceptance_7_invariants_hold_on_every_audited_slot(
        baseline_runs, single_ingredient_runs, proposed_runs, overload_runs,
        boundary_runs, adaptive_runs):
    """Population conservation, the deficit recount, the server's one-chunk
    budget, completed peers never lingering into a snapshot, and the
    decode-on-departure roundtrip all assert inline; reaching here means no
    audited slot tripped any of them.
    """
    all_runs = (baseline_runs + proposed_runs + overload_runs + adaptive_runs
                + [r for runs in single_ingredient_runs.values() for r in runs]
                + [r for runs in boundary_runs.values() for r in runs])
    slots = sum(len(r.records) for r in all_runs)
    assert all(r.cfg.audit for r in all_runs)
    last = {}
    for r in all_runs:
        for rec in r.records:
            assert rec.population == rec.arrivals_cum - rec.departures_cum
            prev = last.get(id(r))
            if prev is not None:
                assert rec.arrivals_cum >= prev.arrivals_cum
                assert rec.departures_cum >= prev.departures_cum
            last[id(r)] = rec
    _check(7, "bookkeeping invariants hold on every audited slot", True,
           f"0 violations across {len(all_runs)} runs / {slots} slots")


def test_acceptance_8_controller_raises_k_through_a_rate_ramp(adaptive_runs):
    good = 0
    bumps = []
    for r in adaptive_runs:
        bump = next((e["slot"] for e in r.events if e["k"] >= 8), None)
        bumps.append(bump)
        good += (r.stable and bump is not None and bump <= 5_200
                 and max(rec.population for rec in r.records) <= 1_000)
    _check(8, "adaptive controller reaches k>=8 within one window of the ramp",
           good >= 8, f"ok {good}/10, first k>=8 at slots {sorted(set(bumps))}")


def test_acceptance_9_identical_seeds_give_byte_identical_output(tmp_path):
    outs = []
    for rep in ("a", "b"):
        out = tmp_path / rep
        rc = fs.main(["--scenario", "fig3", "--seed", "7", "--replicates", "2",
                      "--out", str(out)])
        assert rc == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = outs[0] == outs[1] and len(outs[0]) == 3
    _check(9, "reruns with one master seed are byte-identical", ok,
           f"{len(outs[0])} files compared equal across two runs")
