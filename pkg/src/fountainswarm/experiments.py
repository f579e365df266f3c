"""Named scenarios, seeded batch running, and plot-ready CSV output.

A scenario is a SimConfig with a short tag. The builtin ones cover the four
policies at their reference operating points plus the adaptive-k ramp:

* fig3          baseline at lam=2: diverges almost immediately
* fig4          prioritize-only at lam=2: still diverges
* fig4_fountain fountain-only at lam=2: still diverges
* fig5          proposed at lam=2 < k=5: stays small for the whole horizon
* fig6          proposed at lam=5.5 > k=5: the long-horizon overload case
* adaptive      proposed with the rate controller and a mid-run rate step

Every run is pinned by (master seed, scenario, replicate index); rerunning a
scenario with the same master seed must reproduce its CSVs byte for byte, so
the writers below avoid timestamps, environment lookups, and dict-order
accidents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .metrics import empirical_drift, growth_slope
from .swarm import POLICIES, POLICY_NAMES, RunResult, SimConfig, run

# Replicate index lives in the low bits, the master seed above it, so one
# master seed spawns up to 2^20 non-colliding run seeds.
REPLICATE_BITS = 20


def replicate_seed(master_seed: int, index: int) -> int:
    if not 0 <= index < (1 << REPLICATE_BITS):
        raise ValueError(f"replicate index out of range: {index}")
    return (master_seed << REPLICATE_BITS) | index


SCENARIOS: dict[str, SimConfig] = {
    "fig3": SimConfig(policy=POLICIES["baseline"], lam=2.0, k=5),
    "fig4": SimConfig(policy=POLICIES["prioritize-only"], lam=2.0, k=5),
    "fig4_fountain": SimConfig(policy=POLICIES["fountain-only"], lam=2.0, k=5),
    "fig5": SimConfig(policy=POLICIES["proposed"], lam=2.0, k=5),
    "fig6": SimConfig(policy=POLICIES["proposed"], lam=5.5, k=5, max_slots=50_000),
    "adaptive": SimConfig(
        policy=POLICIES["proposed"],
        lam=2.0,
        k=5,
        tau=200,
        ramp=(5_000, 6.0),
        max_slots=20_000,
    ),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One scenario crossed with its replicate seeds and an output directory."""

    scenario: str
    cfg: SimConfig
    seeds: tuple[int, ...]
    out_dir: Path

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "seeds", tuple(self.seeds))


def make_spec(
    scenario: str,
    out_dir: Path,
    master_seed: int = 0,
    replicates: int = 1,
    cfg: Optional[SimConfig] = None,
) -> ExperimentSpec:
    """Bind a scenario tag to its config and derived replicate seeds.

    `cfg` overrides the builtin table, which allows custom tags; a builtin
    tag without an override uses the table entry.
    """
    if cfg is None:
        if scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {scenario!r}; "
                             f"builtin: {', '.join(sorted(SCENARIOS))}")
        cfg = SCENARIOS[scenario]
    seeds = tuple(replicate_seed(master_seed, i) for i in range(replicates))
    return ExperimentSpec(scenario=scenario, cfg=cfg, seeds=seeds, out_dir=out_dir)


# ------------------------------------------------------------------- output

def _g6(x: float) -> str:
    return f"{x:.6g}"


def csv_header(k: int) -> str:
    head = "slot,population,arrivals_cum,departures_cum,M,one_club,server_served_new"
    return head + "," + ",".join(f"alpha_{i}" for i in range(k))


def render_csv(scenario: str, cfg: SimConfig, result: RunResult) -> str:
    """One run as a CSV string: commented config echo, header, rows, events.

    The alpha columns span the configured k. Adaptive runs can outgrow that
    once the controller raises k; the extra top-rank buckets are dropped from
    the rows (population and M still account for every peer) and the bump
    itself lands in the trailing event comments.
    """
    lines = [
        f"# scenario = {scenario}",
        f"# policy = {POLICY_NAMES[cfg.policy]}",
        f"# k = {cfg.k}",
        f"# K = {cfg.K}",
        f"# lambda = {_g6(cfg.lam)}",
        f"# slots = {cfg.max_slots}",
        f"# threshold = {cfg.pop_threshold}",
        f"# seed = {cfg.seed}",
        f"# tau = {cfg.tau if cfg.tau is not None else 'none'}",
        "# ramp = " + (f"{cfg.ramp[0]}:{_g6(cfg.ramp[1])}" if cfg.ramp else "none"),
        f"# verdict = {result.verdict}",
        csv_header(cfg.k),
    ]
    k = cfg.k
    for rec in result.records:
        alpha = rec.alpha[:k]
        if len(alpha) < k:
            alpha = alpha + (0.0,) * (k - len(alpha))
        lines.append(
            f"{rec.slot},{rec.population},{rec.arrivals_cum},{rec.departures_cum},"
            f"{rec.M},{int(rec.one_club)},{int(rec.server_served_new)},"
            + ",".join(_g6(a) for a in alpha)
        )
    for e in result.events:
        lines.append(f"# event slot={e['slot']} k={e['k']} epoch={e['epoch']}")
    return "\n".join(lines) + "\n"


def summary_row(scenario: str, seed: int, result: RunResult) -> dict:
    """Per-run verdict row. Drift covers the last quarter of the recorded
    slots, the growth slope the last half; both need two records to exist."""
    records = result.records
    n = len(records)
    drift = empirical_drift(records, (3 * n // 4, n)) if n - 3 * n // 4 >= 2 else None
    slope = growth_slope(records, (n // 2, n)) if n - n // 2 >= 2 else None
    row = {
        "scenario": scenario,
        "seed": seed,
        "verdict": "stable" if result.stable else "diverged",
        "divergence_slot": result.diverged_at,
        "final_population": records[-1].population if records else 0,
        "mean_drift": drift,
        "growth_slope": slope,
    }
    if result.events:
        row["events"] = result.events
    return row


def _round6(x):
    return None if x is None else float(f"{x:.6g}")


def render_summary(rows: Sequence[dict]) -> str:
    out = []
    for row in rows:
        slim = dict(row)
        slim["mean_drift"] = _round6(slim.get("mean_drift"))
        slim["growth_slope"] = _round6(slim.get("growth_slope"))
        out.append(json.dumps(slim, sort_keys=True))
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ running

def run_replicates(spec: ExperimentSpec) -> list[dict]:
    """Run every replicate of one spec, write one CSV per run, return rows."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, seed in enumerate(spec.seeds):
        cfg = replace(spec.cfg, seed=seed)
        result = run(cfg)
        path = spec.out_dir / f"{spec.scenario}_r{i}.csv"
        path.write_text(render_csv(spec.scenario, cfg, result))
        rows.append(summary_row(spec.scenario, seed, result))
    return rows


def run_matrix(specs: Sequence[ExperimentSpec]) -> list[dict]:
    """Run a batch of specs; one summary.jsonl per output directory."""
    rows = []
    by_dir: dict[Path, list[dict]] = {}
    for spec in specs:
        spec_rows = run_replicates(spec)
        rows.extend(spec_rows)
        by_dir.setdefault(spec.out_dir, []).extend(spec_rows)
    for out_dir, dir_rows in by_dir.items():
        (out_dir / "summary.jsonl").write_text(render_summary(dir_rows))
    return rows


def sweep_boundary(
    k_values: Sequence[int],
    lambda_grid: Sequence[float],
    replicates: int = 5,
    master_seed: int = 0,
    max_slots: int = 10_000,
    pop_threshold: int = 1_000,
) -> list[dict]:
    """Empirical stability fraction of the proposed policy on a (k, lam) grid.

    Plotting stable_fraction against lam for each k locates the knee where
    runs flip from stable to divergent; the knee grows linearly with k. Cells
    with lam < 1 are skipped (the arrival sampler floors at one per slot).
    """
    table = []
    cell = 0
    for k in k_values:
        for lam in lambda_grid:
            if lam < 1.0:
                cell += 1
                continue
            stable = 0
            for i in range(replicates):
                seed = replicate_seed(master_seed, cell * replicates + i)
                cfg = SimConfig(
                    policy=POLICIES["proposed"],
                    k=k,
                    lam=lam,
                    max_slots=max_slots,
                    pop_threshold=pop_threshold,
                    seed=seed,
                )
                stable += run(cfg).stable
            table.append(
                {"k": k, "lambda": lam, "stable_fraction": stable / replicates}
            )
            cell += 1
    return table
