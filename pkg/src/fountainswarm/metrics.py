"""Per-slot swarm observables.

The central quantity is the total chunk deficit M: the number of chunk
downloads still owed across all peers (each peer owes its k minus what it
holds). M shrinks by exactly one per useful transfer and grows by k per
arrival, so its empirical drift separates stable from divergent runs. The
rank histogram alpha and the one-club flag describe how the deficit is
distributed: a swarm trapped in the missing-chunk failure mode shows almost
all peers one chunk short of done, with identical holdings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MetricsRecord:
    """Post-slot snapshot. rank_counts[i] is the number of peers holding i chunks."""

    slot: int
    population: int
    rank_counts: tuple[int, ...]
    M: int
    arrivals_cum: int
    departures_cum: int
    one_club: bool
    server_served_new: bool

    @property
    def alpha(self) -> tuple[float, ...]:
        """Fraction of peers at each chunk count (all zeros for an empty swarm)."""
        if self.population == 0:
            return tuple(0.0 for _ in self.rank_counts)
        return tuple(c / self.population for c in self.rank_counts)


def detect_one_club(peers, threshold: float = 0.9) -> bool:
    """True iff at least `threshold` of the peers are one chunk short of
    complete and hold identical content.

    Holdings compare by the peer's club key: the piece set for uncoded peers,
    the canonical row-space key for coded ones, scoped by epoch.
    """
    S = len(peers)
    if S == 0:
        return False
    need = threshold * S
    counts: dict = {}
    best = 0
    for p in peers:
        if p.progress == p.k_target - 1:
            key = (p.epoch, p.club_key())
            c = counts.get(key, 0) + 1
            counts[key] = c
            if c > best:
                best = c
    return best >= need


def snapshot(state) -> MetricsRecord:
    """Build the post-slot record and check the bookkeeping invariants.

    Asserts: population equals arrivals minus departures, no complete peer is
    still present, and the incrementally tracked M matches a fresh recount.
    """
    peers = state.peers
    k = state.current_k
    counts = [0] * k
    deficit = 0
    for p in peers:
        prog = p.progress
        if prog >= p.k_target:
            raise AssertionError(
                f"slot {state.slot}: peer {p.id} complete but still present"
            )
        counts[prog] += 1
        deficit += p.k_target - prog
    S = len(peers)
    if S != state.arrivals_cum - state.departures_cum:
        raise AssertionError(
            f"slot {state.slot}: population {S} != arrivals "
            f"{state.arrivals_cum} - departures {state.departures_cum}"
        )
    if deficit != state.M:
        raise AssertionError(
            f"slot {state.slot}: tracked M {state.M} != recounted {deficit}"
        )
    return MetricsRecord(
        slot=state.slot,
        population=S,
        rank_counts=tuple(counts),
        M=deficit,
        arrivals_cum=state.arrivals_cum,
        departures_cum=state.departures_cum,
        one_club=detect_one_club(peers, state.cfg.one_club_threshold),
        server_served_new=state.server_served_new,
    )


def growth_slope(series: Sequence[MetricsRecord], window: tuple[int, int]) -> float:
    """Least-squares slope of population versus slot over series[lo:hi]."""
    lo, hi = window
    part = series[lo:hi]
    if len(part) < 2:
        raise ValueError("window must cover at least 2 records")
    slots = np.array([r.slot for r in part], dtype=float)
    pops = np.array([r.population for r in part], dtype=float)
    return float(np.polyfit(slots, pops, 1)[0])


def empirical_drift(series: Sequence[MetricsRecord], window: tuple[int, int]) -> float:
    """Mean per-slot change of M over series[lo:hi]."""
    lo, hi = window
    part = series[lo:hi]
    if len(part) < 2:
        raise ValueError("window must cover at least 2 records")
    Ms = np.array([r.M for r in part], dtype=float)
    return float(np.diff(Ms).mean())
