"""Slotted swarm simulator for one-file content distribution.

Each slot runs five phases in a fixed order: arrivals, server action, peer
exchange, departures, snapshot. Peers arrive empty, collect chunks until they
hold k (rank k when coded, k distinct pieces otherwise), and leave the moment
they complete; a completed peer stops uploading immediately and is removed
from the books at the end of the slot.

Four policies come from crossing two axes:

* coding: "uncoded" hands out the k plain pieces; "fountain" hands out random
  GF(2^8) combinations, drawn from a fixed pool of K vectors (or freshly per
  transfer when K == 0).
* server_target: how the server's bandwidth reaches the swarm. With
  "random_peer" the server never pushes; it joins the contact pool as an
  always-complete peer 0 and answers whoever dials it (a binomial number of
  contacts per slot, one in expectation). With "newest_peer" the server
  pushes on a dedicated rate-limited channel: exactly one chunk per slot to
  a uniformly chosen peer among this slot's arrivals, and takes no contacts.

The named combinations: baseline = uncoded/random_peer, fountain-only =
fountain/random_peer, prioritize-only = uncoded/newest_peer, proposed =
fountain/newest_peer.

Exchange is greedy gossip: every peer, in a fresh random order each slot,
contacts one uniform other peer and downloads one chunk whenever the contact
holds anything innovative (uniform among the innovative ones). Downloads
apply immediately, so a chunk obtained early in a slot can be passed on
later in the same slot, while a peer that completes mid-slot drops out of
the contact pool at once (the end-of-slot sweep only records its
departure). Peers transfer stored coded chunks verbatim, so coded chunks
keep their pool identity as they spread.

All randomness flows from one `random.Random` seeded by the config, so a
(config, seed) pair fully determines the run.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .adaptive import ControllerState
from .codec import (
    CodedChunk,
    Decoder,
    SourceFile,
    build_pool,
    draw_coefficients,
    encode,
    encode_pool,
    split_file,
)
from .metrics import MetricsRecord, snapshot

UNCODED = "uncoded"
FOUNTAIN = "fountain"
RANDOM_PEER = "random_peer"
NEWEST_PEER = "newest_peer"


@dataclass(frozen=True)
class PolicyConfig:
    """Server behavior: what it serves and whom it serves first."""

    coding: str
    server_target: str

    def __post_init__(self):
        if self.coding not in (UNCODED, FOUNTAIN):
            raise ValueError(f"coding must be uncoded|fountain, got {self.coding!r}")
        if self.server_target not in (RANDOM_PEER, NEWEST_PEER):
            raise ValueError(
                f"server_target must be random_peer|newest_peer, got {self.server_target!r}"
            )


POLICIES = {
    "baseline": PolicyConfig(UNCODED, RANDOM_PEER),
    "fountain-only": PolicyConfig(FOUNTAIN, RANDOM_PEER),
    "prioritize-only": PolicyConfig(UNCODED, NEWEST_PEER),
    "proposed": PolicyConfig(FOUNTAIN, NEWEST_PEER),
}

POLICY_NAMES = {v: k for k, v in POLICIES.items()}


@dataclass(frozen=True)
class SimConfig:
    """One run's parameters. `ramp` switches the arrival rate mid-run."""

    k: int = 5
    K: int = 10_000  # coefficient pool size; 0 draws fresh coefficients per chunk
    lam: float = 2.0  # mean arrivals per slot, >= 1
    A: Optional[int] = None  # arrivals cap per slot; default max(20, ceil(10 * lam))
    max_slots: int = 10_000
    pop_threshold: int = 1_000
    seed: int = 0
    policy: PolicyConfig = POLICIES["proposed"]
    file_len: int = 40
    tau: Optional[int] = None  # adaptive-k window; None disables the controller
    ramp: Optional[tuple[int, float]] = None  # (slot, new lam)
    one_club_threshold: float = 0.9
    audit: bool = False  # re-verify the greedy rule on every contact (slow)

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.lam < 1.0:
            raise ValueError(f"arrival rate must be >= 1, got {self.lam}")
        if self.K != 0 and self.K < self.k:
            raise ValueError(f"pool size K={self.K} must be 0 (fresh) or >= k={self.k}")
        if self.A is not None and self.A < 1:
            raise ValueError(f"arrival cap must be >= 1, got {self.A}")
        if self.max_slots < 1:
            raise ValueError(f"max_slots must be >= 1, got {self.max_slots}")
        if self.pop_threshold < 1:
            raise ValueError(f"pop_threshold must be >= 1, got {self.pop_threshold}")
        if self.file_len < 1:
            raise ValueError(f"file_len must be >= 1, got {self.file_len}")
        if not 0.0 < self.one_club_threshold <= 1.0:
            raise ValueError(
                f"one_club_threshold must be in (0, 1], got {self.one_club_threshold}"
            )
        if self.tau is not None:
            if self.tau < 1:
                raise ValueError(f"tau must be >= 1, got {self.tau}")
            if self.policy != POLICIES["proposed"]:
                raise ValueError("the adaptive controller requires the proposed policy")
        if self.ramp is not None:
            slot, lam2 = self.ramp
            if slot < 1 or lam2 < 1.0:
                raise ValueError(f"ramp needs slot >= 1 and rate >= 1, got {self.ramp}")

    @property
    def arrival_cap(self) -> int:
        if self.A is not None:
            return self.A
        lam = self.lam if self.ramp is None else max(self.lam, self.ramp[1])
        return max(20, math.ceil(10 * lam))


def _poisson(lam: float, rng: random.Random) -> int:
    """Knuth's product-of-uniforms sampler; exact and fine for small lam."""
    if lam <= 0.0:
        return 0
    L = math.exp(-lam)
    k = 0
    p = rng.random()
    while p > L:
        k += 1
        p *= rng.random()
    return k


def sample_arrivals(lam: float, cap: int, rng: random.Random) -> int:
    """Arrivals in one slot: 1 + Poisson(lam - 1), capped at `cap` total."""
    return 1 + min(_poisson(lam - 1.0, rng), cap - 1)


_BITS_CACHE: dict[int, tuple[int, ...]] = {}


def _bits_of(mask: int) -> tuple[int, ...]:
    t = _BITS_CACHE.get(mask)
    if t is None:
        t = tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)
        _BITS_CACHE[mask] = t
    return t


class Peer:
    """One downloader. Coded peers carry a decoder plus the original chunks
    they absorbed (for verbatim forwarding); uncoded peers carry a piece
    bitmask. `done` flips the moment the peer completes: it leaves the
    contact pool immediately and the end-of-slot sweep records the
    departure.
    """

    __slots__ = ("id", "arrival_slot", "epoch", "k_target", "decoder",
                 "piece_mask", "held", "done")

    def __init__(self, pid: int, slot: int, epoch: int, k_target: int, coded: bool):
        self.id = pid
        self.arrival_slot = slot
        self.epoch = epoch
        self.k_target = k_target
        self.done = False
        if coded:
            self.decoder = Decoder(k_target)
            self.held: list[CodedChunk] = []
            self.piece_mask = 0
        else:
            self.decoder = None
            self.held = None
            self.piece_mask = 0

    @property
    def progress(self) -> int:
        if self.decoder is not None:
            return self.decoder.rank
        return self.piece_mask.bit_count()

    def club_key(self):
        if self.decoder is not None:
            return self.decoder.space_key()
        return self.piece_mask

    def __repr__(self) -> str:
        return f"Peer(id={self.id}, epoch={self.epoch}, progress={self.progress}/{self.k_target})"


@dataclass
class RunResult:
    cfg: SimConfig
    records: list[MetricsRecord]
    diverged_at: Optional[int]
    events: list[dict] = field(default_factory=list)
    k_final: int = 0

    @property
    def stable(self) -> bool:
        return self.diverged_at is None

    @property
    def verdict(self) -> str:
        return "stable" if self.diverged_at is None else f"diverged@{self.diverged_at}"


class SwarmState:
    """Mutable run state; step() advances one slot and returns its record."""

    def __init__(self, cfg: SimConfig):
        cfg.validate()
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.coded = cfg.policy.coding == FOUNTAIN
        self.server_contactable = cfg.policy.server_target == RANDOM_PEER
        self.payload = self.rng.randbytes(cfg.file_len)
        self.slot = 0
        self.peers: list[Peer] = []
        self.next_id = 1
        self.arrivals_cum = 0
        self.departures_cum = 0
        self.M = 0
        self.server_served_new = False
        self.server_pushes = 0
        self.current_k = cfg.k
        self.current_epoch = 0
        self.controller = (
            ControllerState(tau=cfg.tau, k=cfg.k) if cfg.tau is not None else None
        )
        self.events: list[dict] = []
        self.sources: dict[int, SourceFile] = {}
        self.pool_chunks: dict[int, Optional[list[CodedChunk]]] = {}
        self.full_masks: dict[int, int] = {}
        self._innov_memo: dict = {}
        self._slot_done: list[Peer] = []
        self._init_epoch(0, cfg.k)

    def _init_epoch(self, epoch: int, k: int) -> None:
        self.sources[epoch] = split_file(self.payload, k)
        self.full_masks[epoch] = (1 << k) - 1
        if self.coded and self.cfg.K > 0:
            pool = build_pool(k, self.cfg.K, self.rng)
            self.pool_chunks[epoch] = encode_pool(self.sources[epoch], pool)
        else:
            self.pool_chunks[epoch] = None

    # ------------------------------------------------------------------ slot

    def step(self) -> MetricsRecord:
        self.slot += 1
        self.server_served_new = False
        self.server_pushes = 0
        self._slot_done = []
        new = self._arrivals()
        self._server_action(new)
        assert self.server_pushes <= 1, "server exceeded its one-chunk slot budget"
        self._exchange_phase()
        self._departures()
        record = snapshot(self)
        if self.controller is not None and self.slot % self.controller.tau == 0:
            event = self.controller.window_tick(self.slot)
            if event is not None:
                self.current_k = self.controller.k
                self.current_epoch = self.controller.epoch
                self._init_epoch(self.current_epoch, self.current_k)
                self.events.append(event)
        return record

    def _arrivals(self) -> list[Peer]:
        cfg = self.cfg
        lam = cfg.lam
        if cfg.ramp is not None and self.slot >= cfg.ramp[0]:
            lam = cfg.ramp[1]
        n = sample_arrivals(lam, cfg.arrival_cap, self.rng)
        if self.controller is not None:
            self.controller.observe_arrivals(n)
        k = self.current_k
        epoch = self.current_epoch
        new = []
        for _ in range(n):
            p = Peer(self.next_id, self.slot, epoch, k, self.coded)
            self.next_id += 1
            new.append(p)
        self.peers.extend(new)
        self.arrivals_cum += n
        self.M += k * n
        return new

    # ---------------------------------------------------------------- server

    def _server_action(self, new: list[Peer]) -> None:
        """The push channel: at most one chunk per slot, to a new arrival.

        Only the newest_peer policies push; in random_peer mode the server's
        bandwidth flows through the contact pool instead. If a slot has no
        arrivals (never under the standard sampler, which floors at one), the
        push falls back to the oldest not-yet-bumped peer while old epochs
        are draining, or a uniform existing peer otherwise.
        """
        if not self.server_contactable:
            if new:
                target = new[self.rng.randrange(len(new))]
                self.server_served_new = True
            else:
                target = self._fallback_push_target()
                if target is None:
                    return
            self._push_chunk(target)

    def _fallback_push_target(self) -> Optional[Peer]:
        alive = [p for p in self.peers if not p.done]
        if not alive:
            return None
        if self.controller is not None:
            old = [p for p in alive if p.epoch < self.current_epoch]
            if old:
                return min(old, key=lambda p: (p.arrival_slot, p.id))
        return alive[self.rng.randrange(len(alive))]

    def _push_chunk(self, target: Peer) -> None:
        if self.coded:
            chunks = self.pool_chunks[target.epoch]
            if chunks is not None:
                ch = chunks[self.rng.randrange(len(chunks))]
            else:
                src = self.sources[target.epoch]
                ch = encode(src, draw_coefficients(src.k, self.rng))
            dec = target.decoder
            r0 = dec.rank
            if dec.absorb(ch) > r0:  # a duplicate pool draw teaches nothing
                target.held.append(ch)
                self.M -= 1
                self.server_pushes += 1
                if r0 + 1 == target.k_target:
                    self._complete(target)
        else:
            piece = self.rng.randrange(target.k_target)
            bit = 1 << piece
            if not target.piece_mask & bit:  # delivered only if innovative
                target.piece_mask |= bit
                self.M -= 1
                self.server_pushes += 1
                if target.piece_mask == self.full_masks[target.epoch]:
                    self._complete(target)

    # -------------------------------------------------------------- exchange

    def _exchange_phase(self) -> None:
        """Every peer dials one uniform other peer, in random order.

        Transfers land immediately, so later contacts in the same slot see
        them. A peer that reaches full rank drops out of the pool at once:
        it neither dials nor gets dialed for the rest of the slot (the
        departure sweep only does the bookkeeping). In random_peer modes the
        server sits in the pool as one extra candidate. Under the adaptive
        controller, contacts stay within the dialer's own epoch (other
        epochs' chunks are incompatible).
        """
        peers = self.peers
        n = len(peers)
        if n == 0:
            return
        rng = self.rng
        randrange = rng.randrange
        audit = self.cfg.audit
        gained: Optional[dict] = {} if audit else None
        by_epoch: Optional[dict] = None
        if self.controller is not None:
            by_epoch = {}
            for idx, p in enumerate(peers):
                by_epoch.setdefault(p.epoch, []).append(idx)
        order = list(range(n))
        rng.shuffle(order)
        server_in_pool = self.server_contactable
        n_alive = sum(not q.done for q in peers)
        hi = n if server_in_pool else n - 1
        for i in order:
            p = peers[i]
            if p.done:
                continue
            use_server = False
            if by_epoch is not None:
                # epoch fencing only runs under the controller, where the
                # swarm stays small; an explicit candidate list is fine
                cand = by_epoch[p.epoch]
                alive = [j for j in cand if j != i and not peers[j].done]
                if not alive:
                    continue
                j = alive[randrange(len(alive))]
            else:
                # uniform over the live others (plus the server in contact
                # modes) by rejection: only mid-slot completions can be
                # done here, so redraws are rare
                if n_alive <= 1 and not server_in_pool:
                    continue
                while True:
                    j = randrange(hi)
                    if j >= i:
                        j += 1
                    if j == n:
                        use_server = True
                        break
                    if not peers[j].done:
                        break
            if use_server:
                got = self._serve_via_contact(p)
            else:
                got = self._peer_transfer(p, peers[j])
            if p.done:
                n_alive -= 1
            if audit and got:
                gained[p.id] = gained.get(p.id, 0) + 1
        if audit:
            for pid, g in gained.items():
                assert g <= 1, f"peer {pid} downloaded {g} chunks via exchange in one slot"

    def _peer_transfer(self, p: Peer, q: Peer) -> bool:
        """One download attempt p <- q. Returns True on transfer.

        Uniform among q's innovative chunks, realized as first-innovative in
        a uniformly shuffled candidate order.
        """
        rng = self.rng
        if self.coded:
            held = q.held
            hn = len(held)
            chunk = None
            if hn:
                dec = p.decoder
                if dec.rank == 0:
                    chunk = held[rng.randrange(hn)] if hn > 1 else held[0]
                elif hn == 1:
                    if self._innovative(p, held[0]):
                        chunk = held[0]
                else:
                    idxs = list(range(hn))
                    rng.shuffle(idxs)
                    for t in idxs:
                        if self._innovative(p, held[t]):
                            chunk = held[t]
                            break
            if chunk is None:
                if self.cfg.audit:
                    assert not any(
                        p.decoder.coeffs_innovative(c.coeffs) for c in held
                    ), "withheld an innovative chunk"
                return False
            r0 = p.decoder.rank
            r1 = p.decoder.absorb(chunk)
            assert r1 == r0 + 1, "transferred chunk was not innovative"
            p.held.append(chunk)
            self.M -= 1
            if r1 == p.k_target:
                self._complete(p)
            return True
        diff = q.piece_mask & ~p.piece_mask
        if diff == 0:
            return False
        bits = _bits_of(diff)
        b = bits[rng.randrange(len(bits))] if len(bits) > 1 else bits[0]
        p.piece_mask |= 1 << b
        self.M -= 1
        if p.piece_mask == self.full_masks[p.epoch]:
            self._complete(p)
        return True

    def _serve_via_contact(self, p: Peer) -> bool:
        """p dialed the server (peer 0): greedy download of one innovative chunk."""
        rng = self.rng
        if not self.coded:
            missing = self.full_masks[p.epoch] & ~p.piece_mask
            bits = _bits_of(missing)  # an alive peer always misses something
            b = bits[rng.randrange(len(bits))] if len(bits) > 1 else bits[0]
            p.piece_mask |= 1 << b
            self.M -= 1
            if p.piece_mask == self.full_masks[p.epoch]:
                self._complete(p)
            return True
        chunks = self.pool_chunks[p.epoch]
        ch = None
        if chunks is not None:
            K = len(chunks)
            for _ in range(64):
                cand = chunks[rng.randrange(K)]
                if self._innovative(p, cand):
                    ch = cand
                    break
            if ch is None:
                # vanishing fallback: the whole pool may sit inside p's span
                innov = [c for c in chunks if self._innovative(p, c)]
                if not innov:
                    return False
                ch = innov[rng.randrange(len(innov))]
        else:
            src = self.sources[p.epoch]
            dec = p.decoder
            for _ in range(64):
                coeffs = draw_coefficients(src.k, rng)
                if dec.coeffs_innovative(coeffs):
                    ch = encode(src, coeffs)
                    break
            if ch is None:
                for j in range(src.k):
                    basis = bytes(1 if t == j else 0 for t in range(src.k))
                    if dec.coeffs_innovative(basis):
                        ch = encode(src, basis)
                        break
                else:
                    raise AssertionError("no innovative vector for a partial decoder")
        r0 = p.decoder.rank
        r1 = p.decoder.absorb(ch)
        assert r1 == r0 + 1, "server-served chunk was not innovative"
        p.held.append(ch)
        self.M -= 1
        if r1 == p.k_target:
            self._complete(p)
        return True

    def _innovative(self, p: Peer, chunk: CodedChunk) -> bool:
        """Innovation check memoized on (epoch, canonical row space, pool id)."""
        idx = chunk.pool_index
        dec = p.decoder
        if idx is None:
            return dec.coeffs_innovative(chunk.coeffs)
        memo = self._innov_memo
        key = (p.epoch, dec.space_key(), idx)
        hit = memo.get(key)
        if hit is None:
            hit = dec.coeffs_innovative(chunk.coeffs)
            if len(memo) > 1_048_576:
                memo.clear()
            memo[key] = hit
        return hit

    # ------------------------------------------------------------ departures

    def _complete(self, p: Peer) -> None:
        p.done = True
        self._slot_done.append(p)

    def _departures(self) -> None:
        done = self._slot_done
        if not done:
            return
        for p in done:
            if p.decoder is not None:
                assert p.decoder.rank == p.k_target
                out = p.decoder.decode()
                assert out == self.sources[p.epoch].payload, (
                    f"peer {p.id} decoded a corrupted payload"
                )
            else:
                assert p.piece_mask == self.full_masks[p.epoch]
        self.peers = [p for p in self.peers if not p.done]
        self.departures_cum += len(done)


def run(cfg: SimConfig) -> RunResult:
    """Run to max_slots or until the population passes the threshold."""
    state = SwarmState(cfg)
    records: list[MetricsRecord] = []
    diverged_at = None
    for _ in range(cfg.max_slots):
        rec = state.step()
        records.append(rec)
        if rec.population > cfg.pop_threshold:
            diverged_at = rec.slot
            break
    return RunResult(
        cfg=cfg,
        records=records,
        diverged_at=diverged_at,
        events=list(state.events),
        k_final=state.current_k,
    )
