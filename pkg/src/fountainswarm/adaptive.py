"""Arrival-rate controller that grows k when the swarm nears its stability edge.

The swarm is stable while the arrival rate stays below k, so the controller
watches arrivals in windows of tau slots and, when the measured rate crosses
k - 1, raises k past the measured rate, snapping increases to powers of two.
Each raise starts a new epoch: chunks coded under different epochs use
different chunk counts and are not exchanged between epochs.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length() if n > 1 else 1


@dataclass
class ControllerState:
    """Windowed arrival counter plus the current (k, epoch) pair.

    k never decreases. A window ends every tau slots; `window_tick` must be
    called exactly then.
    """

    tau: int
    k: int
    epoch: int = 0
    windows_done: int = 0
    arrivals: int = 0
    events: list[dict] = field(default_factory=list)

    def observe_arrivals(self, n: int) -> None:
        self.arrivals += n

    def window_tick(self, slot: int) -> dict | None:
        """Close the current window. Returns the bump event if k changed.

        The trigger is strict: the window's arrival count must exceed
        (k - 1) * tau. The new k is the smallest integer exceeding the
        measured rate, rounded up to a power of two, and only applies if it
        actually exceeds the current k.
        """
        a = self.arrivals
        self.arrivals = 0
        self.windows_done += 1
        if a > (self.k - 1) * self.tau:
            candidate = a // self.tau + 1  # smallest integer > a / tau
            if candidate > self.k:
                self.k = _next_pow2(candidate)
                self.epoch += 1
                event = {"slot": slot, "k": self.k, "epoch": self.epoch}
                self.events.append(event)
                return event
        return None
