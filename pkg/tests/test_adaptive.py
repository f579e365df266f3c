"""Controller window arithmetic, frozen against hand-computed outcomes."""

from fountainswarm.adaptive import ControllerState, _next_pow2


def _close_window(ctrl, arrivals, slot):
    ctrl.observe_arrivals(arrivals)
    return ctrl.window_tick(slot)


def test_next_pow2():
    got = [_next_pow2(n) for n in (1, 2, 3, 4, 5, 7, 8, 9, 16, 17)]
    assert got == [1, 2, 4, 4, 8, 8, 8, 16, 16, 32]


def test_rate_exactly_k_minus_one_does_not_trigger():
    ctrl = ControllerState(tau=100, k=5)
    assert _close_window(ctrl, 400, 100) is None  # 4.0/slot, not > k-1
    assert ctrl.k == 5 and ctrl.epoch == 0


def test_trigger_without_a_larger_candidate_keeps_k():
    # 4.2/slot trips the trigger, but the smallest integer above it is 5
    ctrl = ControllerState(tau=100, k=5)
    assert _close_window(ctrl, 420, 100) is None
    assert ctrl.k == 5 and ctrl.epoch == 0


def test_bump_snaps_to_a_power_of_two():
    # 6.2/slot: candidate 7, stored k = 8
    ctrl = ControllerState(tau=100, k=5)
    event = _close_window(ctrl, 620, 100)
    assert event == {"slot": 100, "k": 8, "epoch": 1}
    assert ctrl.k == 8 and ctrl.epoch == 1


def test_power_of_two_k_needs_a_strictly_larger_candidate():
    # 7.5/slot against k = 8: trigger fires (7.5 > 7) but candidate is 8
    ctrl = ControllerState(tau=100, k=8)
    assert _close_window(ctrl, 750, 100) is None
    assert ctrl.k == 8


def test_large_jump_in_one_window():
    # 9.0/slot against k = 4: candidate 10, stored k = 16
    ctrl = ControllerState(tau=100, k=4)
    event = _close_window(ctrl, 900, 100)
    assert event["k"] == 16 and ctrl.epoch == 1


def test_k_never_decreases_and_windows_reset():
    ctrl = ControllerState(tau=10, k=2)
    rates = [35, 5, 5, 80, 10]  # 3.5, 0.5, 0.5, 8.0, 1.0 per slot
    ks = []
    for i, a in enumerate(rates, start=1):
        ctrl.observe_arrivals(a - 2)
        ctrl.observe_arrivals(2)  # counts accumulate across observations
        ctrl.window_tick(10 * i)
        ks.append(ctrl.k)
    assert ks == [4, 4, 4, 16, 16]
    assert ctrl.windows_done == 5
    assert [(e["epoch"], e["k"]) for e in ctrl.events] == [(1, 4), (2, 16)]
