"""Schedule generation schemes and justification operators.

serial_sgs / parallel_sgs decode an activity list into an active
schedule; fbi and left_shift are the makespan-nonincreasing improvement
operators.  All functions are pure given (instance, list); an optional
`budget` (anything with a charge() method) is debited once per full
schedule constructed.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .model import ActivityList, ProjectInstance, Schedule
from . import _fastpath

USE_KERNELS = _fastpath.HAVE_NUMBA


def _charge(budget, k: int = 1) -> None:
    if budget is not None:
        budget.charge(k)


def serial_sgs(
    inst: ProjectInstance,
    lst: ActivityList | Sequence[int],
    budget=None,
) -> Schedule:
    """Serial decoder: each activity, in list order, starts at the earliest
    time after its predecessors at which its full duration fits the
    remaining resource profile."""
    order = lst.order if isinstance(lst, ActivityList) else lst
    if USE_KERNELS:
        import numpy as np

        durs, dem, caps, pred_ptr, pred_idx, _, _ = _fastpath.instance_arrays(inst)
        starts = _fastpath.serial_decode(
            np.asarray(order, np.int32), durs, dem, caps, pred_ptr, pred_idx,
            inst.horizon,
        )
        sched = Schedule(
            tuple(int(s) for s in starts),
            int(starts[inst.sink]) + inst.durations[inst.sink],
        )
        _charge(budget)
        return sched
    durs = inst.durations
    preds = inst.preds
    active = inst.active_demand
    horizon = inst.horizon + 1
    rem = [[c] * horizon for c in inst.capacities]

    starts = [0] * len(inst)
    finish = [0] * len(inst)
    for j in order:
        p = durs[j]
        est = 0
        for i in preds[j]:
            f = finish[i]
            if f > est:
                est = f
        if p == 0:
            starts[j] = est
            finish[j] = est
            continue
        t = est
        nz = active[j]
        while True:
            # scan the candidate window; jump past the first conflict
            conflict = -1
            for k, d in nz:
                row = rem[k]
                for tau in range(t, t + p):
                    if row[tau] < d:
                        conflict = tau
                        break
                if conflict >= 0:
                    break
            if conflict < 0:
                break
            t = conflict + 1
        starts[j] = t
        finish[j] = t + p
        for k, d in nz:
            row = rem[k]
            for tau in range(t, t + p):
                row[tau] -= d
    sched = Schedule(tuple(starts), finish[inst.sink])
    _charge(budget)
    return sched


def parallel_sgs(
    inst: ProjectInstance,
    lst: ActivityList | Sequence[int],
    budget=None,
) -> Schedule:
    """Parallel decoder: advances decision time over finish events; at each
    decision time starts eligible activities in list order while the
    resources permit."""
    order = lst.order if isinstance(lst, ActivityList) else lst
    rank = {j: i for i, j in enumerate(order)}
    durs = inst.durations
    preds = inst.preds
    active = inst.active_demand
    horizon = inst.horizon + 1
    rem = [[c] * horizon for c in inst.capacities]

    n2 = len(inst)
    starts = [0] * n2
    finish = [0] * n2
    unplaced = set(range(n2))
    placed: set[int] = set()
    t = 0
    while unplaced:
        progressed = True
        while progressed:
            progressed = False
            eligible = [
                j
                for j in unplaced
                if all(i in placed and finish[i] <= t for i in preds[j])
            ]
            eligible.sort(key=rank.__getitem__)
            for j in eligible:
                p = durs[j]
                if p:
                    ok = True
                    for k, d in active[j]:
                        row = rem[k]
                        for tau in range(t, t + p):
                            if row[tau] < d:
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        continue
                    for k, d in active[j]:
                        row = rem[k]
                        for tau in range(t, t + p):
                            row[tau] -= d
                starts[j] = t
                finish[j] = t + p
                unplaced.discard(j)
                placed.add(j)
                progressed = bool(p == 0)
        if not unplaced:
            break
        # next decision time: earliest finish event beyond t
        nxt = min((finish[j] for j in placed if finish[j] > t), default=t + 1)
        t = nxt
    sched = Schedule(tuple(starts), finish[inst.sink])
    _charge(budget)
    return sched


def schedule_to_list(inst: ProjectInstance, sched: Schedule) -> ActivityList:
    """Activities sorted by start time, ties by smaller id."""
    order = sorted(range(len(inst)), key=lambda j: (sched.starts[j], j))
    # the dummy sink shares its start with the last finishers; force it last
    order.remove(inst.sink)
    order.append(inst.sink)
    return ActivityList(tuple(order))


def _right_justify(inst: ProjectInstance, sched: Schedule, budget=None) -> Schedule:
    """Schedule backward in decreasing finish-time order: each activity is
    moved to its latest resource-feasible start before its successors."""
    if USE_KERNELS:
        import numpy as np

        durs_a, dem, caps, _, _, succ_ptr, succ_idx = _fastpath.instance_arrays(inst)
        T = sched.makespan
        starts0 = sched.starts
        durs_l = inst.durations
        order = sorted(
            range(len(inst)),
            key=lambda j: (-(starts0[j] + durs_l[j]), -starts0[j], j),
        )
        new_start = _fastpath.right_justify_decode(
            np.asarray(order, np.int32), durs_a, dem, caps, succ_ptr, succ_idx,
            inst.sink, T,
        )
        out = Schedule(tuple(int(s) for s in new_start), T)
        _charge(budget)
        return out
    durs = inst.durations
    succs = inst.succs
    active = inst.active_demand
    T = sched.makespan
    rem = [[c] * (T + 1) for c in inst.capacities]

    n2 = len(inst)
    starts = list(sched.starts)
    new_start = [0] * n2
    order = sorted(
        range(n2), key=lambda j: (-(starts[j] + durs[j]), -starts[j], j)
    )
    done = [False] * n2
    new_start[inst.sink] = T
    done[inst.sink] = True
    for j in order:
        if done[j]:
            continue
        p = durs[j]
        deadline = T
        for s in succs[j]:
            ns = new_start[s]
            if ns < deadline:
                deadline = ns
        t = deadline - p
        if p:
            nz = active[j]
            while True:
                conflict = -1
                for k, d in nz:
                    row = rem[k]
                    for tau in range(t + p - 1, t - 1, -1):
                        if row[tau] < d:
                            conflict = tau
                            break
                    if conflict >= 0:
                        break
                if conflict < 0:
                    break
                t = conflict - p
                assert t >= 0, "right justification ran out of room"
            for k, d in nz:
                row = rem[k]
                for tau in range(t, t + p):
                    row[tau] -= d
        new_start[j] = t
        done[j] = True
    new_start[0] = 0
    sched = Schedule(tuple(new_start), T)
    _charge(budget)
    return sched


def left_shift(inst: ProjectInstance, sched: Schedule, budget=None) -> Schedule:
    """Global left shift: serial decode in nondecreasing start order.

    Never increases the makespan and is idempotent on its own output.
    """
    return serial_sgs(inst, schedule_to_list(inst, sched), budget=budget)


def fbi(
    inst: ProjectInstance,
    sched: Schedule,
    max_passes: int = 4,
    budget=None,
) -> Schedule:
    """Forward-backward improvement: alternate right justification and left
    shift until a full pass yields no improvement (capped at max_passes)."""
    best = sched
    for _ in range(max_passes):
        back = _right_justify(inst, best, budget=budget)
        fwd = left_shift(inst, back, budget=budget)
        if fwd.makespan < best.makespan:
            best = fwd
        else:
            break
    return best
