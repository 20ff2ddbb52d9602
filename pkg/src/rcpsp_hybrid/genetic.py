"""Population lifecycle: initialization, parent selection, dense genes,
crossovers A and B, two-phase mutation, elitist replacement."""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import ActivityList, ProjectInstance, Schedule
from .sgs import fbi, parallel_sgs, serial_sgs


@dataclass
class Individual:
    list: ActivityList
    schedule: Schedule

    @property
    def makespan(self) -> int:
        return self.schedule.makespan


class Population:
    """Members kept sorted nondecreasing by makespan."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.members: list[Individual] = []

    def insert(self, ind: Individual) -> None:
        insort(self.members, ind, key=lambda m: m.makespan)

    def remove_worst(self, count: int = 1) -> None:
        del self.members[len(self.members) - count :]

    @property
    def best(self) -> Individual:
        return self.members[0]

    @property
    def worst(self) -> Individual:
        return self.members[-1]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class DenseGene:
    activities: frozenset[int]
    weight: float
    time: int


def decode_and_improve(
    inst: ProjectInstance,
    lst: ActivityList,
    rng,
    budget=None,
    use_parallel: bool = False,
    fbi_passes: int = 4,
) -> Individual:
    """Decode a list and polish with FBI; the list is refreshed from the
    improved schedule so list and schedule stay consistent."""
    from .sgs import schedule_to_list

    decoder = parallel_sgs if use_parallel else serial_sgs
    sched = decoder(inst, lst, budget=budget)
    improved = fbi(inst, sched, max_passes=fbi_passes, budget=budget)
    if improved.makespan < sched.makespan:
        sched = improved
    # a start-sorted list never serial-decodes worse than its schedule, so
    # refreshing keeps list and schedule consistent even after a parallel
    # decode or an FBI improvement
    lst = schedule_to_list(inst, sched)
    return Individual(lst, sched)


def init_population(
    inst: ProjectInstance,
    capacity: int,
    rng,
    budget=None,
    fbi_passes: int = 4,
    unique: bool = True,
) -> Population:
    """Random feasible list -> parallel decoder -> FBI, repeated until the
    population is full.  Duplicate (makespan, start-vector) members are
    rejected while uniqueness is on; the requirement is waived after
    5 * capacity failed attempts."""
    from .model import random_feasible_list

    pop = Population(capacity)
    seen: set[tuple] = set()
    failures = 0
    max_failures = 5 * capacity
    while len(pop) < capacity:
        lst = random_feasible_list(inst, rng)
        ind = decode_and_improve(
            inst, lst, rng, budget=budget, use_parallel=True, fbi_passes=fbi_passes
        )
        key = (ind.makespan, ind.schedule.starts)
        if unique and key in seen:
            failures += 1
            if failures >= max_failures:
                unique = False
            else:
                if budget is not None and budget.exhausted:
                    unique = False
                continue
        seen.add(key)
        pop.insert(ind)
        if budget is not None and budget.exhausted and len(pop) > 0:
            break
    return pop


def select_parents(
    pop: Population, parents_size: int, probability: float, rng
) -> list[Individual]:
    """Scan the sorted population, admitting each member with the given
    probability; top-up with the best not-yet-admitted if the scan ends
    short."""
    parents_size = min(parents_size, len(pop))
    chosen: list[Individual] = []
    taken = [False] * len(pop)
    for idx, member in enumerate(pop):
        if len(chosen) == parents_size:
            break
        if rng.random() < probability:
            chosen.append(member)
            taken[idx] = True
    if len(chosen) < parents_size:
        for idx, member in enumerate(pop):
            if not taken[idx]:
                chosen.append(member)
                taken[idx] = True
                if len(chosen) == parents_size:
                    break
    return chosen


def dense_activities(
    inst: ProjectInstance,
    sched: Schedule,
    threshold: float,
    weights: Sequence[float],
) -> list[DenseGene]:
    """Dense genes of a schedule: interval sets J(t) whose weighted unused
    surplus v_t falls below the threshold; overlapping genes resolved
    keeping the smaller v_t.  Result sorted by time."""
    T = sched.makespan
    caps = inst.capacities
    wk_over_rk = [w / c for w, c in zip(weights, caps)]
    idle_weight = sum(w * c for w, c in zip(wk_over_rk, caps))

    # running set of activities per unit interval via start/finish events
    events: list[list[int]] = [[] for _ in range(T + 1)]
    for j in range(1, inst.sink):
        p = inst.durations[j]
        if p == 0:
            continue
        events[sched.starts[j]].append(j)
        events[sched.starts[j] + p].append(-j)
    event_times = sorted(t for t in range(T + 1) if events[t])

    candidates: list[DenseGene] = []
    current: set[int] = set()
    use = [0] * inst.n_resources
    for idx, t in enumerate(event_times):
        if t >= T:
            break
        for e in events[t]:
            j = abs(e)
            if e > 0:
                current.add(j)
                for k, d in inst.active_demand[j]:
                    use[k] += d
            else:
                current.discard(j)
                for k, d in inst.active_demand[j]:
                    use[k] -= d
        if not current:
            continue  # idle run; v_t is the full weight sum, never a gene here
        v = idle_weight - sum(
            use[k] * wk_over_rk[k] for k in range(inst.n_resources)
        )
        if v < threshold:
            candidates.append(DenseGene(frozenset(current), v, t))

    # overlap resolution: keep smaller weight, drop genes sharing activities
    accepted: list[DenseGene] = []
    covered: set[int] = set()
    for gene in sorted(candidates, key=lambda g: (g.weight, g.time)):
        if gene.activities & covered:
            continue
        accepted.append(gene)
        covered |= gene.activities
    accepted.sort(key=lambda g: g.time)
    return accepted


def _copy_prefix(
    offspring: list[int],
    present: set[int],
    donor_order: Sequence[int],
    upto_pos: int,
) -> None:
    for pos in range(upto_pos + 1):
        a = donor_order[pos]
        if a not in present:
            offspring.append(a)
            present.add(a)


def crossover_a(
    inst: ProjectInstance,
    parent1: Individual,
    parent2: Individual,
    genes1: Sequence[DenseGene],
    genes2: Sequence[DenseGene],
) -> ActivityList:
    """Gene-prefix crossover.

    Each parent's genes are consumed in time order; at every step the
    front unconsumed gene (none of its activities copied yet) of the two
    parents is compared and the lighter one wins, ties to parent 1.  The
    winning parent's list prefix up to the gene's last activity is copied
    (skipping duplicates); leftovers follow in the shorter parent's order.
    """
    p1, p2 = parent1.list.order, parent2.list.order
    pos1 = {a: i for i, a in enumerate(p1)}
    pos2 = {a: i for i, a in enumerate(p2)}
    queues = [list(genes1), list(genes2)]
    orders = [p1, p2]
    positions = [pos1, pos2]

    offspring: list[int] = []
    present: set[int] = set()
    while True:
        fronts: list[Optional[DenseGene]] = [None, None]
        for side in (0, 1):
            q = queues[side]
            while q and (q[0].activities & present):
                q.pop(0)
            if q:
                fronts[side] = q[0]
        if fronts[0] is None and fronts[1] is None:
            break
        if fronts[1] is None or (
            fronts[0] is not None and fronts[0].weight <= fronts[1].weight
        ):
            side = 0
        else:
            side = 1
        gene = queues[side].pop(0)
        last_pos = max(positions[side][a] for a in gene.activities)
        _copy_prefix(offspring, present, orders[side], last_pos)

    filler = p1 if parent1.makespan <= parent2.makespan else p2
    for a in filler:
        if a not in present:
            offspring.append(a)
            present.add(a)
    return ActivityList(tuple(offspring))


def repair_precedence(inst: ProjectInstance, seq: Sequence[int]) -> list[int]:
    """Stable precedence repair: greedily emit the earliest activity in the
    sequence whose predecessors are all emitted.  The identity on
    already-feasible sequences."""
    import heapq

    pos = {a: i for i, a in enumerate(seq)}
    remaining = [len(inst.preds[j]) for j in range(len(inst))]
    heap = [pos[j] for j in range(len(inst)) if remaining[j] == 0]
    heapq.heapify(heap)
    out: list[int] = []
    seq = list(seq)
    while heap:
        j = seq[heapq.heappop(heap)]
        out.append(j)
        for s in inst.succs[j]:
            remaining[s] -= 1
            if remaining[s] == 0:
                heapq.heappush(heap, pos[s])
    assert len(out) == len(inst), "sequence is not a permutation of activities"
    return out


def _schedule_graph_network(
    inst: ProjectInstance, sched: Schedule, root: int, outgoing: bool
) -> set[int]:
    """Connected component of `root` in the schedule graph G_S (arcs of A
    with c_i = s_j), following arcs forward (outgoing) or backward."""
    starts = sched.starts
    durs = inst.durations
    seen = {root}
    stack = [root]
    while stack:
        i = stack.pop()
        nexts = inst.succs[i] if outgoing else inst.preds[i]
        for j in nexts:
            if outgoing:
                tight = starts[i] + durs[i] == starts[j]
            else:
                tight = starts[j] + durs[j] == starts[i]
            if tight and j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def crossover_b(
    inst: ProjectInstance,
    parent1: Individual,
    parent2: Individual,
    genes1: Sequence[DenseGene],
    genes2: Sequence[DenseGene],
    rng,
) -> ActivityList:
    """Segment-transplant crossover.

    The lowest-weight dense gene of each parent forms the block; the
    block activities' outgoing (or incoming, coin flip) networks in the
    second parent's schedule graph extend it.  The span of the second
    parent's list covering block plus networks is transplanted into the
    first parent's list at its leftmost position; precedence is repaired
    by stable-moving violators rightward.
    """
    if not genes1 and not genes2:
        shorter = parent1 if parent1.makespan <= parent2.makespan else parent2
        return ActivityList(tuple(shorter.list.order))

    block: set[int] = set()
    for genes in (genes1, genes2):
        if genes:
            gene = min(genes, key=lambda g: (g.weight, g.time))
            block |= gene.activities
    block -= {0, inst.sink}
    if not block:
        shorter = parent1 if parent1.makespan <= parent2.makespan else parent2
        return ActivityList(tuple(shorter.list.order))

    outgoing = rng.random() < 0.5
    extended = set(block)
    for a in block:
        extended |= _schedule_graph_network(inst, parent2.schedule, a, outgoing)
    extended -= {0, inst.sink}

    donor = parent2.list.order
    pos = {a: i for i, a in enumerate(donor)}
    left = min(pos[a] for a in extended)
    right = max(pos[a] for a in extended)
    segment = list(donor[left : right + 1])
    seg_set = set(segment)

    base = [a for a in parent1.list.order if a not in seg_set]
    insert_at = min(left, len(base) - 1)  # keep the dummy sink last
    insert_at = max(insert_at, 1)  # keep the dummy source first
    merged = base[:insert_at] + segment + base[insert_at:]
    return ActivityList(tuple(repair_precedence(inst, merged)))


def mutate(inst: ProjectInstance, lst: ActivityList, iterations: int, rng) -> ActivityList:
    """Two-phase mutation: a feasibility-preserving random swap, then a
    random relocation, repeated `iterations` times."""
    order = list(lst.order)
    n2 = len(order)
    if n2 <= 3 or iterations <= 0:
        return ActivityList(tuple(order))
    pred_sets = [set(p) for p in inst.preds]
    succ_sets = [set(s) for s in inst.succs]

    for _ in range(iterations):
        # phase 1: swap two random positions when precedence allows
        i = rng.randrange(1, n2 - 1)
        j = rng.randrange(1, n2 - 1)
        if i > j:
            i, j = j, i
        if i != j:
            a, b = order[i], order[j]
            between = order[i : j + 1]
            ok = not any(x in succ_sets[a] for x in between[1:]) and not any(
                x in pred_sets[b] for x in between[:-1]
            )
            if ok:
                order[i], order[j] = b, a

        # phase 2: relocate a random activity within its feasible window
        i = rng.randrange(1, n2 - 1)
        a = order.pop(i)
        lo = 1
        hi = len(order)  # insertion before the sink at most
        for idx, x in enumerate(order):
            if x in pred_sets[a]:
                lo = max(lo, idx + 1)
            if x in succ_sets[a]:
                hi = min(hi, idx)
        hi = min(hi, len(order) - 1)  # never displace the dummy sink
        if lo > hi:
            order.insert(i, a)
        else:
            order.insert(rng.randrange(lo, hi + 1), a)
    return ActivityList(tuple(order))


def next_generation(
    pop: Population, offspring: Sequence[Individual], elite_count: int
) -> Population:
    """Insert the best elite_count offspring, drop the same number of the
    worst incumbents; capacity and sortedness preserved."""
    elite_count = min(elite_count, len(offspring), len(pop))
    if elite_count == 0:
        return pop
    best = sorted(offspring, key=lambda m: m.makespan)[:elite_count]
    pop.remove_worst(elite_count)
    for ind in best:
        pop.insert(ind)
    return pop
