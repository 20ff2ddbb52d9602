"""Hybrid control loop: relaxation-based ranking, population init,
gap-based regime classification, GA generations with NS bursts on
stagnation, and parameter self-tuning."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

from .model import (
    ActivityList,
    ProjectInstance,
    Schedule,
    critical_path_lower_bound,
    random_feasible_list,
    validate_instance,
)
from .genetic import (
    Individual,
    Population,
    crossover_a,
    crossover_b,
    decode_and_improve,
    dense_activities,
    init_population,
    mutate,
    next_generation,
    select_parents,
)
from .neighborhood import NsStats, TabuList, ns_run
from .ranking import RankingResult, rank_and_weigh
from .sgs import fbi, serial_sgs


class Budget:
    """Counts generated schedules against a cap; optionally wall-clock
    limited for 'unlimited' runs."""

    def __init__(self, limit: Optional[int] = None, time_limit: Optional[float] = None):
        self.limit = limit
        self.time_limit = time_limit
        self.used = 0
        self._t0 = time.monotonic()

    def charge(self, k: int = 1) -> None:
        self.used += k

    @property
    def exhausted(self) -> bool:
        if self.limit is not None and self.used >= self.limit:
            return True
        if self.time_limit is not None and time.monotonic() - self._t0 >= self.time_limit:
            return True
        return False


@dataclass
class SolverConfig:
    lambda_budget: Optional[int] = 50000
    time_limit: Optional[float] = None
    sigma1: float = 0.2
    sigma2: float = 0.6
    population_capacity: int = 60
    parent_probability: float = 0.25
    dense_threshold: float = 0.75
    block_size: int = 4
    lambda_ns: int = 5
    ns_burst: Optional[int] = None  # None: set by regime classification
    stagnation_trigger: Optional[int] = None  # None: set by classification
    elite_count: Optional[int] = None  # default capacity // 4
    parents_size: Optional[int] = None  # default capacity // 2
    mutation_iterations: int = 2
    tabu_capacity: int = 50
    grasp_constructions: int = 16
    fbi_passes: int = 4
    weight_mode: str = "random"
    use_crossover: bool = True
    unique_init: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.sigma1 < self.sigma2):
            raise ValueError("need 0 < sigma1 < sigma2")
        if not (0 < self.parent_probability <= 1):
            raise ValueError("parent_probability must be in (0, 1]")
        if self.population_capacity < 1:
            raise ValueError("population_capacity must be positive")

    @classmethod
    def from_file(cls, path: str) -> "SolverConfig":
        """key = value, one per line; '#' starts a comment."""
        values = {}
        valid = {f.name: f for f in fields(cls)}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, val = (part.strip() for part in line.split("=", 1))
                if key not in valid:
                    raise ValueError(f"{path}:{lineno}: unknown key '{key}'")
                values[key] = _coerce(val)
        return cls(**values)


def _coerce(text: str):
    low = text.lower()
    if low in ("none", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class RunStats:
    schedules_generated: int = 0
    trace: list[tuple[int, int]] = field(default_factory=list)
    subset: int = 0
    cp_bound: int = 0
    relaxed_makespan: int = 0
    weight_mode: str = ""
    weights: tuple[float, ...] = ()
    generations: int = 0
    ns_bursts: int = 0
    parameter_changes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def record(self, used: int, makespan: int) -> None:
        if not self.trace or makespan < self.trace[-1][1]:
            self.trace.append((used, makespan))


def classify_subset(ub: int, cp_bound: int, sigma1: float, sigma2: float) -> int:
    """Regime 1/2/3 by the relative gap of the initial record to the
    critical path."""
    cp = max(cp_bound, 1)
    sigma = (ub - cp) / cp
    if sigma < sigma1:
        return 1
    if sigma <= sigma2:
        return 2
    return 3


# (stagnation_trigger, ns_burst) per regime: regime 1 leans on the GA,
# regime 3 on the NS operator
_REGIME_PARAMS = {1: (20, 200), 2: (10, 1000), 3: (5, 5000)}


@dataclass
class AdaptiveState:
    dense_threshold: float
    parent_probability: float
    block_size: int
    p_changes_without_record: int = 0

    # observation windows, reset after each adaptation
    dense_gene_counts: list[int] = field(default_factory=list)
    ns_empty: int = 0
    ns_nonempty: int = 0
    record_improved: bool = False
    uniqueness_strained: bool = False


def adapt_parameters(state: AdaptiveState, log: Optional[list[str]] = None) -> AdaptiveState:
    """Self-tuning at stagnation checkpoints: nudge the dense-gene
    threshold toward a useful gene supply, keep the parent probability in
    [0.1, 0.5], grow/shrink the block size by the empty-neighbor ratio,
    and after five block-size changes without a record, reset the block
    size to 1 (the caller re-draws the resource weights)."""

    def note(msg: str) -> None:
        if log is not None:
            log.append(msg)

    if state.dense_gene_counts:
        avg = sum(state.dense_gene_counts) / len(state.dense_gene_counts)
        if avg >= 4 and state.dense_threshold > 0.15:
            state.dense_threshold = round(state.dense_threshold - 0.05, 6)
            note(f"dense_threshold -> {state.dense_threshold} (genes abundant)")
        elif avg < 1 and state.dense_threshold < 1.5:
            state.dense_threshold = round(state.dense_threshold + 0.05, 6)
            note(f"dense_threshold -> {state.dense_threshold} (genes scarce)")

    if state.record_improved:
        if state.parent_probability > 0.25:
            state.parent_probability = max(0.25, state.parent_probability - 0.05)
    else:
        if state.parent_probability < 0.5:
            state.parent_probability = min(0.5, state.parent_probability + 0.05)
            note(f"parent_probability -> {state.parent_probability:.2f}")

    total = state.ns_empty + state.ns_nonempty
    if total:
        nonempty_ratio = state.ns_nonempty / total
        changed = False
        if nonempty_ratio >= 0.5:
            state.block_size += 1
            changed = True
            note(f"block_size -> {state.block_size} (neighbors mostly non-empty)")
        elif state.block_size > 1:
            state.block_size -= 1
            changed = True
            note(f"block_size -> {state.block_size} (neighbors mostly empty)")
        if changed:
            if state.record_improved:
                state.p_changes_without_record = 0
            else:
                state.p_changes_without_record += 1

    state.dense_gene_counts = []
    state.ns_empty = 0
    state.ns_nonempty = 0
    state.record_improved = False
    return state


def solve(inst: ProjectInstance, config: SolverConfig) -> tuple[Schedule, RunStats]:
    """Run the full hybrid loop and return the best schedule found."""
    problem = validate_instance(inst)
    if problem is not None:
        raise ValueError(f"invalid instance: {problem}")

    t0 = time.monotonic()
    rng = random.Random(config.seed)
    budget = Budget(config.lambda_budget, config.time_limit)
    stats = RunStats()
    stats.cp_bound = critical_path_lower_bound(inst)

    # step 1: relaxation, ranking, weights
    ranking = rank_and_weigh(inst, mode=config.weight_mode, rng=rng)
    weights = ranking.weights
    stats.relaxed_makespan = ranking.relaxed_makespan
    stats.weight_mode = ranking.mode
    stats.weights = weights

    # step 2: initial population
    capacity = config.population_capacity
    pop = init_population(
        inst,
        capacity,
        rng,
        budget=budget,
        fbi_passes=config.fbi_passes,
        unique=config.unique_init,
    )
    best = pop.best
    stats.record(budget.used, best.makespan)

    # step 3: regime classification
    stats.subset = classify_subset(
        best.makespan, stats.cp_bound, config.sigma1, config.sigma2
    )
    trigger, burst = _REGIME_PARAMS[stats.subset]
    if config.stagnation_trigger is not None:
        trigger = config.stagnation_trigger
    if config.ns_burst is not None:
        burst = config.ns_burst

    elite_count = config.elite_count or max(1, capacity // 4)
    parents_size = config.parents_size or max(2, capacity // 2)

    state = AdaptiveState(
        dense_threshold=config.dense_threshold,
        parent_probability=config.parent_probability,
        block_size=config.block_size,
    )
    tabu = TabuList(config.tabu_capacity)

    if not config.use_crossover or capacity < 2:
        best = _pure_ns_loop(inst, best, weights, config, state, rng, budget, stats, tabu)
        stats.schedules_generated = budget.used
        stats.seconds = time.monotonic() - t0
        return best.schedule, stats

    since_improvement = 0
    while not budget.exhausted:
        parents = select_parents(pop, parents_size, state.parent_probability, rng)
        genes = {
            id(p): dense_activities(inst, p.schedule, state.dense_threshold, weights)
            for p in parents
        }
        for p in parents:
            state.dense_gene_counts.append(len(genes[id(p)]))

        offspring: list[Individual] = []
        improved = False
        for _ in range(parents_size):
            if budget.exhausted:
                break
            p1, p2 = rng.choice(parents), rng.choice(parents)
            if rng.random() < 0.5:
                child_list = crossover_a(inst, p1, p2, genes[id(p1)], genes[id(p2)])
            else:
                child_list = crossover_b(
                    inst, p1, p2, genes[id(p1)], genes[id(p2)], rng
                )
            child_sched = serial_sgs(inst, child_list, budget=budget)
            mutated = mutate(inst, child_list, config.mutation_iterations, rng)
            if mutated.order != child_list.order:
                mut_sched = serial_sgs(inst, mutated, budget=budget)
                # a worsening mutation is canceled
                if mut_sched.makespan <= child_sched.makespan:
                    child_list, child_sched = mutated, mut_sched
            polished = fbi(
                inst, child_sched, max_passes=config.fbi_passes, budget=budget
            )
            if polished.makespan < child_sched.makespan:
                from .sgs import schedule_to_list

                child_list = schedule_to_list(inst, polished)
                child_sched = polished
            child = Individual(child_list, child_sched)
            offspring.append(child)
            if child.makespan < best.makespan:
                best = child
                improved = True
                stats.record(budget.used, best.makespan)

        next_generation(pop, offspring, elite_count)
        stats.generations += 1
        if improved:
            since_improvement = 0
            state.record_improved = True
        else:
            since_improvement += 1

        if since_improvement >= trigger and not budget.exhausted:
            # refresh the tail of the population
            refresh = max(1, capacity // 5)
            pop.remove_worst(refresh)
            for _ in range(refresh):
                if budget.exhausted:
                    break
                lst = random_feasible_list(inst, rng)
                pop.insert(
                    decode_and_improve(
                        inst,
                        lst,
                        rng,
                        budget=budget,
                        use_parallel=True,
                        fbi_passes=config.fbi_passes,
                    )
                )

            seed_ind = _rank_biased_member(pop, state.parent_probability, rng)
            ns_stats = NsStats()
            burst_budget_before = budget.used
            ns_best = ns_run(
                inst,
                seed_ind,
                weights,
                steps=_steps_for_burst(burst, inst),
                rng=rng,
                P=state.block_size,
                lambda_ns=config.lambda_ns,
                tabu_capacity=config.tabu_capacity,
                grasp_constructions=config.grasp_constructions,
                budget=_SubBudget(budget, burst),
                tabu=tabu,
                stats=ns_stats,
            )
            stats.ns_bursts += 1
            state.ns_empty += ns_stats.empty
            state.ns_nonempty += ns_stats.nonempty
            if ns_best.makespan < best.makespan:
                best = ns_best
                state.record_improved = True
                stats.record(budget.used, best.makespan)
            if len(pop) > 0 and ns_best.makespan < pop.worst.makespan:
                pop.remove_worst(1)
                pop.insert(ns_best)

            prev_changes = state.p_changes_without_record
            adapt_parameters(state, log=stats.parameter_changes)
            if state.p_changes_without_record >= 5:
                state.block_size = 1
                state.p_changes_without_record = 0
                ranking = rank_and_weigh(inst, mode=config.weight_mode, rng=rng)
                weights = ranking.weights
                stats.weights = weights
                stats.parameter_changes.append(
                    "block_size reset to 1, resource weights re-drawn"
                )
            since_improvement = 0

    stats.schedules_generated = budget.used
    stats.seconds = time.monotonic() - t0
    return best.schedule, stats


class _SubBudget:
    """View of the main budget limited to an additional allowance."""

    def __init__(self, parent: Budget, allowance: int):
        self.parent = parent
        self.cap = parent.used + allowance

    def charge(self, k: int = 1) -> None:
        self.parent.charge(k)

    @property
    def exhausted(self) -> bool:
        return self.parent.exhausted or self.parent.used >= self.cap

    @property
    def used(self) -> int:
        return self.parent.used


def _steps_for_burst(burst: int, inst: ProjectInstance) -> int:
    # each NS step costs at least one decode; the sub-budget is the real cap
    return max(1, burst)


def _rank_biased_member(pop: Population, probability: float, rng) -> Individual:
    """Scan from the best member, accepting with the given probability."""
    for member in pop:
        if rng.random() < probability:
            return member
    return pop.best


def _pure_ns_loop(
    inst, best, weights, config, state, rng, budget, stats, tabu
) -> Individual:
    current = best
    while not budget.exhausted:
        ns_stats = NsStats()
        result = ns_run(
            inst,
            current,
            weights,
            steps=1000,
            rng=rng,
            P=state.block_size,
            lambda_ns=config.lambda_ns,
            tabu_capacity=config.tabu_capacity,
            grasp_constructions=config.grasp_constructions,
            budget=budget,
            tabu=tabu,
            stats=ns_stats,
        )
        stats.ns_bursts += 1
        state.ns_empty += ns_stats.empty
        state.ns_nonempty += ns_stats.nonempty
        if result.makespan < best.makespan:
            best = result
            stats.record(budget.used, best.makespan)
        current = result
        if ns_stats.empty + ns_stats.nonempty == 0:
            break  # no movement possible (e.g. trivial instance)
    return best
