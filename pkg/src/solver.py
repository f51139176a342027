"""
Exact and heuristic discrepancy computation for prefix set systems of three permutations

- exhaustive_min_disc: reference oracle by complete enumeration (n <= 30)
- decide_disc_at_most: complete branch-and-bound for "disc <= t?"
- heuristic_coloring: seeded random and greedy-balance baselines
"""

import logging
import time
from functools import partial
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import get_settings, positive_or_default
from src.errors import ResourceLimitError, UsageError
from src.metrics import batch_prefix_discrepancy, prefix_system_discrepancy
from src.models import Coloring, PermutationFamily, SolveOutcome
from src.sweep import (
    ExhaustiveSlice,
    coloring_codes,
    decode_coloring,
    exhaustive_slices,
    free_elements,
    iter_exhaustive_batches,
    run_partitioned,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 30
STRATEGIES = ("random", "greedy-balance")


def _min_disc_slice(family: PermutationFamily, low_bits: int, part: ExhaustiveSlice) -> Tuple[int, int, int]:
    """(best value, smallest code attaining it, colorings seen) over one partition"""
    best_value, best_code, seen = None, None, 0
    for batch in iter_exhaustive_batches(family, fix_first=True, part=part, low_bits=low_bits):
        disc = batch_prefix_discrepancy(batch.profiles)
        seen += len(batch)
        value = int(disc.min())
        if best_value is not None and value > best_value:
            continue
        code = int(coloring_codes(batch.colorings[disc == value]).min())
        if best_value is None or value < best_value or code < best_code:
            best_value, best_code = value, code
    return best_value, best_code, seen


def exhaustive_min_disc(
    family: PermutationFamily,
    workers: Optional[int] = None,
    low_bits: Optional[int] = None,
) -> SolveOutcome:
    """
    Minimum prefix-system discrepancy by enumerating every coloring with chi(1) = +1

    The reported witness is the lexicographically smallest optimal coloring
    (+ before -), so the outcome does not depend on the worker count.
    """
    if family.n > EXHAUSTIVE_MAX_N:
        raise ResourceLimitError(
            f"exhaustive search is capped at n = {EXHAUSTIVE_MAX_N} (2^n colorings); got n = {family.n}"
        )
    settings = get_settings()
    workers = positive_or_default("workers", workers, settings.workers)
    low_bits = settings.low_bits if low_bits is None else low_bits
    started = time.perf_counter()

    parts = exhaustive_slices(len(free_elements(family.n, True)), workers)
    results = run_partitioned(partial(_min_disc_slice, family, low_bits), parts, workers)
    value, code = min((value, code) for value, code, _ in results)
    seen = sum(count for _, _, count in results)

    witness = Coloring.from_array(decode_coloring(code, family.n))
    if prefix_system_discrepancy(family, witness)[0] != value:
        raise AssertionError("exhaustive witness does not reproduce the minimum")
    elapsed = time.perf_counter() - started
    logger.info("exhaustive n=%d: min disc %d over %d colorings in %.2fs", family.n, value, seen, elapsed)
    return SolveOutcome(
        mode="exact",
        value=value,
        witness_coloring=witness,
        nodes_explored=seen,
        wall_time=elapsed,
    )


class _BudgetExhausted(Exception):
    pass


def _element_order(family: PermutationFamily, order: Union[str, Sequence[int]]) -> List[int]:
    """0-based assignment order: 'ground', 'perm1'..'perm3', or an explicit 1-based list"""
    if isinstance(order, str):
        if order == "ground":
            return list(range(family.n))
        if order in ("perm1", "perm2", "perm3"):
            return [e - 1 for e in family.perms[int(order[-1]) - 1]]
        raise UsageError(f"unknown element order {order!r}")
    elements = [int(e) - 1 for e in order]
    if sorted(elements) != list(range(family.n)):
        raise UsageError("element order must list every element exactly once")
    return elements


def _band_feasible(sequence: Sequence[int], values: List[int], t: int) -> bool:
    """
    Can the walk P(0..n) along one permutation stay inside [-t, t]?

    Assigned elements are fixed +-1 steps, unassigned ones are free.  The
    reachable values after x steps form a run of integers with the parity
    of x, so tracking its two ends is exact for a single permutation.
    """
    lo = hi = 0
    for x, element in enumerate(sequence, start=1):
        v = values[element]
        if v:
            lo += v
            hi += v
        else:
            lo -= 1
            hi += 1
        if lo < -t:
            lo = -t if (x - t) % 2 == 0 else -t + 1
        if hi > t:
            hi = t if (x - t) % 2 == 0 else t - 1
        if lo > hi:
            return False
    return True


def decide_disc_at_most(
    family: PermutationFamily,
    t: int,
    node_budget: Optional[int] = None,
    time_budget: Optional[float] = None,
    order: Union[str, Sequence[int]] = "ground",
) -> SolveOutcome:
    """
    Complete backtracking search for a coloring with prefix discrepancy <= t

    feasible=False certifies disc > t; an exhausted budget yields the
    indeterminate status with feasible=None, never a negative answer.
    """
    if t < 1:
        raise UsageError(f"threshold t must be >= 1, got {t}")
    settings = get_settings()
    node_budget = positive_or_default("node_budget", node_budget, settings.node_budget)
    time_budget = positive_or_default("time_budget", time_budget, settings.time_budget_seconds)
    started = time.perf_counter()
    deadline = started + time_budget

    n = family.n
    sequences = [[e - 1 for e in perm] for perm in family.perms]
    elements = _element_order(family, order)
    values = [0] * n
    nodes = 0

    def _search(depth: int, running: int) -> bool:
        nonlocal nodes
        if depth == n:
            return True
        nodes += 1
        if nodes > node_budget or (nodes & 1023 == 0 and time.perf_counter() > deadline):
            raise _BudgetExhausted()
        element = elements[depth]
        # negation symmetry: the first assigned element is +1
        first = -1 if running > 0 else 1
        choices = (1,) if depth == 0 else (first, -first)
        for sign in choices:
            values[element] = sign
            if all(_band_feasible(seq, values, t) for seq in sequences):
                if _search(depth + 1, running + sign):
                    return True
        values[element] = 0
        return False

    try:
        feasible = _search(0, 0)
    except _BudgetExhausted:
        elapsed = time.perf_counter() - started
        logger.warning("decide n=%d t=%d: budget exhausted after %d nodes", n, t, nodes)
        return SolveOutcome(
            mode="decide", value=t, feasible=None, status="indeterminate",
            nodes_explored=nodes, wall_time=elapsed,
        )

    witness = None
    if feasible:
        witness = Coloring.from_array(values)
        if prefix_system_discrepancy(family, witness)[0] > t:
            raise AssertionError("decision witness exceeds the threshold")
    elapsed = time.perf_counter() - started
    logger.info("decide n=%d t=%d: feasible=%s after %d nodes", n, t, feasible, nodes)
    return SolveOutcome(
        mode="decide", value=t, feasible=feasible, witness_coloring=witness,
        nodes_explored=nodes, wall_time=elapsed,
    )


def min_disc_by_decision(family: PermutationFamily, **budgets) -> SolveOutcome:
    """Smallest t with a feasible decision, scanning upward from 1"""
    started = time.perf_counter()
    nodes = 0
    t = 1
    while True:
        outcome = decide_disc_at_most(family, t, **budgets)
        nodes += outcome.nodes_explored
        if outcome.status == "indeterminate":
            return outcome.model_copy(update={"mode": "exact", "nodes_explored": nodes})
        if outcome.feasible:
            return SolveOutcome(
                mode="exact", value=t, witness_coloring=outcome.witness_coloring,
                nodes_explored=nodes, wall_time=time.perf_counter() - started,
            )
        t += 1


def heuristic_coloring(family: PermutationFamily, strategy: str = "greedy-balance", seed: Optional[int] = None) -> Coloring:
    """
    Baseline coloring

    random: i.i.d. signs from a seeded generator.
    greedy-balance: elements in ground-set order, each taking the sign that
    minimises the largest |partial prefix sum| over the three permutations
    (unassigned elements count as 0), ties to +1.
    """
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    seed = get_settings().seed if seed is None else seed
    n = family.n
    if strategy == "random":
        rng = np.random.default_rng(seed)
        return Coloring.from_array(rng.choice(np.array([-1, 1]), size=n))

    positions = family.position_array()
    sums = np.zeros((3, n + 1), dtype=np.int64)
    colors = np.zeros(n, dtype=np.int64)
    for element in range(n):
        best_sign, best_peak = None, None
        for sign in (1, -1):
            peak = 0
            for i in range(3):
                start = positions[i, element] + 1
                head = np.abs(sums[i, :start]).max()
                tail = np.abs(sums[i, start:] + sign).max()
                peak = max(peak, int(head), int(tail))
            if best_peak is None or peak < best_peak:
                best_sign, best_peak = sign, peak
        colors[element] = best_sign
        for i in range(3):
            sums[i, positions[i, element] + 1:] += best_sign
    return Coloring.from_array(colors)


def heuristic_outcome(family: PermutationFamily, strategy: str, seed: Optional[int] = None) -> SolveOutcome:
    started = time.perf_counter()
    coloring = heuristic_coloring(family, strategy, seed)
    value, _ = prefix_system_discrepancy(family, coloring)
    return SolveOutcome(
        mode="heuristic", value=value, witness_coloring=coloring,
        nodes_explored=family.n, wall_time=time.perf_counter() - started,
    )
