"""
Tests for the exhaustive oracle, the decision search and the heuristics
"""

import numpy as np
import pytest

from src.construction import all_variants, build_family
from src.errors import ResourceLimitError, UsageError
from src.metrics import ceil_bound, prefix_system_discrepancy
from src.models import PermutationFamily
from src.solver import (
    decide_disc_at_most,
    exhaustive_min_disc,
    heuristic_coloring,
    heuristic_outcome,
    min_disc_by_decision,
)
from tests.conftest import all_colorings


def _brute_force(family):
    return min(prefix_system_discrepancy(family, c)[0] for c in all_colorings(family.n))


def _random_instance(rng, n):
    return PermutationFamily(perms=tuple(tuple((rng.permutation(n) + 1).tolist()) for _ in range(3)))


def test_exhaustive_k1(family1):
    outcome = exhaustive_min_disc(family1)
    assert outcome.mode == "exact"
    assert outcome.value == 2
    assert outcome.nodes_explored == 4
    assert prefix_system_discrepancy(family1, outcome.witness_coloring)[0] == 2
    assert outcome.witness_coloring.to_string() == "++-"


def test_exhaustive_k2_matches_brute_force(family2):
    outcome = exhaustive_min_disc(family2, low_bits=3)
    assert outcome.value == _brute_force(family2)
    assert outcome.value >= ceil_bound(2)
    assert outcome.nodes_explored == 256
    assert outcome.witness_coloring.values[0] == 1


def test_exhaustive_witness_independent_of_workers(family2):
    single = exhaustive_min_disc(family2, workers=1, low_bits=2)
    parallel = exhaustive_min_disc(family2, workers=2, low_bits=2)
    assert single.value == parallel.value
    assert single.witness_coloring == parallel.witness_coloring
    assert single.nodes_explored == parallel.nodes_explored


def test_exhaustive_refuses_large_n():
    with pytest.raises(ResourceLimitError):
        exhaustive_min_disc(build_family(4))


def test_decide_k1(family1):
    assert decide_disc_at_most(family1, 1).feasible is False
    outcome = decide_disc_at_most(family1, 2)
    assert outcome.feasible is True
    assert outcome.witness_coloring.to_string() == "+-+"


def test_decide_k3_t1_infeasible():
    outcome = decide_disc_at_most(build_family(3), 1)
    assert outcome.status == "definite"
    assert outcome.feasible is False


def test_decide_rejects_bad_threshold(family1):
    with pytest.raises(UsageError):
        decide_disc_at_most(family1, 0)


def test_decide_budget_exhaustion_is_indeterminate():
    outcome = decide_disc_at_most(build_family(3), 2, node_budget=3)
    assert outcome.status == "indeterminate"
    assert outcome.feasible is None


def test_decide_monotone_and_agrees_with_oracle(family2):
    exact = exhaustive_min_disc(family2).value
    answers = [decide_disc_at_most(family2, t).feasible for t in range(1, exact + 2)]
    assert answers == [t >= exact for t in range(1, exact + 2)]


@pytest.mark.parametrize("order", ["perm2", "perm3", [9, 8, 7, 6, 5, 4, 3, 2, 1]])
def test_decide_alternative_orders(family2, order):
    exact = exhaustive_min_disc(family2).value
    assert decide_disc_at_most(family2, exact - 1, order=order).feasible is False
    feasible = decide_disc_at_most(family2, exact, order=order)
    assert feasible.feasible is True
    assert prefix_system_discrepancy(family2, feasible.witness_coloring)[0] <= exact


def test_decide_rejects_bad_order(family1):
    with pytest.raises(UsageError):
        decide_disc_at_most(family1, 2, order=[1, 1, 2])
    with pytest.raises(UsageError):
        decide_disc_at_most(family1, 2, order="backwards")


def test_random_instances_agree(rng):
    for n in (5, 8, 11, 14):
        family = _random_instance(rng, n)
        exact = exhaustive_min_disc(family, low_bits=4).value
        if n <= 11:
            assert exact == _brute_force(family)
        for t in range(1, exact + 2):
            outcome = decide_disc_at_most(family, t)
            assert outcome.feasible == (t >= exact)
            if outcome.feasible:
                assert prefix_system_discrepancy(family, outcome.witness_coloring)[0] <= t


def _assert_decisions_match_oracle(family):
    exact = exhaustive_min_disc(family).value
    for t in range(1, exact + 2):
        outcome = decide_disc_at_most(family, t)
        assert outcome.status == "definite"
        assert outcome.feasible == (t >= exact), f"n={family.n} t={t}"


def test_seeded_random_instances_agree_with_oracle():
    rng = np.random.default_rng(9)
    for _ in range(20):
        _assert_decisions_match_oracle(_random_instance(rng, int(rng.integers(3, 21))))


@pytest.mark.parametrize("word", [*all_variants(1), *all_variants(2)])
def test_variant_families_agree_with_oracle(word):
    _assert_decisions_match_oracle(build_family(len(word), word))


def test_non_positive_budgets_rejected(family1):
    with pytest.raises(UsageError):
        decide_disc_at_most(family1, 2, node_budget=0)
    with pytest.raises(UsageError):
        decide_disc_at_most(family1, 2, time_budget=0)
    with pytest.raises(UsageError):
        exhaustive_min_disc(family1, workers=0)


def test_min_disc_by_decision(family2):
    outcome = min_disc_by_decision(family2)
    assert outcome.mode == "exact"
    assert outcome.value == exhaustive_min_disc(family2).value


def test_exact_value_invariant_under_relabelling(family2):
    swapped = PermutationFamily(perms=(family2.perms[2], family2.perms[0], family2.perms[1]))
    assert exhaustive_min_disc(swapped).value == exhaustive_min_disc(family2).value


def test_greedy_balance_k1(family1):
    coloring = heuristic_coloring(family1, "greedy-balance")
    assert coloring.to_string() == "+-+"
    assert prefix_system_discrepancy(family1, coloring)[0] <= 2


@pytest.mark.parametrize("k", range(1, 7))
def test_greedy_respects_lower_bound(k):
    family = build_family(k)
    outcome = heuristic_outcome(family, "greedy-balance")
    assert outcome.value >= ceil_bound(k)
    assert outcome.value == prefix_system_discrepancy(family, outcome.witness_coloring)[0]


def test_random_heuristic_is_seeded():
    family = build_family(3)
    a = heuristic_coloring(family, "random", seed=11)
    b = heuristic_coloring(family, "random", seed=11)
    c = heuristic_coloring(family, "random", seed=12)
    assert a == b
    assert a != c


def test_random_heuristic_default_seed(monkeypatch):
    monkeypatch.setenv("DISC_SEED", "5")
    family = build_family(2)
    assert heuristic_coloring(family, "random") == heuristic_coloring(family, "random", seed=5)


def test_unknown_strategy(family1):
    with pytest.raises(UsageError):
        heuristic_coloring(family1, "annealing")
