"""
Tests for the recursive, tensor and dense constructions
"""

import pytest

from src.construction import (
    DENSE_MAX_K,
    all_variants,
    block_predecessor,
    block_successor,
    build_family,
    build_family_dense,
    build_family_tensor,
    detect_variant,
    induced_subfamily,
)
from src.errors import DomainError, ResourceLimitError, UsageError
from src.models import BlockLabel, PermutationFamily

GOLDEN_9 = [
    "1 2 3 4 5 6 7 8 9",
    "9 7 8 3 1 2 6 4 5",
    "5 6 4 8 9 7 2 3 1",
]

GOLDEN_27 = [
    " ".join(str(e) for e in range(1, 28)),
    "27 25 26 21 19 20 24 22 23 9 7 8 3 1 2 6 4 5 18 16 17 12 10 11 15 13 14",
    "14 15 13 17 18 16 11 12 10 23 24 22 26 27 25 20 21 19 5 6 4 8 9 7 2 3 1",
]


def _lines(family):
    return [" ".join(str(e) for e in perm) for perm in family.perms]


def test_golden_n9():
    assert _lines(build_family(2)) == GOLDEN_9


def test_golden_n27():
    assert _lines(build_family(3)) == GOLDEN_27


def test_k0_is_single_element():
    family = build_family(0)
    assert family.perms == ((1,), (1,), (1,))
    assert family.variant == ""


def test_k1_directions():
    assert build_family(1).perms == ((1, 2, 3), (3, 1, 2), (2, 3, 1))
    assert build_family(1, "L").perms == ((1, 2, 3), (2, 3, 1), (3, 1, 2))


@pytest.mark.parametrize("k", range(0, 9))
def test_recursive_matches_tensor(k):
    assert build_family(k).perms == build_family_tensor(k).perms


@pytest.mark.parametrize("k", range(1, 5))
def test_recursive_matches_tensor_all_variants(k):
    for word in all_variants(k):
        assert build_family(k, word).perms == build_family_tensor(k, word).perms


@pytest.mark.parametrize("k", range(0, DENSE_MAX_K + 1))
def test_dense_kronecker_matches(k):
    assert build_family_dense(k).perms == build_family(k).perms


def test_dense_refuses_large_k():
    with pytest.raises(ResourceLimitError):
        build_family_dense(DENSE_MAX_K + 1)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("block", list(BlockLabel))
def test_induced_subfamily_is_previous_level(k, block):
    sub = induced_subfamily(build_family(k), block)
    assert sub.k == k - 1
    assert sub.perms == build_family(k - 1).perms


def test_induced_subfamily_keeps_variant_tail():
    sub = induced_subfamily(build_family(3, "LRL"), BlockLabel.C)
    assert sub.variant == "RL"
    assert sub.perms == build_family(2, "RL").perms


@pytest.mark.parametrize("k", [1, 3, 5, 8])
def test_variants_are_bijections(k):
    words = list(all_variants(k))
    for word in (words[0], words[1], words[len(words) // 2], words[-1]):
        family = build_family(k, word)
        for perm in family.perms:
            assert sorted(perm) == list(range(1, 3 ** k + 1))


def test_canonical_first_permutation_is_identity():
    family = build_family(4)
    assert family.is_canonical
    assert family.perms[0] == tuple(range(1, 82))
    assert not build_family(4, "RRLR").is_canonical


def test_all_variants_count_and_order():
    words = list(all_variants(3))
    assert len(words) == 8
    assert words[0] == "RRR"
    assert len(set(words)) == 8


def test_positions_are_inverse():
    family = build_family(3, "RLR")
    for perm, positions in zip(family.perms, family.positions):
        for x, element in enumerate(perm, start=1):
            assert positions[element - 1] == x


def test_block_neighbours():
    for letter in "RL":
        assert block_predecessor(letter, 1) == 0
        assert block_predecessor(letter, 0) == 2
        assert block_successor(letter, 1) == 2
        assert block_successor(letter, 2) == 0


@pytest.mark.parametrize("k", [2, 3])
def test_detect_variant_recognises_every_word(k):
    for word in all_variants(k):
        assert detect_variant(build_family(k, word).perms) == (k, word)


def test_detect_variant_rejects_other_instances():
    assert detect_variant(((1, 2, 3), (1, 2, 3), (1, 2, 3))) is None
    assert detect_variant(((1, 2), (2, 1), (1, 2))) is None


def test_bad_variant_words():
    with pytest.raises(UsageError):
        build_family(2, "R")
    with pytest.raises(UsageError):
        build_family(2, "RX")
    with pytest.raises(UsageError):
        build_family(-1)


def test_lowercase_variant_accepted():
    assert build_family(2, "rl").variant == "RL"


def test_induced_subfamily_errors():
    with pytest.raises(DomainError):
        induced_subfamily(build_family(0), BlockLabel.A)
    loose = PermutationFamily(perms=((1, 2), (2, 1), (1, 2)))
    with pytest.raises(DomainError):
        induced_subfamily(loose, BlockLabel.A)


def test_family_validation_rejects_non_bijection():
    with pytest.raises(ValueError):
        PermutationFamily(perms=((1, 1, 3), (1, 2, 3), (1, 2, 3)))
    with pytest.raises(ValueError):
        PermutationFamily(perms=((1, 2, 3), (1, 2), (1, 2, 3)))
