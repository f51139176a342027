"""
Recursive and tensor-product constructions of the three-permutation family

Each level splits the current interval into three consecutive blocks
A, B, C and lays them out in every permutation according to that level's
row pattern.  Direction R (the canonical construction) uses the rows
(A,B,C), (C,A,B), (B,C,A); direction L uses the mirror rows (A,B,C),
(B,C,A), (C,A,B).  Variant words are read outermost level first.
"""

import logging
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import DomainError, ResourceLimitError, UsageError
from src.models import BlockLabel, PermutationFamily

logger = logging.getLogger(__name__)

Rows = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]

ROW_PATTERNS: Dict[str, Rows] = {
    "R": ((0, 1, 2), (2, 0, 1), (1, 2, 0)),
    "L": ((0, 1, 2), (1, 2, 0), (2, 0, 1)),
}

# M_1 = I; rows of M_2, M_3 route block r of the output to block ROWS[i][r] of v.
BASE_MATRICES: Dict[str, np.ndarray] = {
    letter: np.stack(
        [np.eye(3, dtype=np.int64)[list(row)] for row in rows]
    )
    for letter, rows in ROW_PATTERNS.items()
}

DENSE_MAX_K = 5


def canonical_variant(k: int) -> str:
    return "R" * k


def _normalize_variant(k: int, variant: Optional[str]) -> str:
    if k < 0:
        raise UsageError(f"k must be nonnegative, got {k}")
    if variant is None:
        return canonical_variant(k)
    variant = variant.upper()
    if len(variant) != k:
        raise UsageError(f"variant {variant!r} has length {len(variant)}, expected k = {k}")
    if set(variant) - {"R", "L"}:
        raise UsageError(f"variant {variant!r} must use only R and L")
    return variant


def level_rows(letter: str) -> Rows:
    """Block order of each permutation at a level with the given direction"""
    return ROW_PATTERNS[letter]


def block_predecessor(letter: str, block: int) -> int:
    """Block that precedes `block` in the row where `block` sits second"""
    for row in ROW_PATTERNS[letter]:
        if row[1] == block:
            return row[0]
    raise AssertionError("every block sits second in exactly one row")


def block_successor(letter: str, block: int) -> int:
    """Block that follows `block` in the row where `block` sits second"""
    for row in ROW_PATTERNS[letter]:
        if row[1] == block:
            return row[2]
    raise AssertionError("every block sits second in exactly one row")


def build_family(k: int, variant: Optional[str] = None) -> PermutationFamily:
    """
    Build the family by iterating the 3-block permute step k times

    Args:
        k: Recursion depth, n = 3^k
        variant: Word over {R, L}, outermost level first; all-R when omitted
    """
    word = _normalize_variant(k, variant)
    return _build_family_cached(k, word)


@lru_cache(maxsize=64)
def _build_family_cached(k: int, word: str) -> PermutationFamily:
    perms = [[1], [1], [1]]
    size = 1
    # innermost level first; each step wraps the current perms in one more level
    for letter in reversed(word):
        rows = ROW_PATTERNS[letter]
        perms = [
            [block * size + element for block in rows[i] for element in perms[i]]
            for i in range(3)
        ]
        size *= 3
    logger.debug("built family k=%d variant=%s", k, word or "-")
    return PermutationFamily(k=k, variant=word, perms=tuple(tuple(p) for p in perms))


def build_family_tensor(k: int, variant: Optional[str] = None) -> PermutationFamily:
    """
    Build the family as pi_i = M_i^(x)k . v without materialising the product

    Position p has base-3 digits (d_1, ..., d_k), most significant first; the
    tensor action sends digit d_j of the position through row d_j of the
    level-j matrix, which picks the digit of the element.
    """
    word = _normalize_variant(k, variant)
    n = 3 ** k
    positions = np.arange(n, dtype=np.int64)
    perms = []
    for i in range(3):
        element = np.zeros(n, dtype=np.int64)
        for j, letter in enumerate(word):
            weight = 3 ** (k - 1 - j)
            digit = (positions // weight) % 3
            routed = BASE_MATRICES[letter][i].argmax(axis=1)[digit]
            element += routed * weight
        perms.append(tuple((element + 1).tolist()))
    return PermutationFamily(k=k, variant=word, perms=tuple(perms))


def build_family_dense(k: int) -> PermutationFamily:
    """Canonical family from explicit Kronecker powers; memory grows as 9^k"""
    if k > DENSE_MAX_K:
        raise ResourceLimitError(f"dense tensor construction is capped at k = {DENSE_MAX_K}")
    _normalize_variant(k, None)
    v = np.arange(1, 3 ** k + 1, dtype=np.int64)
    perms = []
    for i in range(3):
        product = np.ones((1, 1), dtype=np.int64)
        for _ in range(k):
            product = np.kron(product, BASE_MATRICES["R"][i])
        perms.append(tuple((product @ v).tolist()))
    return PermutationFamily(k=k, variant=canonical_variant(k), perms=tuple(perms))


def induced_subfamily(family: PermutationFamily, block: BlockLabel) -> PermutationFamily:
    """
    Restrict every permutation to one third of the ground set and relabel it

    The result keeps each permutation's order on the block and maps the
    block's elements onto 1..3^(k-1) by the order-preserving bijection.
    """
    if family.k is None:
        raise DomainError("induced subfamilies need a family with recursive structure")
    if family.k == 0:
        raise DomainError("a k = 0 family has no sublevel")
    block = BlockLabel(block)
    size = family.n // 3
    low = block.index * size
    perms = tuple(
        tuple(e - low for e in perm if low < e <= low + size) for perm in family.perms
    )
    return PermutationFamily(k=family.k - 1, variant=family.variant[1:], perms=perms)


def detect_variant(perms) -> Optional[Tuple[int, str]]:
    """Return (k, variant) when the perms are exactly a member of the construction"""
    n = len(perms[0])
    k = 0
    while 3 ** k < n:
        k += 1
    if 3 ** k != n:
        return None
    # position 1 of the second permutation carries the first block of each level's row
    first = perms[1][0] - 1
    word = []
    for j in range(k):
        digit = (first // 3 ** (k - 1 - j)) % 3
        if digit == ROW_PATTERNS["R"][1][0]:
            word.append("R")
        elif digit == ROW_PATTERNS["L"][1][0]:
            word.append("L")
        else:
            return None
    candidate = build_family(k, "".join(word))
    if tuple(tuple(p) for p in perms) != candidate.perms:
        return None
    return k, candidate.variant


def all_variants(k: int):
    """All 2^k direction words, canonical first"""
    for mask in range(2 ** k):
        yield "".join("L" if mask >> (k - 1 - j) & 1 else "R" for j in range(k))
