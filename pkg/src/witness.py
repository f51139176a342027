"""
Constructive replay of the inductive lower-bound argument

For a coloring of a constructed family, build explicit cut triples whose
summed prefix (L) or suffix (R) values certify the bounds

    matched sign:     +-(k + delta + 2)
    mismatched sign:  + => k - 2*delta + 2,  - => -k + 2*delta - 2

where delta = |chi([n])|.  The recursion classifies the three block sums
of the outermost level, picks the block whose sub-witness extends best,
and prepends (L) or appends (R) the full neighbouring blocks of each row.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.construction import block_predecessor, block_successor, build_family, level_rows
from src.errors import DomainError, UsageError, WitnessInvariantError
from src.metrics import ceil_bound, profile_array, suffix_array
from src.models import (
    BadPrefix,
    BlockClassification,
    BlockLabel,
    Coloring,
    PermutationFamily,
    Side,
    Sign,
    WitnessTriple,
)

logger = logging.getLogger(__name__)

SIDES: Tuple[Side, Side] = ("L", "R")
SIGNS: Tuple[Sign, Sign] = ("+", "-")


def _row_tables(letter: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per (block d, permutation i): the position of d in row i, and 0/1 masks
    over blocks lying before / after d in that row
    """
    rows = level_rows(letter)
    positions = np.zeros((3, 3), dtype=np.int64)
    before = np.zeros((3, 3, 3), dtype=np.int64)
    after = np.zeros((3, 3, 3), dtype=np.int64)
    for d in range(3):
        for i, row in enumerate(rows):
            p = row.index(d)
            positions[d, i] = p
            before[d, i, list(row[:p])] = 1
            after[d, i, list(row[p + 1:])] = 1
    return positions, before, after


_TABLES = {letter: _row_tables(letter) for letter in "RL"}
_PRED = {letter: np.array([block_predecessor(letter, x) for x in range(3)]) for letter in "RL"}
_SUCC = {letter: np.array([block_successor(letter, x) for x in range(3)]) for letter in "RL"}


@dataclass
class WitnessBatch:
    """Cuts and per-permutation values of one (side, sign) witness per row"""

    cuts: np.ndarray  # (B, 3)
    values: np.ndarray  # (B, 3)

    @property
    def achieved(self) -> np.ndarray:
        return self.values.sum(axis=1)


def _word(family: PermutationFamily) -> str:
    if family.k is None or family.variant is None:
        raise DomainError("witness replay needs a family built by the recursive construction")
    return family.variant


def _check_length(family: PermutationFamily, coloring: Coloring) -> None:
    if coloring.n != family.n:
        raise UsageError(f"coloring has length {coloring.n}, family has n = {family.n}")


def witness_guarantee(k: int, total: int, sign: Sign) -> Tuple[int, str]:
    """The bound a witness must meet, and whether it is the matched or mismatched one"""
    delta = abs(total)
    if (total > 0) == (sign == "+"):
        bound = k + delta + 2
        return (bound if sign == "+" else -bound), "lemma2"
    bound = k - 2 * delta + 2
    return (bound if sign == "+" else -bound), "corollary3"


def guarantee_array(k: int, totals: np.ndarray, sign: Sign) -> np.ndarray:
    delta = np.abs(totals)
    matched = (totals > 0) == (sign == "+")
    bound = np.where(matched, k + delta + 2, k - 2 * delta + 2)
    return bound if sign == "+" else -bound


def _sorted_blocks(values) -> Tuple[int, int, int]:
    """Block indices ordered by value descending, ties by index"""
    return tuple(sorted(range(3), key=lambda x: (-values[x], x)))


def _diagonal_block(letter: str, side: Side, values, order) -> int:
    """Block whose sub-witness is extended at this level (total >= 1)"""
    a_blk, b_blk, c_blk = order
    adjacent = block_predecessor if side == "L" else block_successor
    a, b, c = (int(values[x]) for x in order)
    if adjacent(letter, b_blk) == a_blk:
        if b <= -1 and not a + b >= 1 - c >= 2:
            raise WitnessInvariantError(f"case ii chain a + b >= 1 - c >= 2 fails for {(a, b, c)}")
        return b_blk
    if b >= 1:
        return a_blk
    if not a + c >= 1 - b >= 2:
        raise WitnessInvariantError(f"case ii chain a + c >= 1 - b >= 2 fails for {(a, b, c)}")
    return c_blk


def classify_blocks(family: PermutationFamily, coloring: Coloring) -> BlockClassification:
    """Sorted block sums of the outermost level and their configuration"""
    word = _word(family)
    if family.k == 0:
        raise DomainError("a k = 0 family has no blocks")
    _check_length(family, coloring)
    values = tuple(int(v) for v in coloring.array().reshape(3, -1).sum(axis=1))
    order = _sorted_blocks(values)
    a, b, c = (values[x] for x in order)
    labels = [BlockLabel("ABC"[x]) for x in order]
    # configuration I: b sits directly after a in some row, i.e. the assignment is a rotation
    configuration = "I" if block_predecessor(word[0], order[1]) == order[0] else "II"
    case_tag = None
    if a + b + c >= 1:
        case_tag = "i" if b >= 1 else "ii"
    return BlockClassification(
        values=values,
        a=a,
        b=b,
        c=c,
        assignment=dict(zip("abc", labels)),
        configuration=configuration,
        case_tag=case_tag,
    )


def _base_witness(word: str, colors: np.ndarray, side: Side) -> Tuple[List[int], List[int]]:
    """First optimal cut triple by exhaustive search, for k <= 1"""
    base = build_family(len(word), word)
    m = base.n
    if side == "L":
        table, cut_range, shift = profile_array(base, colors), range(0, m + 1), 0
    else:
        table, cut_range, shift = suffix_array(base, colors), range(1, m + 2), 1
    best_value, best_cuts = None, None
    for cuts in itertools.product(cut_range, repeat=3):
        value = sum(int(table[i, cut - shift]) for i, cut in enumerate(cuts))
        if best_value is None or value > best_value:
            best_value, best_cuts = value, cuts
    return list(best_cuts), [int(table[i, cut - shift]) for i, cut in enumerate(best_cuts)]


def _replay(word: str, colors: np.ndarray, side: Side, sign: Sign) -> Tuple[List[int], List[int]]:
    if sign == "-":
        cuts, values = _replay(word, -colors, side, "+")
        return cuts, [-v for v in values]
    if len(word) <= 1:
        return _base_witness(word, colors, side)

    total = int(colors.sum())
    if total <= -1:
        # disc_L+ = 3 chi([n]) - disc_R-, and symmetrically for R+
        other = "R" if side == "L" else "L"
        cuts, values = _replay(word, colors, other, "-")
        shift = -1 if side == "L" else 1
        return [cut + shift for cut in cuts], [total - v for v in values]

    letter = word[0]
    sub = colors.size // 3
    block_values = colors.reshape(3, sub).sum(axis=1)
    d = _diagonal_block(letter, side, block_values, _sorted_blocks(block_values))
    sub_cuts, sub_values = _replay(word[1:], colors[d * sub:(d + 1) * sub], side, "+")
    cuts, values = [], []
    for i, row in enumerate(level_rows(letter)):
        p = row.index(d)
        neighbours = row[:p] if side == "L" else row[p + 1:]
        cuts.append(p * sub + sub_cuts[i])
        values.append(int(sum(block_values[q] for q in neighbours)) + sub_values[i])
    return cuts, values


def _report_miss(family: PermutationFamily, witness: WitnessTriple) -> WitnessTriple:
    message = (
        f"witness ({witness.side},{witness.sign}) achieved {witness.achieved} "
        f"against guarantee {witness.guarantee} on variant {family.variant}"
    )
    if family.is_canonical:
        raise WitnessInvariantError(message)
    logger.warning("finding: %s", message)
    return witness.model_copy(update={"certified": False})


def build_witness(family: PermutationFamily, coloring: Coloring, side: Side, sign: Sign) -> WitnessTriple:
    """
    Cut triple certifying the guaranteed bound on disc_side^sign

    Args:
        family: A family from the recursive construction (any variant)
        coloring: Coloring of length family.n
        side: "L" for prefixes, "R" for suffixes
        sign: "+" for a lower bound on the max, "-" for an upper bound on the min

    Raises:
        WitnessInvariantError: the replay missed its guarantee on a canonical family
    """
    word = _word(family)
    _check_length(family, coloring)
    if side not in SIDES or sign not in SIGNS:
        raise UsageError(f"side must be L or R and sign + or -, got {side!r} {sign!r}")
    cuts, values = _replay(word, coloring.array(), side, sign)
    guarantee, kind = witness_guarantee(family.k, coloring.total, sign)
    witness = WitnessTriple(
        side=side,
        sign=sign,
        cuts=tuple(cuts),
        per_perm_values=tuple(values),
        achieved=sum(values),
        guarantee=guarantee,
        bound_kind=kind,
    )
    if not witness.meets_guarantee:
        return _report_miss(family, witness)
    return witness


def build_witness_batch(family: PermutationFamily, colorings: np.ndarray, side: Side, sign: Sign) -> WitnessBatch:
    """
    The same replay as build_witness for every row of a (B, n) coloring matrix

    The recursion is unrolled into a descent that keeps, per row, the current
    side, the orientation of the sub-coloring, and the affine maps taking the
    sub-witness's cuts and values back to the full family.
    """
    word = _word(family)
    k = family.k
    colorings = np.asarray(colorings)
    if colorings.ndim != 2 or colorings.shape[1] != family.n:
        raise UsageError(f"expected a (B, {family.n}) coloring matrix, got shape {colorings.shape}")
    count = colorings.shape[0]
    rows = np.arange(count)

    is_r = np.full(count, side == "R")
    orient = np.full(count, 1 if sign == "+" else -1, dtype=np.int64)
    vscale = orient.copy()
    voff = np.zeros((count, 3), dtype=np.int64)
    coff = np.zeros((count, 3), dtype=np.int64)
    offset = np.zeros(count, dtype=np.int64)

    ground = np.zeros((count, family.n + 1), dtype=np.int64)
    np.cumsum(colorings, axis=1, dtype=np.int64, out=ground[:, 1:])

    size = family.n
    for letter in word[: max(k - 1, 0)]:
        sub = size // 3
        edges = np.take_along_axis(ground, offset[:, None] + np.arange(4) * sub, axis=1)
        blocks = np.diff(edges, axis=1) * orient[:, None]
        totals = blocks.sum(axis=1)

        flip = totals < 0
        voff += np.where(flip, vscale * totals, 0)[:, None]
        coff += np.where(flip, np.where(is_r, 1, -1), 0)[:, None]
        is_r = is_r ^ flip
        orient = np.where(flip, -orient, orient)
        blocks = np.where(flip[:, None], -blocks, blocks)

        order = np.argsort(-blocks * 4 + np.arange(3), axis=1)
        a_blk, b_blk, c_blk = order[:, 0], order[:, 1], order[:, 2]
        adjacent = np.where(is_r, _SUCC[letter][b_blk], _PRED[letter][b_blk])
        b_val = blocks[rows, b_blk]
        d = np.where(adjacent == a_blk, b_blk, np.where(b_val >= 1, a_blk, c_blk))

        positions, before, after = _TABLES[letter]
        mask = np.where(is_r[:, None, None], after[d], before[d])
        voff += vscale[:, None] * (mask * blocks[:, None, :]).sum(axis=2)
        coff += positions[d] * sub
        offset += d * sub
        size = sub

    base_k = min(k, 1)
    base = build_family(base_k, word[k - base_k:])
    index = base.index_array()
    local = colorings[rows[:, None, None], offset[:, None, None] + index[None, :, :]].astype(np.int64) * orient[:, None, None]
    sums = np.zeros((count, 3, base.n + 1), dtype=np.int64)
    np.cumsum(local, axis=2, out=sums[:, :, 1:])
    local_total = sums[:, 0, -1]
    cut = np.where(is_r[:, None], sums.argmin(axis=2) + 1, sums.argmax(axis=2))
    value = np.where(is_r[:, None], local_total[:, None] - sums.min(axis=2), sums.max(axis=2))
    return WitnessBatch(cuts=cut + coff, values=vscale[:, None] * value + voff)


def extract_bad_prefix(family: PermutationFamily, coloring: Coloring) -> BadPrefix:
    """
    One prefix whose absolute value reaches ceil(k/3) + 1

    The matched-sign L witness sums to at least k + 3 in absolute value, so
    one of its three prefixes carries at least a third of it.
    """
    sign: Sign = "+" if coloring.total > 0 else "-"
    witness = build_witness(family, coloring, "L", sign)
    magnitudes = [abs(v) for v in witness.per_perm_values]
    perm = magnitudes.index(max(magnitudes))
    bad = BadPrefix(
        perm=perm + 1,
        length=witness.cuts[perm],
        value=witness.per_perm_values[perm],
        bound=ceil_bound(family.k),
    )
    if abs(bad.value) < bad.bound:
        message = f"bad prefix |{bad.value}| below {bad.bound} on variant {family.variant}"
        if family.is_canonical:
            raise WitnessInvariantError(message)
        logger.warning("finding: %s", message)
    return bad


def witness_table(family: PermutationFamily, coloring: Coloring) -> Dict[str, WitnessTriple]:
    """All four (side, sign) witnesses keyed like DiscQuadruple.cuts"""
    names = {"+": "plus", "-": "minus"}
    return {
        f"{side.lower()}_{names[sign]}": build_witness(family, coloring, side, sign)
        for side in SIDES
        for sign in SIGNS
    }
