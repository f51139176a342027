"""
Signed prefix/suffix sums and the discrepancy functionals of a coloring

Colorings are indexed by element; every evaluation routes through the
family's position maps so one coloring serves all three permutations.
All values are exact integers.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from src.errors import UsageError
from src.models import Coloring, DiscQuadruple, PermutationFamily, PrefixProfile, Side

logger = logging.getLogger(__name__)

INT16_LIMIT = np.iinfo(np.int16).max


def batch_dtype(n: int) -> type:
    """Narrowest integer type for batch prefix sums over n elements; low-bit offsets reach 2n"""
    return np.int16 if 2 * n <= INT16_LIMIT else np.int32


def _check_length(family: PermutationFamily, coloring: Coloring) -> None:
    if coloring.n != family.n:
        raise UsageError(f"coloring has length {coloring.n}, family has n = {family.n}")


def profile_array(family: PermutationFamily, values: np.ndarray) -> np.ndarray:
    """P_i(x) for x in 0..n as an integer array of shape (3, n + 1)"""
    steps = np.asarray(values, dtype=np.int64)[family.index_array()]
    sums = np.zeros((3, family.n + 1), dtype=np.int64)
    np.cumsum(steps, axis=1, out=sums[:, 1:])
    return sums


def suffix_array(family: PermutationFamily, values: np.ndarray) -> np.ndarray:
    """Suffix sums accumulated from the back: column y - 1 holds the suffix starting at y"""
    steps = np.asarray(values, dtype=np.int64)[family.index_array()]
    sums = np.zeros((3, family.n + 1), dtype=np.int64)
    sums[:, :-1] = np.cumsum(steps[:, ::-1], axis=1)[:, ::-1]
    return sums


def prefix_profile(family: PermutationFamily, coloring: Coloring) -> PrefixProfile:
    _check_length(family, coloring)
    sums = profile_array(family, coloring.array())
    return PrefixProfile(sums=tuple(tuple(row) for row in sums.tolist()))


def suffix_profile(family: PermutationFamily, coloring: Coloring) -> Tuple[Tuple[int, ...], ...]:
    """Per permutation, the suffix value for every start y in 1..n+1"""
    _check_length(family, coloring)
    return tuple(tuple(row) for row in suffix_array(family, coloring.array()).tolist())


def disc_quadruple(family: PermutationFamily, coloring: Coloring) -> DiscQuadruple:
    """
    Evaluate disc_L+, disc_L-, disc_R+ and disc_R- for one coloring

    Prefix cuts are lengths x in [0, n]; suffix cuts are starts y in
    [1, n + 1] with y = n + 1 the empty suffix.  Each cut is the first
    optimiser along its permutation.
    """
    _check_length(family, coloring)
    values = coloring.array()
    prefix = profile_array(family, values)
    suffix = suffix_array(family, values)

    def _cuts(indices: np.ndarray, shift: int) -> Tuple[int, int, int]:
        return tuple(int(x) + shift for x in indices)

    return DiscQuadruple(
        l_plus=int(prefix.max(axis=1).sum()),
        l_minus=int(prefix.min(axis=1).sum()),
        r_plus=int(suffix.max(axis=1).sum()),
        r_minus=int(suffix.min(axis=1).sum()),
        cuts={
            "l_plus": _cuts(prefix.argmax(axis=1), 0),
            "l_minus": _cuts(prefix.argmin(axis=1), 0),
            "r_plus": _cuts(suffix.argmax(axis=1), 1),
            "r_minus": _cuts(suffix.argmin(axis=1), 1),
        },
    )


def prefix_system_discrepancy(family: PermutationFamily, coloring: Coloring) -> Tuple[int, Tuple[int, int]]:
    """Max |P_i(x)| over nonempty prefixes, with the first witnessing (perm, x)"""
    _check_length(family, coloring)
    magnitudes = np.abs(profile_array(family, coloring.array())[:, 1:])
    flat = int(magnitudes.argmax())
    perm, x = divmod(flat, family.n)
    return int(magnitudes.max()), (perm + 1, x + 1)


def interval_system_discrepancy(family: PermutationFamily, coloring: Coloring) -> int:
    _check_length(family, coloring)
    sums = profile_array(family, coloring.array())
    return int((sums.max(axis=1) - sums.min(axis=1)).max())


def evaluate_cuts(family: PermutationFamily, coloring: Coloring, side: Side, cuts) -> Tuple[int, int, int]:
    """Signed value of each permutation's prefix (L) or suffix (R) at the given cuts"""
    _check_length(family, coloring)
    n = family.n
    values = coloring.array()
    if side == "L":
        sums = profile_array(family, values)
        if any(not 0 <= x <= n for x in cuts):
            raise UsageError(f"prefix lengths must lie in [0, {n}]: {cuts}")
        return tuple(int(sums[i, x]) for i, x in enumerate(cuts))
    sums = suffix_array(family, values)
    if any(not 1 <= y <= n + 1 for y in cuts):
        raise UsageError(f"suffix starts must lie in [1, {n + 1}]: {cuts}")
    return tuple(int(sums[i, y - 1]) for i, y in enumerate(cuts))


class ProfileTracker:
    """
    Prefix profile kept current under single-element flips

    Flipping element e changes P_i(x) by 2 * new_color for every x past
    e's position in permutation i; all other entries are untouched.
    """

    def __init__(self, family: PermutationFamily, values):
        self.family = family
        self._positions = family.position_array()
        self.values = np.array(values, dtype=np.int64)
        if self.values.shape != (family.n,):
            raise UsageError(f"expected {family.n} colors, got {self.values.shape}")
        self.sums = profile_array(family, self.values)

    def flip(self, element: int) -> None:
        """Flip the color of a 0-based element"""
        new = -self.values[element]
        self.values[element] = new
        for i in range(3):
            self.sums[i, self._positions[i, element] + 1:] += 2 * new

    def coloring(self) -> Coloring:
        return Coloring.from_array(self.values)

    def profile(self) -> PrefixProfile:
        return PrefixProfile(sums=tuple(tuple(row) for row in self.sums.tolist()))


def batch_profiles(family: PermutationFamily, colorings: np.ndarray) -> np.ndarray:
    """Prefix profiles for a (B, n) coloring matrix, shape (B, 3, n + 1)"""
    colorings = np.asarray(colorings)
    dtype = batch_dtype(family.n)
    steps = colorings[:, family.index_array()].astype(dtype, copy=False)
    sums = np.zeros((colorings.shape[0], 3, family.n + 1), dtype=dtype)
    np.cumsum(steps, axis=2, dtype=dtype, out=sums[:, :, 1:])
    return sums


def batch_suffixes(family: PermutationFamily, colorings: np.ndarray) -> np.ndarray:
    """Suffix sums for a (B, n) coloring matrix, shape (B, 3, n + 1)"""
    colorings = np.asarray(colorings)
    dtype = batch_dtype(family.n)
    steps = colorings[:, family.index_array()].astype(dtype, copy=False)
    sums = np.zeros((colorings.shape[0], 3, family.n + 1), dtype=dtype)
    sums[:, :, :-1] = np.cumsum(steps[:, :, ::-1], axis=2, dtype=dtype)[:, :, ::-1]
    return sums


def batch_quadruples(profiles: np.ndarray, suffixes: np.ndarray) -> Dict[str, np.ndarray]:
    """The four functionals and the total for every row of a batch"""
    return {
        "total": profiles[:, 0, -1].astype(np.int32),
        "l_plus": profiles.max(axis=2).sum(axis=1, dtype=np.int32),
        "l_minus": profiles.min(axis=2).sum(axis=1, dtype=np.int32),
        "r_plus": suffixes.max(axis=2).sum(axis=1, dtype=np.int32),
        "r_minus": suffixes.min(axis=2).sum(axis=1, dtype=np.int32),
    }


def batch_prefix_discrepancy(profiles: np.ndarray) -> np.ndarray:
    """Prefix-system discrepancy of every row of a batch"""
    return np.abs(profiles[:, :, 1:]).max(axis=(1, 2))


def ceil_bound(k: int) -> int:
    """ceil(k/3 + 1), the lower bound on disc(S_k)"""
    return -(-k // 3) + 1
