"""
Batched enumeration and sampling of colorings, partitioned across workers

Exhaustive sweeps split the free elements into three groups: a leading
group whose sign pattern is fixed per partition, a middle group walked in
reflected Gray-code order with single-flip profile updates, and a low
group whose 2^L sign patterns are evaluated together as one numpy block.
Sampling sweeps draw from a counter-based Philox stream per fixed-size
chunk, so any split of the chunk range reproduces the same colorings.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, TypeVar

import numpy as np

from src.errors import UsageError
from src.metrics import ProfileTracker, batch_dtype, batch_profiles
from src.models import PermutationFamily

logger = logging.getLogger(__name__)

# rows x elements per evaluated batch
MAX_BATCH_CELLS = 2 ** 22

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class ProfileBatch:
    """A block of colorings with their prefix profiles"""

    colorings: np.ndarray  # (B, n) int8, +1/-1 by element
    profiles: np.ndarray  # (B, 3, n + 1)

    def __len__(self) -> int:
        return self.colorings.shape[0]


@dataclass(frozen=True)
class ExhaustiveSlice:
    """Leading sign pattern shared by every coloring of one partition"""

    prefix_bits: int
    prefix: int


@dataclass(frozen=True)
class SampleSlice:
    """Contiguous range of sampling chunks"""

    start: int
    stop: int


def free_elements(n: int, fix_first: bool) -> List[int]:
    return list(range(1 if fix_first else 0, n))


def exhaustive_count(n: int, fix_first: bool) -> int:
    return 2 ** len(free_elements(n, fix_first))


def gray_flips(bits: int) -> Iterator[int]:
    """Index of the bit flipped at each step of the reflected Gray code"""
    for i in range(1, 2 ** bits):
        yield (i & -i).bit_length() - 1


def _sign_patterns(bits: int) -> np.ndarray:
    """All 2^bits patterns as rows of +1/-1, most significant bit first"""
    codes = np.arange(2 ** bits, dtype=np.int64)
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    return (1 - 2 * ((codes[:, None] >> shifts) & 1)).astype(np.int8)


def iter_exhaustive_batches(
    family: PermutationFamily,
    fix_first: bool = True,
    part: ExhaustiveSlice = ExhaustiveSlice(0, 0),
    low_bits: int = 14,
) -> Iterator[ProfileBatch]:
    """
    Yield every coloring of one partition together with its prefix profile

    With fix_first the first element is always +1, which covers every
    coloring up to negation.
    """
    n = family.n
    free = free_elements(n, fix_first)
    if part.prefix_bits > len(free):
        raise UsageError(f"cannot fix {part.prefix_bits} of {len(free)} free elements")
    lead = free[: part.prefix_bits]
    rest = free[part.prefix_bits:]
    low_count = min(low_bits, len(rest))
    middle = rest[: len(rest) - low_count]
    low = rest[len(rest) - low_count:]

    start = np.ones(n, dtype=np.int64)
    for j, element in enumerate(lead):
        if (part.prefix >> (part.prefix_bits - 1 - j)) & 1:
            start[element] = -1
    tracker = ProfileTracker(family, start)

    low_colors = _sign_patterns(low_count)
    offsets = np.zeros((low_colors.shape[0], n), dtype=np.int8)
    offsets[:, low] = low_colors - 1
    low_delta = batch_profiles(family, offsets)

    def _emit() -> ProfileBatch:
        colorings = np.empty((low_colors.shape[0], n), dtype=np.int8)
        colorings[:] = tracker.values
        colorings[:, low] = low_colors
        profiles = tracker.sums.astype(batch_dtype(n))[None, :, :] + low_delta
        return ProfileBatch(colorings=colorings, profiles=profiles)

    yield _emit()
    for bit in gray_flips(len(middle)):
        tracker.flip(middle[bit])
        yield _emit()


def iter_sample_batches(
    family: PermutationFamily,
    samples: int,
    seed: int,
    batch_size: int,
    part: Optional[SampleSlice] = None,
) -> Iterator[ProfileBatch]:
    """
    Yield seeded uniform colorings chunk by chunk

    Chunk c is drawn from Philox(key=seed) at counter c, so the colorings do
    not depend on how the chunk range is split.  Large chunks are evaluated
    in row slices to bound memory.
    """
    if seed < 0:
        raise UsageError("seed must be nonnegative")
    chunks = sample_chunks(samples, batch_size)
    part = part or SampleSlice(0, chunks)
    for chunk in range(part.start, min(part.stop, chunks)):
        size = min(batch_size, samples - chunk * batch_size)
        rng = np.random.Generator(np.random.Philox(key=seed, counter=chunk << 64))
        colorings = (rng.integers(0, 2, size=(size, family.n), dtype=np.int8) * 2 - 1).astype(np.int8)
        step = max(1, MAX_BATCH_CELLS // family.n)
        for start in range(0, size, step):
            rows = colorings[start:start + step]
            yield ProfileBatch(colorings=rows, profiles=batch_profiles(family, rows))


def sample_chunks(samples: int, batch_size: int) -> int:
    return -(-samples // batch_size)


def exhaustive_slices(free_count: int, workers: int) -> List[ExhaustiveSlice]:
    """Partition by fixed leading sign patterns, a few parts per worker"""
    if workers <= 1:
        return [ExhaustiveSlice(0, 0)]
    bits = min(free_count, (workers - 1).bit_length() + 2)
    return [ExhaustiveSlice(bits, prefix) for prefix in range(2 ** bits)]


def sample_slices(chunks: int, workers: int) -> List[SampleSlice]:
    parts = max(1, min(chunks, workers * 4)) if workers > 1 else 1
    bounds = np.linspace(0, chunks, parts + 1).round().astype(int)
    return [SampleSlice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a] or [SampleSlice(0, 0)]


def run_partitioned(fn: Callable[[T], R], tasks: Sequence[T], workers: int) -> List[R]:
    """Map fn over tasks, in a process pool when workers > 1; results keep task order"""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.info("dispatching %d partitions to %d workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def coloring_codes(colorings: np.ndarray) -> np.ndarray:
    """Integer keys ordering colorings lexicographically with + before -"""
    n = colorings.shape[1]
    weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
    return (colorings < 0).astype(np.int64) @ weights


def decode_coloring(code: int, n: int) -> np.ndarray:
    return np.array([-1 if (code >> (n - 1 - e)) & 1 else 1 for e in range(n)], dtype=np.int64)
