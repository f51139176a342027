"""
Tests for batched enumeration, seeded sampling and partitioning
"""

import numpy as np
import pytest

from src.construction import build_family
from src.errors import UsageError
from src.metrics import batch_profiles
from src.sweep import (
    ExhaustiveSlice,
    SampleSlice,
    coloring_codes,
    decode_coloring,
    exhaustive_count,
    exhaustive_slices,
    free_elements,
    gray_flips,
    iter_exhaustive_batches,
    iter_sample_batches,
    run_partitioned,
    sample_chunks,
    sample_slices,
)


def _collect(batches):
    batches = list(batches)
    colorings = np.concatenate([b.colorings for b in batches])
    profiles = np.concatenate([b.profiles for b in batches])
    return colorings, profiles


def test_gray_flips_sequence():
    assert list(gray_flips(3)) == [0, 1, 0, 2, 0, 1, 0]
    assert list(gray_flips(0)) == []


@pytest.mark.parametrize("low_bits", [0, 2, 14])
def test_exhaustive_covers_every_coloring_once(low_bits):
    family = build_family(2)
    colorings, profiles = _collect(iter_exhaustive_batches(family, low_bits=low_bits))
    assert len(colorings) == exhaustive_count(9, True) == 256
    assert (colorings[:, 0] == 1).all()
    assert len(np.unique(coloring_codes(colorings))) == 256
    assert np.array_equal(profiles, batch_profiles(family, colorings))


def test_exhaustive_without_fixed_first():
    family = build_family(1)
    colorings, _ = _collect(iter_exhaustive_batches(family, fix_first=False, low_bits=1))
    assert len(colorings) == 8
    assert len(np.unique(coloring_codes(colorings))) == 8


def test_partitions_are_disjoint_and_complete():
    family = build_family(2)
    parts = exhaustive_slices(len(free_elements(9, True)), workers=2)
    assert len(parts) == 8
    codes = np.concatenate(
        [coloring_codes(_collect(iter_exhaustive_batches(family, part=part, low_bits=3))[0]) for part in parts]
    )
    assert len(codes) == 256
    assert len(np.unique(codes)) == 256


def test_single_worker_uses_one_partition():
    assert exhaustive_slices(26, 1) == [ExhaustiveSlice(0, 0)]


def test_too_many_prefix_bits():
    family = build_family(1)
    with pytest.raises(UsageError):
        next(iter_exhaustive_batches(family, part=ExhaustiveSlice(3, 0)))


def test_sampling_is_reproducible_and_split_invariant():
    family = build_family(3)
    whole, _ = _collect(iter_sample_batches(family, 1000, seed=7, batch_size=128))
    again, _ = _collect(iter_sample_batches(family, 1000, seed=7, batch_size=128))
    chunks = sample_chunks(1000, 128)
    split = [
        _collect(iter_sample_batches(family, 1000, seed=7, batch_size=128, part=part))[0]
        for part in sample_slices(chunks, workers=3)
    ]
    assert whole.shape == (1000, 27)
    assert np.array_equal(whole, again)
    assert np.array_equal(whole, np.concatenate(split))
    assert set(np.unique(whole)) == {-1, 1}


def test_different_seeds_differ():
    family = build_family(2)
    a, _ = _collect(iter_sample_batches(family, 64, seed=1, batch_size=64))
    b, _ = _collect(iter_sample_batches(family, 64, seed=2, batch_size=64))
    assert not np.array_equal(a, b)


def test_sampling_rejects_negative_seed():
    with pytest.raises(UsageError):
        next(iter_sample_batches(build_family(1), 10, seed=-1, batch_size=4))


def test_sample_slices_cover_range():
    parts = sample_slices(10, workers=4)
    assert parts[0].start == 0
    assert parts[-1].stop == 10
    assert all(a.stop == b.start for a, b in zip(parts, parts[1:]))
    assert sample_slices(5, workers=1) == [SampleSlice(0, 5)]


def test_codes_order_plus_before_minus():
    colorings = np.array([[1, 1, -1], [1, -1, 1], [-1, 1, 1]], dtype=np.int8)
    assert coloring_codes(colorings).tolist() == [1, 2, 4]
    assert decode_coloring(2, 3).tolist() == [1, -1, 1]


def _square(x):
    return x * x


def test_run_partitioned_keeps_order():
    assert run_partitioned(_square, [3, 1, 2], workers=1) == [9, 1, 4]
    assert run_partitioned(_square, [3, 1, 2], workers=2) == [9, 1, 4]
