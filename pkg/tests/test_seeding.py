import numpy as np

from src.utils.seeding import MASK64, derive_candidate_seed, splitmix64_finalize, stream_rng


def test_derived_seeds_are_distinct_per_stream():
    seeds = {derive_candidate_seed(42, s) for s in range(5000)}
    assert len(seeds) == 5000
    assert all(0 <= s <= MASK64 for s in seeds)


def test_derived_seeds_depend_on_master():
    assert derive_candidate_seed(0, 7) != derive_candidate_seed(1, 7)
    assert derive_candidate_seed(2 ** 64 - 1, 0) == splitmix64_finalize(2 ** 64 - 1)


def test_streams_are_reproducible():
    a = stream_rng(123, 4).standard_normal(8)
    b = stream_rng(123, 4).standard_normal(8)
    c = stream_rng(123, 5).standard_normal(8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def _random_masters(count: int, seed: int):
    draws = np.random.default_rng(seed).integers(0, MASK64, size=count, dtype=np.uint64, endpoint=True)
    return [int(s) for s in draws]


def test_neighbouring_streams_differ_for_random_masters():
    for master in _random_masters(10_000, 2024):
        assert derive_candidate_seed(master, 0) != derive_candidate_seed(master, 1)


def test_distinct_masters_give_distinct_seeds():
    masters = set(_random_masters(10_000, 7))
    for stream_id in (0, 1, 99):
        assert len({derive_candidate_seed(m, stream_id) for m in masters}) == len(masters)


def test_derivation_is_pure():
    for master in _random_masters(100, 1):
        assert derive_candidate_seed(master, 5) == derive_candidate_seed(master, 5)
