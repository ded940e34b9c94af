import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from twinsep.errors import ValidationError
from twinsep.sieve import (
    CountRecord,
    SieveConfig,
    adjusted_pi1,
    geometric_checkpoints,
    max_gap_onsets,
    read_separations,
    sieve_range,
    write_separations,
)


def run(limit, segment_size=1 << 20, grid=()):
    return sieve_range(SieveConfig(limit=limit, segment_size=segment_size, checkpoint_grid=grid))


class TestCounts:
    def test_limit_2(self):
        rep = run(2)
        assert rep.counts[-1] == CountRecord(n=2, pi1=1, pi2=0)
        assert rep.separations.size == 0

    def test_limit_10(self):
        rep = run(10)
        rec = rep.counts[-1]
        assert (rec.pi1, rec.pi2) == (4, 2)  # twins (3 5) and (5 7)

    def test_limit_100(self):
        rec = run(100).counts[-1]
        assert (rec.pi1, rec.pi2) == (25, 8)
        # 25 primes, trailing singletons 79 83 89 97, minus primes 2 and 3
        assert rec.pi1_adjusted == 25 - 4 - 2

    def test_small_limits_match_oracle(self, oracle100k):
        primes, twins = oracle100k["primes"], oracle100k["twins"]
        for limit in range(2, 400):
            rec = run(limit).counts[-1]
            assert (rec.pi1, rec.pi2) == oracle.counts_at(primes, twins, limit), limit

    def test_monotone_over_checkpoint_grid(self):
        grid = geometric_checkpoints(100_000, per_decade=20, start=100)
        rep = run(100_000, grid=grid)
        pi1 = [r.pi1 for r in rep.counts]
        pi2 = [r.pi2 for r in rep.counts]
        assert pi1 == sorted(pi1)
        assert pi2 == sorted(pi2)

    def test_checkpoint_counts_match_final_runs(self):
        grid = (10, 100, 1000, 9973, 10_000)
        rep = run(10_000, grid=grid)
        for rec in rep.counts:
            alone = run(rec.n).counts[-1]
            assert rec == alone

    def test_pi1_adjusted_matches_oracle(self, oracle100k):
        primes, twins = oracle100k["primes"], oracle100k["twins"]
        for limit in (100, 1000, 4999, 100_000):
            rec = run(limit).counts[-1]
            trailing = oracle.trailing_singletons(primes, twins, limit)
            assert rec.pi1_adjusted == rec.pi1 - trailing - 2

    def test_no_adjustment_before_first_real_twin(self):
        # up to 6 the only twin is (3 5), which never anchors an adjustment
        rec = run(6).counts[-1]
        assert rec.pi2 == 1
        assert rec.pi1_adjusted is None


class TestSeparations:
    def test_stream_to_100(self):
        # twins after (3 5): (5 7) (11 13) (17 19) (29 31) (41 43) (59 61) (71 73)
        # singletons between: -, -, 23, 37, {47 53}, 67
        rep = run(100)
        assert rep.separations.tolist() == [0, 0, 1, 1, 2, 1]

    def test_onsets_to_100(self):
        rep = run(100)
        assert rep.max_separation_onsets == [(0, 11), (1, 29), (2, 59)]

    def test_stream_matches_oracle(self, oracle100k):
        rep = run(oracle100k["limit"])
        assert rep.separations.tolist() == oracle100k["seps"]

    def test_stream_length_invariant(self):
        for limit in (2, 5, 7, 30, 1000, 12345):
            rep = run(limit)
            assert rep.separations.size == max(0, rep.counts[-1].pi2 - 2)

    def test_onsets_strictly_increasing(self, oracle100k):
        rep = run(oracle100k["limit"])
        ons = rep.max_separation_onsets
        assert all(a[0] < b[0] and a[1] < b[1] for a, b in zip(ons, ons[1:]))

    def test_twin_disjointness(self, oracle100k):
        twins = [t for t in oracle100k["twins"] if t > 5]
        assert all(b - a >= 4 for a, b in zip(twins, twins[1:]))


class TestDeterminism:
    @pytest.mark.parametrize("segment_size", [1024, 4096, 65536, 1 << 20])
    def test_segment_size_invariance(self, segment_size, oracle100k):
        ref = run(oracle100k["limit"])
        rep = run(oracle100k["limit"], segment_size=segment_size)
        assert [dataclasses.astuple(r) for r in rep.counts] == [
            dataclasses.astuple(r) for r in ref.counts
        ]
        assert np.array_equal(rep.separations, ref.separations)
        assert rep.max_separation_onsets == ref.max_separation_onsets

    @settings(max_examples=30, deadline=None)
    @given(
        limit=st.integers(min_value=2, max_value=100_000),
        segment_size=st.sampled_from([1024, 2048, 30000, 1 << 20]),
    )
    def test_exactness_random_limits(self, limit, segment_size, oracle100k):
        primes, twins = oracle100k["primes"], oracle100k["twins"]
        rep = run(limit, segment_size=segment_size)
        rec = rep.counts[-1]
        assert (rec.pi1, rec.pi2) == oracle.counts_at(primes, twins, limit)
        n_twins = sum(1 for t in twins if t != 3 and t + 2 <= limit)
        assert rep.separations.tolist() == oracle100k["seps"][: max(0, n_twins - 1)]


class TestOps:
    def test_adjusted_pi1_n100(self):
        rec = CountRecord(n=100, pi1=25, pi2=8)
        assert adjusted_pi1(rec, last_twin_upper=73, trailing_singletons=4) == 19

    def test_adjusted_pi1_no_trailing(self):
        rec = CountRecord(n=50, pi1=10, pi2=4)
        assert adjusted_pi1(rec, last_twin_upper=43, trailing_singletons=0) == 8

    def test_adjusted_pi1_negative_result(self):
        rec = CountRecord(n=5, pi1=2, pi2=0)
        with pytest.raises(ValidationError):
            adjusted_pi1(rec, last_twin_upper=5, trailing_singletons=1)

    def test_max_gap_onsets_n100(self):
        seps = [0, 0, 1, 1, 2, 1]
        positions = [5, 11, 17, 29, 41, 59, 71]
        assert max_gap_onsets(seps, positions) == [(0, 11), (1, 29), (2, 59)]

    def test_max_gap_onsets_empty(self):
        assert max_gap_onsets([], []) == []

    def test_max_gap_onsets_single(self):
        assert max_gap_onsets([5], [101, 149]) == [(5, 149)]

    def test_max_gap_onsets_length_mismatch(self):
        with pytest.raises(ValidationError):
            max_gap_onsets([1, 2], [5, 11])


class TestConfigValidation:
    def test_limit_too_small(self):
        with pytest.raises(ValidationError):
            SieveConfig(limit=1)

    def test_segment_too_small(self):
        with pytest.raises(ValidationError):
            SieveConfig(limit=100, segment_size=512)

    def test_grid_not_increasing(self):
        with pytest.raises(ValidationError):
            SieveConfig(limit=100, checkpoint_grid=(10, 10, 50))

    def test_grid_beyond_limit(self):
        with pytest.raises(ValidationError):
            SieveConfig(limit=100, checkpoint_grid=(10, 200))

    def test_count_record_invariant(self):
        with pytest.raises(ValidationError):
            CountRecord(n=10, pi1=2, pi2=2)


class TestCheckpointHelpers:
    def test_geometric_grid_shape(self):
        grid = geometric_checkpoints(10**6, per_decade=20, start=1000)
        assert grid[0] >= 1000
        assert grid[-1] == 10**6
        assert all(b > a for a, b in zip(grid, grid[1:]))
        assert len(grid) == 61  # 3 decades at 20/decade, inclusive

    def test_geometric_grid_below_start(self):
        assert geometric_checkpoints(500, per_decade=20, start=1000) == (500,)


class TestSerialization:
    def test_separation_roundtrip(self, tmp_path):
        path = tmp_path / "seps.bin"
        seps = run(10_000).separations
        write_separations(path, seps)
        back = read_separations(path)
        assert np.array_equal(back, seps)
        # little-endian u32 on disk
        assert path.stat().st_size == 4 * seps.size
        raw = path.read_bytes()
        assert int.from_bytes(raw[:4], "little") == int(seps[0])
