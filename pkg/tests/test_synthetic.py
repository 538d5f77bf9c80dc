from collections import Counter

import numpy as np
import pytest

from merchcast.records import write_records_csv
from merchcast.synthetic import DECADE_SHARES, generate_synthetic


class TestGenerateSynthetic:
    def test_zero_share_near_half(self):
        records = generate_synthetic(441, seed=7)
        zero_share = sum(1 for r in records if r.label == 0) / len(records)
        assert 0.45 <= zero_share <= 0.55

    def test_byte_identical_under_seed(self, tmp_path):
        a = generate_synthetic(441, seed=7)
        b = generate_synthetic(441, seed=7)
        assert a == b
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(a, pa)
        write_records_csv(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_different_seeds_differ(self):
        assert generate_synthetic(441, seed=7) != generate_synthetic(441, seed=8)

    def test_decade_mix(self):
        records = generate_synthetic(441, seed=7)
        decades = Counter((r.year // 10) * 10 for r in records)
        for decade, share in DECADE_SHARES:
            assert decades[decade] / 441 == pytest.approx(share, abs=0.05)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            generate_synthetic(9, seed=1)

    def test_labels_valid_and_skewed(self):
        records = generate_synthetic(441, seed=3)
        labels = [r.label for r in records]
        assert all(isinstance(l, int) and 0 <= l <= 25 for l in labels)
        counts = Counter(labels)
        low = sum(counts[i] for i in range(1, 6))
        high = sum(counts[i] for i in range(21, 26))
        assert low > high  # nonzero mass skews toward small scores

    def test_planted_signal_recoverable(self):
        records = generate_synthetic(441, seed=5)
        series = [r.label for r in records if r.is_series]
        solo = [r.label for r in records if not r.is_series]
        assert np.mean(series) > np.mean(solo) + 2.0
        rich = [r.label for r in records if r.box_office > 5.0]
        poor = [r.label for r in records if r.box_office <= 1.0]
        assert np.mean(rich) > np.mean(poor)

    def test_records_schema_complete(self):
        records = generate_synthetic(50, seed=2)
        for rec in records:
            assert rec.film and rec.year and rec.mpaa
            assert rec.genres and rec.directors and rec.stars
            assert rec.box_office is not None and rec.label is not None
            if not rec.is_series:
                assert rec.series_count == 0
