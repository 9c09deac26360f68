import math

import numpy as np
import pytest

import identik


def make_dataset():
    groups = [("AA", "M", 20, 3), ("C", "F", 15, 2)]
    records, store = identik.generate_synthetic(groups, dimension=32, within=4.0, seed=3)
    return records, store


def test_cosine():
    assert identik.cosine(np.array([1.0, 0.0], dtype=np.float32),
                          np.array([1.0, 1.0], dtype=np.float32)) == pytest.approx(
        1 / math.sqrt(2))


def test_pipeline_round_trip(tmp_path):
    records, store = make_dataset()
    assert identik.validate_dataset(records, store)["valid"]

    identik.write_manifest(records, tmp_path / "m.csv")
    identik.write_embeddings(store, tmp_path / "e.emb")
    records2 = identik.read_manifest(tmp_path / "m.csv")
    store2 = identik.read_embeddings(tmp_path / "e.emb")
    assert len(records2) == len(records)
    assert store2.count == store.count and store2.dimension == 32

    split = identik.build_split(records2)
    out = identik.rank_one_scores(split, records2, store2, workers=2)
    assert len(out.results) == 35
    mated = np.array([r.mated_score for r in out.results])
    nonmated = np.array([r.nonmated_score for r in out.results])
    assert (mated > nonmated).mean() > 0.5  # separation exists by construction

    fpir, diffs = identik.diff_fpir(out.results)
    assert fpir == pytest.approx(float((mated <= nonmated).mean()))

    dp = identik.d_prime(identik.DistributionStats.from_samples(mated),
                         identik.DistributionStats.from_samples(nonmated))
    assert dp > 0


def test_metrics():
    scores = np.arange(1.0, 1001.0)
    assert identik.empirical_quantile(scores, 0.001) == 1.0
    assert identik.empirical_quantile(scores, 0.999) == 999.0
    assert identik.threshold_for_fmr(scores, 0.001) == 1000.0
    mated = np.full(100, 0.9)
    nonmated = np.full(100, 0.5)
    assert identik.delta_tail(mated, nonmated) == pytest.approx(0.4)
    fmr, fnmr = identik.fixed_threshold_rates(mated, nonmated, 0.7)
    assert fmr == 0.0 and fnmr == 0.0
    assert identik.open_set_fpir(nonmated, 0.4) == 1.0


def test_balanced_split():
    records, store = make_dataset()
    split = identik.build_balanced_split(records, identities_per_group=10, seed=1)
    assert len(split.probes) == 20
    again = identik.build_balanced_split(records, identities_per_group=10, seed=1)
    assert split.to_json() == again.to_json()


def test_shift_mated_monotone():
    records, store = make_dataset()
    out = identik.rank_one_scores(identik.build_split(records), records, store)
    prev = -1.0
    for delta in [0.0, 0.2, 0.4, 0.8]:
        fpir, _ = identik.diff_fpir(identik.shift_mated(out.results, delta))
        assert fpir >= prev
        prev = fpir
