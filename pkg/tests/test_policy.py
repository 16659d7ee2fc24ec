import numpy as np
import pytest

from crowdaffect import (
    ALL_EMOTIONS,
    NoValidLabelError,
    PolicyInfeasibleError,
    RetentionPolicy,
    assign_single,
    compound_candidate,
    curate,
    reliability_report,
    retain_labels,
    valid_labels,
)
from crowdaffect.em import EMResult, EMState, TraceEntry
from crowdaffect.reliability import ReliabilityReport

from . import properties
from .conftest import AN, DI, FE, HL, NE, SA, SU, make_corpus, rec


def fake_report(corpus, default=0.95, overrides=None):
    """ReliabilityReport with hand-set balanced reliabilities.

    overrides: {(annotator_id, Emotion): balanced} or {annotator_id: balanced}.
    Balanced value b is realized as sensitivity = specificity = b.
    """
    overrides = overrides or {}
    results = {}
    for cat in ALL_EMOTIONS:
        values = []
        for a in corpus.annotators:
            b = overrides.get((a, cat), overrides.get(a, default))
            values.append(b)
        arr = np.array(values, dtype=float)
        state = EMState(
            sensitivity=arr,
            specificity=arr.copy(),
            prevalence=0.3,
            posterior=np.zeros(corpus.n_clips),
            log_like_pos=np.zeros(corpus.n_clips),
            log_like_neg=np.zeros(corpus.n_clips),
            objective=-1.0,
            iteration=1,
        )
        results[cat] = EMResult(state, True, 1, (TraceEntry(1, -1.0, -1.0),))
    return ReliabilityReport(corpus.annotators, corpus.clips, results, {})


def annotators(n):
    return [f"a{i:02d}" for i in range(n)]


def test_valid_labels_count_and_confidence():
    records = []
    fe_scores = [0.6, 0.5, 0.7, 0.4, 0.6, 0.8]
    for i, s in enumerate(fe_scores):
        records.append(rec("v", f"a{i:02d}", [FE], [s]))
    for i in range(6, 11):
        records.append(rec("v", f"a{i:02d}", [SU], [0.9]))
    valid = valid_labels(records)
    # 6 of 11 >= 5.5 and mean 0.6 >= 0.5; SU has only 5 of 11
    assert valid == {FE: pytest.approx(0.6, abs=1e-15)}


def test_valid_labels_confidence_rule_blocks_low_scores():
    records = []
    for i in range(5):
        records.append(rec("v", f"a{i:02d}", [AN], [0.4]))
    for i in range(5, 10):
        records.append(rec("v", f"a{i:02d}", [DI], [0.8]))
    valid = valid_labels(records)
    # AN counts 5 of 10 but mean confidence 0.4 < 0.5
    assert AN not in valid
    assert valid[DI] == pytest.approx(0.8, abs=1e-15)


def test_valid_labels_empty_for_no_records():
    assert valid_labels([]) == {}


def test_valid_labels_exact_boundary():
    # mean exactly 0.5 passes the threshold
    records = [
        rec("v", "a00", [AN], [0.4]),
        rec("v", "a01", [AN], [0.6]),
    ]
    assert valid_labels(records)[AN] == 0.5


def test_assign_single_rules():
    assert assign_single({AN: 0.7, DI: 0.6}) is AN
    assert assign_single({AN: 0.7, DI: 0.7}) is AN  # tie -> lower ordinal
    assert assign_single({NE: 0.9}) is NE
    with pytest.raises(NoValidLabelError):
        assign_single({})


def test_assign_single_order_insensitive():
    base = {AN: 0.6, DI: 0.8, SA: 0.8}
    for ordering in ([AN, DI, SA], [SA, DI, AN], [DI, SA, AN]):
        shuffled = {cat: base[cat] for cat in ordering}
        assert assign_single(shuffled) is DI  # 0.8 tie, DI ordinal < SA


def test_compound_candidate_rules():
    assert compound_candidate({SA: 0.8, HL: 0.6}).canonical_name == "Sadness,Helplessness"
    assert compound_candidate({NE: 0.9, SA: 0.8}) is None  # neutral excluded
    assert compound_candidate({AN: 0.8}) is None
    assert compound_candidate({AN: 0.8, DI: 0.8, FE: 0.7, SA: 0.6}) is None  # > 3


def test_retention_threshold_filtering():
    ids = annotators(11)
    records = [rec("v", a, [AN], [0.8]) for a in ids]
    corpus = make_corpus(records)
    overrides = {(a, AN): 0.9 for a in ids[:8]}
    overrides.update({(a, AN): 0.3 for a in ids[8:]})
    report = fake_report(corpus, default=0.9, overrides=overrides)
    result = retain_labels(corpus, report, RetentionPolicy())
    assert result.retained_counts["v"] == 8
    assert result.fallback_clips == frozenset()
    kept = {r.annotator_id for r in result.corpus.records}
    assert kept == set(ids[:8])


def test_retention_fallback_top5_full_records():
    ids = annotators(11)
    records = [rec("v", a, [AN, DI], [0.8, 0.6]) for a in ids]
    corpus = make_corpus(records)
    # only three annotators clear the threshold anywhere
    overrides = {a: 0.3 for a in ids}
    for a in ids[:3]:
        overrides[a] = 0.9
    report = fake_report(corpus, overrides=overrides)
    result = retain_labels(corpus, report, RetentionPolicy())
    assert "v" in result.fallback_clips
    assert result.retained_counts["v"] == 5
    kept = sorted({r.annotator_id for r in result.corpus.records})
    # three above threshold plus the two lexicographically-first of the tied rest
    assert kept == sorted(ids[:3] + ids[3:5])
    for r in result.corpus.records:
        assert r.labels == (AN, DI)  # fallback keeps the full record


def test_retention_unchanged_when_everyone_reliable():
    ids = annotators(6)
    records = [rec(f"v{j}", a, [AN], [0.8]) for j in range(3) for a in ids]
    corpus = make_corpus(records)
    report = fake_report(corpus, default=1.0 - 1e-9)
    result = retain_labels(corpus, report, RetentionPolicy())
    key = lambda r: (r.video_id, r.annotator_id)
    assert sorted(result.corpus.records, key=key) == sorted(corpus.records, key=key)
    assert result.fallback_clips == frozenset()


def test_retention_infeasible_policy():
    ids = annotators(3)
    corpus = make_corpus([rec("v", a, [AN], [0.8]) for a in ids])
    report = fake_report(corpus)
    with pytest.raises(PolicyInfeasibleError):
        retain_labels(corpus, report, RetentionPolicy(min_retained_per_clip=5))


def _compound_corpus():
    """12 clips labeled {AN, DI}, 10 labeled {FE, SA}, by 5 unanimous annotators."""
    ids = annotators(5)
    records = []
    for j in range(12):
        for a in ids:
            records.append(rec(f"ad{j:03d}", a, [AN, DI], [0.8, 0.6]))
    for j in range(10):
        for a in ids:
            records.append(rec(f"fs{j:03d}", a, [FE, SA], [0.8, 0.6]))
    return make_corpus(records)


def test_curate_prunes_small_compounds():
    corpus = _compound_corpus()
    report = fake_report(corpus)
    dataset = curate(corpus, report)
    names = {comp.canonical_name for comp in dataset.multiple_set}
    assert names == {"Anger,Disgust"}  # 12 > 10 survives, 10 > 10 fails
    assert len(next(iter(dataset.multiple_set.values()))) == 12
    # pruned clips remain in the single set
    singles = {vid for ids in dataset.single_set.values() for vid in ids}
    assert all(f"fs{j:03d}" in singles for j in range(10))
    by_id = {d.video_id: d for d in dataset.decisions}
    assert by_id["ad000"].disposition == "single_and_multiple"
    assert by_id["ad000"].single_label is AN  # 0.8 > 0.6
    assert by_id["fs000"].disposition == "single_only"
    assert by_id["fs000"].compound_label is None


def test_curate_compound_example_sadness_helplessness():
    ids = annotators(5)
    records = []
    for j in range(12):
        for a in ids:
            records.append(rec(f"v{j:03d}", a, [SA, HL], [0.8, 0.6]))
    corpus = make_corpus(records)
    dataset = curate(corpus, fake_report(corpus))
    decision = dataset.decisions[0]
    assert decision.single_label is SA
    assert decision.compound_label.canonical_name == "Sadness,Helplessness"
    assert decision.disposition == "single_and_multiple"


def test_curate_excludes_clips_without_valid_labels():
    ids = annotators(5)
    records = []
    # scores too low for any validity on v0; healthy labels on v1
    for a in ids:
        records.append(rec("v0", a, [AN], [0.2]))
        records.append(rec("v1", a, [DI], [0.8]))
    corpus = make_corpus(records)
    dataset = curate(corpus, fake_report(corpus))
    assert dataset.excluded == [("v0", "no_valid_label")]
    assert dataset.single_set[DI] == ["v1"]
    properties.check_partition(corpus, dataset)


def test_curate_neutral_never_in_compounds():
    ids = annotators(5)
    records = []
    for j in range(15):
        for a in ids:
            records.append(rec(f"v{j:03d}", a, [NE, SA], [0.9, 0.8]))
    corpus = make_corpus(records)
    dataset = curate(corpus, fake_report(corpus))
    assert dataset.multiple_set == {}
    assert dataset.single_set[NE] == sorted(f"v{j:03d}" for j in range(15))


def test_curate_selection_properties_on_simulation(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus)
    policy = RetentionPolicy()
    dataset = curate(corpus, report, policy)
    properties.check_all(corpus, report, policy, dataset)


def test_curate_deterministic(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus)
    d1 = curate(corpus, report)
    d2 = curate(corpus, report)
    assert d1.to_json_obj() == d2.to_json_obj()
    assert d1.decisions == d2.decisions
