import json

import numpy as np
import pytest

from crowdaffect import (
    ALL_EMOTIONS,
    EMConfig,
    EmptyCorpusError,
    Emotion,
    SimConfig,
    reliability_report,
    simulate,
)

from .conftest import AN, DI, make_corpus, rec

FLOOR = 1e-9


def _unanimous_corpus():
    # five annotators perfectly agree: clips v0/v1 are Anger, v2/v3 Disgust
    records = []
    for a in ("a1", "a2", "a3", "a4", "a5"):
        records.append(rec("v0", a, [AN], [0.8]))
        records.append(rec("v1", a, [AN], [0.9]))
        records.append(rec("v2", a, [DI], [0.7]))
        records.append(rec("v3", a, [DI], [0.8]))
    return make_corpus(records)


def test_perfect_agreement_gives_maximal_balanced_reliability():
    report = reliability_report(_unanimous_corpus())
    for cat in (AN, DI):  # both positive and negative clips exist
        for annotator in report.annotators:
            assert report.balanced_reliability(annotator, cat) == pytest.approx(
                1.0 - FLOOR, abs=1e-9
            )


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpusError):
        reliability_report(make_corpus([]))


def test_all_categories_present_in_report(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus)
    assert set(report.results) == set(ALL_EMOTIONS)
    assert report.failures == {}
    assert all(res.converged for res in report.results.values())


def test_coin_flip_annotator_recovers_half(sim_corpus_recovery):
    # rebuild the recovery corpus but make the last annotator vote by fair
    # coin flip regardless of the ground truth
    corpus, truth = sim_corpus_recovery
    coin = np.random.default_rng(123)
    records = []
    flipper = corpus.annotators[-1]
    for r in corpus.records:
        if r.annotator_id == flipper:
            continue
        records.append(r)
    for vid in corpus.clips:
        labels = tuple(cat for cat in ALL_EMOTIONS if coin.random() < 0.5)
        if not labels:
            continue
        scores = tuple(0.5 for _ in labels)
        records.append(type(corpus.records[0])(vid, flipper, labels, scores))
    noisy = make_corpus(records)
    report = reliability_report(noisy)
    for cat in ALL_EMOTIONS:
        state = report.results[cat].state
        i = noisy.annotators.index(flipper)
        assert abs(state.sensitivity[i] - 0.5) < 0.05
        assert abs(state.specificity[i] - 0.5) < 0.05


def test_balanced_matrix_and_means(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus)
    matrix = report.balanced_matrix()
    assert matrix.shape == (corpus.n_annotators, 11)
    means = report.mean_balanced_reliability()
    i = corpus.annotators.index(corpus.annotators[0])
    assert means[corpus.annotators[0]] == pytest.approx(np.mean(matrix[i]))
    # strong annotators (first six in the fixture) rank above the weak five
    strong = [means[a] for a in corpus.annotators[:6]]
    weak = [means[a] for a in corpus.annotators[6:]]
    assert min(strong) > max(weak)


def test_json_export_schema(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus, EMConfig())
    obj = report.to_json_obj()
    assert set(obj) == {cat.display_name for cat in ALL_EMOTIONS}
    entry = obj["Anger"]
    assert set(entry) == {"alpha", "beta", "p", "phi", "iterations", "converged", "trace"}
    assert set(entry["alpha"]) == set(corpus.annotators)
    assert set(entry["phi"]) == set(corpus.clips)
    assert entry["trace"][0].keys() == {"iteration", "q", "log_likelihood"}
    json.dumps(obj)  # serializable


def test_trace_log_likelihood_monotone(sim_corpus_medium):
    corpus, _ = sim_corpus_medium
    report = reliability_report(corpus)
    for res in report.results.values():
        lls = [t.log_likelihood for t in res.trace]
        assert all(b - a >= -1e-9 for a, b in zip(lls, lls[1:]))


def test_simulator_recovery_within_tolerance(sim_corpus_recovery):
    corpus, _ = sim_corpus_recovery
    report = reliability_report(corpus)
    hits = 0
    total = 0
    for cat in ALL_EMOTIONS:
        state = report.results[cat].state
        assert abs(state.prevalence - 0.3) <= 0.03
        for i in range(corpus.n_annotators):
            total += 1
            if (
                abs(state.sensitivity[i] - 0.85) <= 0.05
                and abs(state.specificity[i] - 0.85) <= 0.05
            ):
                hits += 1
    assert hits / total >= 0.90
