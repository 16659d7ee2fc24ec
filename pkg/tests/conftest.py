import numpy as np
import pytest

from crowdaffect import AnnotationCorpus, AnnotationRecord, Emotion, SimConfig, simulate

AN = Emotion.ANGER
DI = Emotion.DISGUST
FE = Emotion.FEAR
HA = Emotion.HAPPINESS
NE = Emotion.NEUTRAL
SA = Emotion.SADNESS
SU = Emotion.SURPRISE
CO = Emotion.CONTEMPT
AX = Emotion.ANXIETY
HL = Emotion.HELPLESSNESS
DS = Emotion.DISAPPOINTMENT


def rec(video_id, annotator_id, labels, scores):
    return AnnotationRecord(video_id, annotator_id, tuple(labels), tuple(scores))


def make_corpus(records, durations=None):
    return AnnotationCorpus.from_records(records, durations)


@pytest.fixture(scope="session")
def sim_corpus_medium():
    """N=400 with a mix of strong and weak annotators; retention rules bite."""
    sens = np.concatenate([np.full(6, 0.92), np.full(5, 0.58)])
    spec = np.concatenate([np.full(6, 0.90), np.full(5, 0.60)])
    config = SimConfig.build(
        n_annotators=11,
        n_clips=400,
        prevalence=0.3,
        sensitivity=sens,
        specificity=spec,
        seed=7,
    )
    return simulate(config)


@pytest.fixture(scope="session")
def sim_corpus_recovery():
    """The fixed-seed recovery setup: M=11, N=2000, 0.85/0.85 at p*=0.3."""
    config = SimConfig.build(
        n_annotators=11,
        n_clips=2000,
        prevalence=0.3,
        sensitivity=0.85,
        specificity=0.85,
        seed=42,
    )
    return simulate(config)
