from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from vapokit.data import Sample
from vapokit.grpo import SimConfig, default_samples, train
from vapokit.rewards import RewardWeights


@pytest.fixture(scope="session")
def fixture_samples() -> list[Sample]:
    return default_samples()


def _sweep(samples, weights):
    runs = []
    for seed in range(5):
        start = time.perf_counter()
        trace = train(SimConfig(seed=seed, samples=samples, weights=weights))
        runs.append((trace, time.perf_counter() - start))
    return runs


@pytest.fixture(scope="session")
def balanced_runs(fixture_samples):
    """(trace, elapsed_s) for seeds 0..4 with weights 1:1:1:1."""
    return _sweep(fixture_samples, RewardWeights())


@pytest.fixture(scope="session")
def va_doubled_runs(fixture_samples):
    return _sweep(fixture_samples, RewardWeights(lambda_va=2.0))


@pytest.fixture(scope="session")
def asr_doubled_runs(fixture_samples):
    return _sweep(fixture_samples, RewardWeights(lambda_asr=2.0))


@pytest.fixture
def sample_en() -> Sample:
    return Sample(
        id="s1",
        domain="medicine",
        lang="en",
        slide_text="Medicine Overview\nKey topics include aspirin and ibuprofen for pain management today.",
        transcript_gt="today we discuss aspirin and ibuprofen for routine pain management in clinics",
        entities=["aspirin", "ibuprofen"],
        audio_ref="audio/s1.wav",
    )
