"""Detection of OCR behavior: outputs that leak slide-only vocabulary.

A model that transcribes speech should never produce words that appear on
the slide but not in the spoken transcript. The check builds the common
vocabulary of transcript and slide, isolates the slide-only remainder, and
flags any output intersecting it. Stopwords are not removed (slightly
over-detects); an optional minimum token length can trim noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .data import Hypothesis, Sample, pair_by_id
from .errors import ToolkitError
from .textnorm import mode_for_lang, normalize_tokenize


@dataclass(frozen=True)
class VocabPartition:
    v_common: frozenset[str]
    v_slide_only: frozenset[str]


def partition_vocab(sample: Sample, min_token_len: int = 1) -> VocabPartition:
    """Split the slide vocabulary into transcript-shared and slide-only sets."""
    mode = mode_for_lang(sample.lang)
    slide = {t for t in normalize_tokenize(sample.slide_text, mode).tokens if len(t) >= min_token_len}
    transcript = {
        t for t in normalize_tokenize(sample.transcript_gt, mode).tokens if len(t) >= min_token_len
    }
    if not slide:
        raise ToolkitError("no-slide", f"sample {sample.id}: slide text has no tokens")
    common = slide & transcript
    return VocabPartition(v_common=frozenset(common), v_slide_only=frozenset(slide - common))


def detect(output: str, partition: VocabPartition) -> bool:
    """True iff the output contains at least one slide-only word."""
    tokens = set(normalize_tokenize(output).tokens)
    return bool(tokens & partition.v_slide_only)


def detect_all(
    samples: Sequence[Sample], outputs: Sequence[Hypothesis], min_token_len: int = 1
) -> list[dict]:
    """Per-sample detection rows, paired by id and sorted by id."""
    rows = []
    for sample, hyp in pair_by_id(samples, outputs):
        partition = partition_vocab(sample, min_token_len)
        flagged = detect(hyp.text, partition)
        rows.append(
            {
                "id": sample.id,
                "ocr_behavior": flagged,
                "slide_only_vocab": len(partition.v_slide_only),
            }
        )
    return rows


def dataset_rate(
    samples: Sequence[Sample], outputs: Sequence[Hypothesis], min_token_len: int = 1
) -> float:
    """Percentage (0..100) of samples whose output exhibits OCR behavior."""
    if not samples:
        raise ToolkitError("pairing", "dataset_rate needs at least one sample")
    rows = detect_all(samples, outputs, min_token_len)
    return 100.0 * sum(r["ocr_behavior"] for r in rows) / len(rows)


def summary_row(
    samples: Sequence[Sample],
    outputs: Sequence[Hypothesis],
    name: str | None = None,
    split: str | None = None,
    min_token_len: int = 1,
) -> dict:
    """One report row: model name, split, sample count, detection percentage."""
    rows = detect_all(samples, outputs, min_token_len)
    detected = sum(r["ocr_behavior"] for r in rows)
    return {
        "name": name,
        "split": split,
        "samples": len(rows),
        "detected": detected,
        "rate_percent": 100.0 * detected / len(rows),
    }
