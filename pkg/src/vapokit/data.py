"""Sample records, hypothesis records, and line-delimited I/O."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ToolkitError
from .metrics import _find_exact_span
from .textnorm import mode_for_lang, normalize_tokenize


@dataclass
class Sample:
    """One slide-ASR instance.

    ``audio_ref`` and ``slide_image_ref`` are opaque references; nothing in
    this toolkit reads audio or raster images.
    """

    id: str
    domain: str
    lang: str  # "en" | "zh"
    slide_text: str
    transcript_gt: str
    entities: list[str] = field(default_factory=list)
    audio_ref: str = ""
    slide_image_ref: str | None = None
    duration_s: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["slide_image_ref"] is None:
            d.pop("slide_image_ref")
        if d["duration_s"] is None:
            d.pop("duration_s")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Sample":
        return cls(
            id=str(d["id"]),
            domain=d.get("domain", ""),
            lang=d.get("lang", "en"),
            slide_text=d.get("slide_text", ""),
            transcript_gt=d.get("transcript_gt", ""),
            entities=list(d.get("entities", [])),
            audio_ref=d.get("audio_ref", ""),
            slide_image_ref=d.get("slide_image_ref"),
            duration_s=d.get("duration_s"),
        )


@dataclass
class Hypothesis:
    """A model output paired to a sample by id."""

    id: str
    text: str

    @classmethod
    def from_dict(cls, d: dict) -> "Hypothesis":
        for key in ("text", "output", "hypothesis"):
            if key in d:
                return cls(id=str(d["id"]), text=str(d[key]))
        raise ToolkitError("bad-record", f"hypothesis record without text field: {sorted(d)}")


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError as e:
                    raise ToolkitError("manifest-parse", f"{path}:{lineno}: {e}") from e
    except OSError as e:
        raise ToolkitError("manifest-parse", f"cannot read {path}: {e}") from e
    return rows


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False))
            f.write("\n")


def read_samples(path: str | Path) -> list[Sample]:
    return [Sample.from_dict(d) for d in read_jsonl(path)]


def read_hypotheses(path: str | Path) -> list[Hypothesis]:
    return [Hypothesis.from_dict(d) for d in read_jsonl(path)]


def builtin_path(name: str) -> Path:
    """Resolve a `builtin:<name>` data reference to the packaged file."""
    ref = resources.files("vapokit").joinpath("data", name)
    return Path(str(ref))


def resolve_data_path(path: str) -> Path:
    if path.startswith("builtin:"):
        return builtin_path(path.split(":", 1)[1])
    return Path(path)


def pair_by_id(
    samples: Sequence[Sample],
    hypotheses: Sequence[Hypothesis],
    allow_partial: bool = False,
) -> list[tuple[Sample, Hypothesis]]:
    """Pair samples with hypotheses by id, sorted by id.

    Unpaired ids raise a "pairing" error (with both missing lists in the
    message) unless allow_partial, in which case the intersection is scored.
    """
    by_id = {h.id: h for h in hypotheses}
    sample_ids = {s.id for s in samples}
    missing_hyp = sorted(sample_ids - set(by_id))
    missing_sample = sorted(set(by_id) - sample_ids)
    if (missing_hyp or missing_sample) and not allow_partial:
        raise ToolkitError(
            "pairing",
            json.dumps({"missing_in_hyp": missing_hyp, "missing_in_dataset": missing_sample}),
        )
    pairs = [(s, by_id[s.id]) for s in samples if s.id in by_id]
    if not pairs:
        raise ToolkitError("pairing", "no overlapping ids between dataset and hypotheses")
    pairs.sort(key=lambda p: p[0].id)
    return pairs


def validate_sample(sample: Sample) -> list[dict]:
    """Check record-level invariants; returns violation records (empty = ok)."""
    violations = []
    mode = mode_for_lang(sample.lang)
    transcript = normalize_tokenize(sample.transcript_gt, mode).tokens
    slide = normalize_tokenize(sample.slide_text, mode).tokens if sample.slide_text else ()
    if not sample.id:
        violations.append({"id": sample.id, "code": "missing-id", "detail": "empty id"})
    if not transcript:
        violations.append({"id": sample.id, "code": "empty-transcript", "detail": "no transcript tokens"})
    if not sample.entities and sample.domain != "general":
        violations.append(
            {"id": sample.id, "code": "no-entities", "detail": f"domain {sample.domain!r} requires entities"}
        )
    for surface in sample.entities:
        needle = normalize_tokenize(surface, mode).tokens
        if not needle:
            violations.append({"id": sample.id, "code": "empty-entity", "detail": repr(surface)})
            continue
        if _find_exact_span(needle, transcript) < 0:
            violations.append(
                {"id": sample.id, "code": "entity-not-in-transcript", "detail": surface}
            )
        if slide and _find_exact_span(needle, slide) < 0:
            violations.append({"id": sample.id, "code": "entity-not-in-slide", "detail": surface})
    return violations
