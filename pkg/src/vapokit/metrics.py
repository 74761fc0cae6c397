"""Edit-distance alignment and the error-rate metric family.

Covers plain WER, the keyword-partitioned B-WER/U-WER pair with keyword
recall, and the entity metrics NE-WER / NE-FNR built on fuzzy entity
matching. All functions are pure; metrics whose reference set is empty are
reported as absent (None), never as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ToolkitError
from .textnorm import LangMode, TokenSeq, mode_for_lang, normalize_tokenize

Op = tuple[str, int | None, int | None]  # ("hit"|"sub"|"del"|"ins", ref_i, hyp_i)


def _tokens(seq) -> tuple[str, ...]:
    if isinstance(seq, TokenSeq):
        return seq.tokens
    return tuple(seq)


def token_edit_distance(reference: Sequence[str], hypothesis: Sequence[str]) -> int:
    """Levenshtein distance between token sequences (unit costs)."""
    a = _tokens(reference)
    b = _tokens(hypothesis)
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        cur = [i]
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def char_edit_distance(a: str, b: str) -> int:
    return token_edit_distance(tuple(a), tuple(b))


@dataclass(frozen=True)
class Alignment:
    """Minimum-cost token alignment with per-op trace.

    Satisfies hits + substitutions + deletions == len(reference) and
    hits + substitutions + insertions == len(hypothesis).
    """

    substitutions: int
    deletions: int
    insertions: int
    hits: int
    ops: tuple[Op, ...]

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def align(reference, hypothesis) -> Alignment:
    """Minimum-cost alignment under unit costs with a deterministic trace.

    Tie-break during traceback: hit/substitution (diagonal) first, then
    deletion (consumes the reference token), then insertion.
    """
    ref = _tokens(reference)
    hyp = _tokens(hypothesis)
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row = d[i]
        prev = d[i - 1]
        rtok = ref[i - 1]
        for j in range(1, m + 1):
            cost = 0 if rtok == hyp[j - 1] else 1
            row[j] = min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + cost)

    ops: list[Op] = []
    i, j = n, m
    subs = dels = ins = hits = 0
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            diag = d[i - 1][j - 1]
            if ref[i - 1] == hyp[j - 1] and d[i][j] == diag:
                ops.append(("hit", i - 1, j - 1))
                hits += 1
                i -= 1
                j -= 1
                continue
            if d[i][j] == diag + 1:
                ops.append(("sub", i - 1, j - 1))
                subs += 1
                i -= 1
                j -= 1
                continue
        if i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops.append(("del", i - 1, None))
            dels += 1
            i -= 1
            continue
        ops.append(("ins", None, j - 1))
        ins += 1
        j -= 1
    ops.reverse()
    return Alignment(subs, dels, ins, hits, tuple(ops))


def wer(reference, hypothesis) -> float:
    """(S + D + I) / len(reference). May exceed 1."""
    ref = _tokens(reference)
    if not ref:
        raise ToolkitError("undefined-wer", "WER needs a nonempty reference")
    return token_edit_distance(ref, _tokens(hypothesis)) / len(ref)


# ---------------------------------------------------------------------------
# entity references and fuzzy matching


@dataclass(frozen=True)
class EntityRef:
    """A keyword/entity surface with its tokenization and edit budget.

    The default budget is max(0, floor(2 / token_count - 1)): one character
    edit for single-word entities, exact match for everything longer.
    """

    surface: str
    tokens: tuple[str, ...]
    token_count: int
    tolerance: int

    @classmethod
    def from_surface(cls, surface: str, lang_mode: LangMode = LangMode.MIXED) -> "EntityRef":
        tokens = normalize_tokenize(surface, lang_mode).tokens
        if not tokens:
            raise ToolkitError("empty-entity", f"entity normalizes to nothing: {surface!r}")
        k = len(tokens)
        tolerance = max(0, math.floor(2 / k - 1))
        return cls(surface=surface, tokens=tokens, token_count=k, tolerance=tolerance)


@dataclass(frozen=True)
class FuzzyMatch:
    start: int
    stop: int  # exclusive token index
    distance: int


def fuzzy_find(entity: EntityRef, text) -> FuzzyMatch | None:
    """Best window of ``text`` within the entity's edit budget, or None.

    Single-word entities are compared character-wise against single tokens;
    multi-word entities are compared token-wise against windows of length
    token_count +/- tolerance. Ties go to the leftmost (then shortest) window.
    """
    toks = _tokens(text)
    k = entity.token_count
    tol = entity.tolerance
    if not toks or k == 0:
        return None
    best: FuzzyMatch | None = None
    if k == 1:
        ent = entity.tokens[0]
        for i, tok in enumerate(toks):
            if abs(len(tok) - len(ent)) > tol:
                continue
            dist = char_edit_distance(ent, tok)
            if dist <= tol and (best is None or dist < best.distance):
                best = FuzzyMatch(i, i + 1, dist)
                if dist == 0:
                    break
        return best
    for start in range(len(toks)):
        for width in range(max(1, k - tol), k + tol + 1):
            stop = start + width
            if stop > len(toks):
                break
            dist = token_edit_distance(entity.tokens, toks[start:stop])
            if dist <= tol and (best is None or dist < best.distance):
                best = FuzzyMatch(start, stop, dist)
        if best is not None and best.distance == 0:
            break
    return best


def _find_exact_span(needle: tuple[str, ...], toks: tuple[str, ...], start: int = 0) -> int:
    k = len(needle)
    for i in range(start, len(toks) - k + 1):
        if toks[i : i + k] == needle:
            return i
    return -1


# ---------------------------------------------------------------------------
# keyword partition: B-WER / U-WER / Recall


def _keyword_spans(ref: tuple[str, ...], keywords: Sequence[EntityRef]) -> list[tuple[int, int, EntityRef]]:
    """Greedy leftmost-longest, non-overlapping keyword spans in ``ref``."""
    by_len = sorted(keywords, key=lambda e: -e.token_count)
    spans: list[tuple[int, int, EntityRef]] = []
    i = 0
    while i < len(ref):
        hit = None
        for ent in by_len:
            k = ent.token_count
            if ref[i : i + k] == ent.tokens:
                hit = ent
                break
        if hit is None:
            i += 1
        else:
            spans.append((i, i + hit.token_count, hit))
            i += hit.token_count
    return spans


def _partition_counts(reference, hypothesis, keywords: Sequence[EntityRef]):
    """(keyword_errors, keyword_tokens, other_errors, other_tokens).

    Substitutions and deletions take the label of their reference token;
    insertions take the label of the nearest preceding reference token
    (sentence-initial insertions count as non-keyword).
    """
    ref = _tokens(reference)
    is_kw = [False] * len(ref)
    for start, stop, _ in _keyword_spans(ref, keywords):
        for i in range(start, stop):
            is_kw[i] = True
    alignment = align(ref, _tokens(hypothesis))
    kw_err = other_err = 0
    last_ref = -1
    for kind, ri, _hi in alignment.ops:
        if kind == "hit":
            last_ref = ri
        elif kind in ("sub", "del"):
            if is_kw[ri]:
                kw_err += 1
            else:
                other_err += 1
            last_ref = ri
        else:  # ins
            if last_ref >= 0 and is_kw[last_ref]:
                kw_err += 1
            else:
                other_err += 1
    kw_tokens = sum(is_kw)
    return kw_err, kw_tokens, other_err, len(ref) - kw_tokens


def partitioned_wer(reference, hypothesis, keywords: Iterable[EntityRef]) -> tuple[float | None, float | None]:
    """(B-WER over keyword tokens, U-WER over the rest).

    Either side is None when its reference partition is empty.
    """
    kws = list(keywords)
    kw_err, kw_tok, other_err, other_tok = _partition_counts(reference, hypothesis, kws)
    b = kw_err / kw_tok if kw_tok else None
    u = other_err / other_tok if other_tok else None
    return b, u


def _recall_counts(reference, hypothesis, keywords: Sequence[EntityRef]) -> tuple[int, int]:
    ref = _tokens(reference)
    hyp = _tokens(hypothesis)
    occurrences: dict[tuple[str, ...], int] = {}
    for _, _, ent in _keyword_spans(ref, keywords):
        occurrences[ent.tokens] = occurrences.get(ent.tokens, 0) + 1
    recalled = 0
    total = 0
    for needle, count in occurrences.items():
        total += count
        found = 0
        pos = 0
        while found < count:
            pos = _find_exact_span(needle, hyp, pos)
            if pos < 0:
                break
            found += 1
            pos += len(needle)
        recalled += found
    return recalled, total


def keyword_recall(reference, hypothesis, keywords: Iterable[EntityRef]) -> float | None:
    """Fraction of keyword occurrences in the reference reproduced verbatim.

    Hypothesis occurrences are consumed: a keyword appearing twice in the
    reference needs two hypothesis occurrences for full credit. None when the
    reference contains no keyword occurrence.
    """
    kws = list(keywords)
    if not kws:
        raise ToolkitError("no-keywords", "keyword recall needs a nonempty keyword set")
    recalled, total = _recall_counts(reference, hypothesis, kws)
    if total == 0:
        return None
    return recalled / total


# ---------------------------------------------------------------------------
# entity metrics: NE-WER / NE-FNR


def _ne_counts(entities: Sequence[EntityRef], hypothesis) -> tuple[int, int]:
    """(entity-span errors, entity tokens) over the entity occurrence list."""
    hyp = _tokens(hypothesis)
    errors = 0
    tokens = 0
    for ent in entities:
        tokens += ent.token_count
        match = fuzzy_find(ent, hyp)
        if match is None:
            errors += ent.token_count
        else:
            errors += token_edit_distance(ent.tokens, hyp[match.start : match.stop])
    return errors, tokens


def ne_wer(entities: Iterable[EntityRef], reference, hypothesis) -> float:
    """Token error rate restricted to entity spans.

    Each entity occurrence either contributes the edit distance of its fuzzy
    match in the hypothesis, or counts as fully deleted; the denominator is
    the total entity token count. ``reference`` is the transcript the
    occurrence list was drawn from (each entity is expected to occur in it).
    """
    ents = list(entities)
    if not ents:
        raise ToolkitError("no-entities", "NE-WER needs a nonempty entity list")
    errors, tokens = _ne_counts(ents, hypothesis)
    return errors / tokens


def ne_fnr(entities: Iterable[EntityRef], hypothesis) -> float:
    """1 - (entities fuzzily found in the hypothesis) / (all entities)."""
    ents = list(entities)
    if not ents:
        raise ToolkitError("no-entities", "NE-FNR needs a nonempty entity list")
    hyp = _tokens(hypothesis)
    found = sum(1 for e in ents if fuzzy_find(e, hyp) is not None)
    return 1.0 - found / len(ents)


# ---------------------------------------------------------------------------
# per-sample reports and corpus aggregation

ALL_METRICS = ("wer", "bwer", "uwer", "recall", "newer", "nefnr")


@dataclass
class MetricReport:
    """Metric values plus the raw tallies they were derived from.

    Absent metrics (empty reference partition, no entities) are None; the
    ``counts`` tallies are what corpus aggregation sums before re-deriving
    ratios, so aggregates are micro-averages.
    """

    wer: float | None = None
    b_wer: float | None = None
    u_wer: float | None = None
    recall: float | None = None
    ne_wer: float | None = None
    ne_fnr: float | None = None
    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "wer": self.wer,
            "b_wer": self.b_wer,
            "u_wer": self.u_wer,
            "recall": self.recall,
            "ne_wer": self.ne_wer,
            "ne_fnr": self.ne_fnr,
        }


def sample_report(
    sample,
    hypothesis_text: str,
    lang: str | None = None,
    metrics: Sequence[str] = ALL_METRICS,
) -> MetricReport:
    """Score one hypothesis against one Sample.

    ``lang`` overrides the sample's language label; the sample's entity list
    doubles as the keyword list for the partitioned metrics.
    """
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown:
        raise ToolkitError("unknown-metric", f"unknown metrics: {sorted(unknown)}")
    mode = mode_for_lang(lang or sample.lang)
    ref = normalize_tokenize(sample.transcript_gt, mode)
    hyp = normalize_tokenize(hypothesis_text, mode)
    if not ref.tokens:
        raise ToolkitError("undefined-wer", f"sample {sample.id}: empty reference transcript")
    ents = [EntityRef.from_surface(e, mode) for e in sample.entities]

    report = MetricReport()
    if "wer" in metrics:
        a = align(ref, hyp)
        report.wer = a.errors / len(ref.tokens)
        report.counts["wer"] = {
            "sub": a.substitutions,
            "del": a.deletions,
            "ins": a.insertions,
            "hits": a.hits,
            "ref": len(ref.tokens),
        }
    if "bwer" in metrics or "uwer" in metrics:
        kw_err, kw_tok, other_err, other_tok = _partition_counts(ref, hyp, ents)
        if "bwer" in metrics:
            report.b_wer = kw_err / kw_tok if kw_tok else None
            report.counts["bwer"] = {"errors": kw_err, "ref": kw_tok}
        if "uwer" in metrics:
            report.u_wer = other_err / other_tok if other_tok else None
            report.counts["uwer"] = {"errors": other_err, "ref": other_tok}
    if "recall" in metrics:
        recalled, total = _recall_counts(ref, hyp, ents) if ents else (0, 0)
        report.recall = recalled / total if total else None
        report.counts["recall"] = {"recalled": recalled, "occurrences": total}
    if "newer" in metrics:
        errors, tokens = _ne_counts(ents, hyp) if ents else (0, 0)
        report.ne_wer = errors / tokens if tokens else None
        report.counts["newer"] = {"errors": errors, "tokens": tokens}
    if "nefnr" in metrics:
        found = sum(1 for e in ents if fuzzy_find(e, hyp) is not None)
        report.ne_fnr = 1.0 - found / len(ents) if ents else None
        report.counts["nefnr"] = {"found": found, "total": len(ents)}
    return report


def aggregate_reports(reports: Sequence[MetricReport]) -> MetricReport:
    """Micro-average: pool raw tallies across samples, then divide."""
    sums: dict[str, dict[str, int]] = {}
    for rep in reports:
        for key, tallies in rep.counts.items():
            bucket = sums.setdefault(key, {})
            for name, value in tallies.items():
                bucket[name] = bucket.get(name, 0) + value
    agg = MetricReport(counts=sums)
    if "wer" in sums:
        c = sums["wer"]
        errors = c["sub"] + c["del"] + c["ins"]
        agg.wer = errors / c["ref"] if c["ref"] else None
    if "bwer" in sums:
        c = sums["bwer"]
        agg.b_wer = c["errors"] / c["ref"] if c["ref"] else None
    if "uwer" in sums:
        c = sums["uwer"]
        agg.u_wer = c["errors"] / c["ref"] if c["ref"] else None
    if "recall" in sums:
        c = sums["recall"]
        agg.recall = c["recalled"] / c["occurrences"] if c["occurrences"] else None
    if "newer" in sums:
        c = sums["newer"]
        agg.ne_wer = c["errors"] / c["tokens"] if c["tokens"] else None
    if "nefnr" in sums:
        c = sums["nefnr"]
        agg.ne_fnr = 1.0 - c["found"] / c["total"] if c["total"] else None
    return agg
