"""Desk-scale group-relative policy optimization over a finite behavior grid.

Instead of a language model, the policy is a 54-way categorical over
behavior tuples (format ok? x OCR grade x ASR grade x anchoring grade, grades
in {0, 0.5, 1}). Each sampled tuple is rendered into a concrete
<think>/<answer> string by deterministic corruption operators, scored with
the real reward engine, and the policy logits are updated with a
likelihood-ratio gradient using the within-group normalized advantage as the
baseline.

Desk-scale deviations from full-size GRPO, all deliberate: no KL penalty, no
ratio clipping, and the scoring groups are dealt from shuffled
without-replacement cycles over the grid rather than drawn from the trained
policy. The last one matters: with 54 arms, 8 draws per group, and
std-normalized advantages, sampling from the policy itself collapses onto
whichever high-reward tuple leads early (zero-variance groups then freeze
it), and independent uniform draws leave appearance-count noise large enough
to scramble the top of the ranking. Balanced exploration gives every tuple
the same appearance count, so each logit drifts at a rate ordered by its true
reward and the optimum wins deterministically. Policy-driven sampling remains
available via ``SimConfig.exploration = "policy"``.

The corruption operators are built so each grade maps monotonically onto its
reward component (substituting k of n tokens with unique garbage gives edit
distance exactly k). Corruption is entity-first: a degraded OCR or ASR grade
also wipes out the entity anchors, so every single-grade downgrade costs
clearly more than its own component and the all-ones tuple is the unique
optimum under positive weights.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import Sample, read_samples, resolve_data_path
from .errors import ToolkitError
from .rewards import RewardBreakdown, RewardWeights, total_reward
from .textnorm import mode_for_lang, normalize_tokenize

GRADES = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class BehaviorTuple:
    format_ok: bool
    ocr_level: float
    asr_level: float
    anchor_level: float


ALL_TUPLES: tuple[BehaviorTuple, ...] = tuple(
    BehaviorTuple(f, o, a, v)
    for f, o, a, v in itertools.product((False, True), GRADES, GRADES, GRADES)
)
NUM_TUPLES = len(ALL_TUPLES)  # 54
OPTIMAL_TUPLE = BehaviorTuple(True, 1.0, 1.0, 1.0)
OPTIMAL_INDEX = ALL_TUPLES.index(OPTIMAL_TUPLE)

_OCR_GRADE = np.array([t.ocr_level for t in ALL_TUPLES])
_ASR_GRADE = np.array([t.asr_level for t in ALL_TUPLES])
_ANCHOR_GRADE = np.array([t.anchor_level for t in ALL_TUPLES])
_FORMAT_GRADE = np.array([float(t.format_ok) for t in ALL_TUPLES])


class ToyPolicy:
    """Categorical policy over the behavior grid, parameterized by logits."""

    def __init__(self, logits: np.ndarray | None = None):
        if logits is None:
            logits = np.zeros(NUM_TUPLES)
        self.logits = np.asarray(logits, dtype=float)
        if self.logits.shape != (NUM_TUPLES,):
            raise ToolkitError("bad-config", f"policy needs {NUM_TUPLES} logits")

    def probs(self) -> np.ndarray:
        z = self.logits - self.logits.max()
        e = np.exp(z)
        return e / e.sum()


# ---------------------------------------------------------------------------
# rendering behavior tuples into concrete rollouts


def _garbage(i: int) -> str:
    # Reserved shape: survives normalization, never resembles fixture entities.
    return f"xq{i}z"


def _entity_spans(tokens: tuple[str, ...], entity_token_lists: list[tuple[str, ...]]):
    """All occurrences of each entity span; returns (covered positions, spans per entity)."""
    covered: set[int] = set()
    spans: list[list[tuple[int, int]]] = []
    for needle in entity_token_lists:
        k = len(needle)
        mine = []
        i = 0
        while k and i <= len(tokens) - k:
            if tokens[i : i + k] == needle:
                mine.append((i, i + k))
                covered.update(range(i, i + k))
                i += k
            else:
                i += 1
        spans.append(mine)
    return covered, spans


def _substitute(tokens: list[str], positions: Sequence[int]) -> None:
    for p in positions:
        tokens[p] = _garbage(p)


def render(tup: BehaviorTuple, sample: Sample, rng: np.random.Generator) -> str:
    """Render a behavior tuple into a rollout string for ``sample``.

    - ocr_level: 1 - (fraction of slide tokens corrupted in the think block);
      corruption hits entity tokens first, so a degraded think also loses its
      anchors
    - asr_level: 1 - (fraction of transcript tokens corrupted in the answer),
      again entity-first; tokens already corrupted by the anchoring grade
      count toward the fraction
    - anchor_level: fraction of entities reproduced intact in the answer (the
      trailing ones are corrupted in every occurrence, list order)
    - format_ok=False drops the closing answer tag

    Corrupted tokens are unique garbage, so error counts (and the resulting
    rewards) depend only on the grades, not on which positions the rng picks.
    """
    mode = mode_for_lang(sample.lang)
    slide = list(normalize_tokenize(sample.slide_text, mode).tokens)
    transcript = list(normalize_tokenize(sample.transcript_gt, mode).tokens)
    entity_tokens = [normalize_tokenize(e, mode).tokens for e in sample.entities]
    entity_tokens = [e for e in entity_tokens if e]
    if len(entity_tokens) < 2 or len(transcript) < 8:
        raise ToolkitError(
            "sample-too-small",
            f"sample {sample.id}: need >= 2 entities and >= 8 transcript tokens",
        )

    # think block: corrupt ceil(n * (1 - grade)) slide tokens, entity-first
    think = list(slide)
    if slide:
        k_ocr = math.ceil(len(slide) * (1.0 - tup.ocr_level))
        ent_pos, _ = _entity_spans(tuple(slide), entity_tokens)
        plain = [i for i in range(len(slide)) if i not in ent_pos]
        order = sorted(ent_pos) + [plain[i] for i in rng.permutation(len(plain))]
        _substitute(think, order[:k_ocr])

    # answer block: the anchoring grade corrupts trailing entities in every
    # occurrence; the ASR grade then tops corruption up to its token fraction,
    # remaining entity tokens first
    answer = list(transcript)
    ent_pos_tr, spans_tr = _entity_spans(tuple(transcript), entity_tokens)
    n_ent = len(entity_tokens)
    n_keep = int(n_ent * tup.anchor_level + 0.5)
    anchored_out: set[int] = set()
    for spans in spans_tr[n_keep:]:
        for start, stop in spans:
            anchored_out.update(range(start, stop))
    _substitute(answer, sorted(anchored_out))
    k_asr = math.ceil(len(transcript) * (1.0 - tup.asr_level))
    extra = k_asr - len(anchored_out)
    if extra > 0:
        remaining_ent = sorted(ent_pos_tr - anchored_out)
        plain_tr = [i for i in range(len(transcript)) if i not in ent_pos_tr]
        order = remaining_ent + [plain_tr[i] for i in rng.permutation(len(plain_tr))]
        _substitute(answer, order[:extra])

    closing = "</answer>" if tup.format_ok else ""
    return f"<think>{' '.join(think)}</think><answer>{' '.join(answer)}{closing}"


# ---------------------------------------------------------------------------
# group-relative advantages and the policy update

_STD_FLOOR = 1e-8


def group_advantages(rewards: Sequence[float]) -> np.ndarray:
    """(r - mean) / population std; all zeros when the group is flat."""
    r = np.asarray(rewards, dtype=float)
    if r.size < 2:
        raise ToolkitError("degenerate-group", "need at least 2 rollouts per group")
    std = r.std()
    if std < _STD_FLOOR:
        return np.zeros_like(r)
    return (r - r.mean()) / std


def surrogate_objective(logits: np.ndarray, indices: Sequence[int], advantages: Sequence[float]) -> float:
    """Sum_i a_i * log pi(k_i) with advantages treated as constants."""
    z = logits - logits.max()
    logp = z - math.log(np.exp(z).sum())
    return float(sum(a * logp[k] for k, a in zip(indices, advantages)))


def surrogate_gradient(logits: np.ndarray, indices: Sequence[int], advantages: Sequence[float]) -> np.ndarray:
    adv = np.asarray(advantages, dtype=float)
    z = logits - logits.max()
    e = np.exp(z)
    probs = e / e.sum()
    grad = np.zeros_like(logits)
    np.add.at(grad, np.asarray(indices, dtype=int), adv)
    grad -= probs * adv.sum()
    return grad


@dataclass
class GroupRollout:
    indices: list[int]
    tuples: list[BehaviorTuple]
    rendered: list[str]
    breakdowns: list[RewardBreakdown]
    rewards: np.ndarray
    advantages: np.ndarray


def policy_step(policy: ToyPolicy, rollout: GroupRollout, lr: float) -> ToyPolicy:
    """One likelihood-ratio ascent step on the group."""
    if lr <= 0:
        raise ToolkitError("bad-config", "lr must be > 0")
    grad = surrogate_gradient(policy.logits, rollout.indices, rollout.advantages)
    if not np.all(np.isfinite(grad)):
        raise ToolkitError("numerical", "non-finite policy gradient")
    return ToyPolicy(policy.logits + lr * grad)


# ---------------------------------------------------------------------------
# training loop


@dataclass
class SimConfig:
    steps: int = 2000
    group_size: int = 8
    lr: float = 0.1
    seed: int = 0
    weights: RewardWeights = field(default_factory=RewardWeights)
    samples: list[Sample] = field(default_factory=list)
    samples_ref: str = "builtin:grpo_samples.jsonl"
    exploration: str = "uniform"  # "uniform" | "policy"

    @classmethod
    def from_file(cls, path: str | Path) -> "SimConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ToolkitError("bad-config", f"cannot load config {path}: {e}") from e
        weights = RewardWeights.from_mapping(raw.get("weights", {}))
        samples_ref = raw.get("samples", "builtin:grpo_samples.jsonl")
        samples = read_samples(resolve_data_path(samples_ref))
        exploration = raw.get("exploration", "uniform")
        if exploration not in ("uniform", "policy"):
            raise ToolkitError("bad-config", f"unknown exploration mode: {exploration!r}")
        return cls(
            steps=int(raw.get("steps", 2000)),
            group_size=int(raw.get("group_size", 8)),
            lr=float(raw.get("lr", 0.1)),
            seed=int(raw.get("seed", 0)),
            weights=weights,
            samples=samples,
            samples_ref=samples_ref,
            exploration=exploration,
        )

    def snapshot(self) -> dict:
        return {
            "steps": self.steps,
            "group_size": self.group_size,
            "lr": self.lr,
            "seed": self.seed,
            "weights": {
                "lambda_format": self.weights.lambda_format,
                "lambda_ocr": self.weights.lambda_ocr,
                "lambda_asr": self.weights.lambda_asr,
                "lambda_va": self.weights.lambda_va,
            },
            "samples": self.samples_ref,
            "exploration": self.exploration,
        }


@dataclass
class TraceStep:
    step: int
    mean_reward: float  # mean over the sampled group
    expected_reward: float  # exact expectation under the current policy
    mean_format: float
    mean_ocr: float
    mean_asr: float
    mean_va: float
    p_optimal: float

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "mean_reward": self.mean_reward,
            "expected_reward": self.expected_reward,
            "mean_format": self.mean_format,
            "mean_ocr": self.mean_ocr,
            "mean_asr": self.mean_asr,
            "mean_va": self.mean_va,
            "p_optimal": self.p_optimal,
        }


_CSV_COLUMNS = [
    "step",
    "mean_reward",
    "expected_reward",
    "mean_format",
    "mean_ocr",
    "mean_asr",
    "mean_va",
    "p_optimal",
]


@dataclass
class TrainTrace:
    steps: list[TraceStep]
    seed: int
    config: dict
    final_policy: ToyPolicy

    @property
    def final(self) -> TraceStep:
        return self.steps[-1]

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps({"record": "config", "seed": self.seed, "config": self.config}))
            f.write("\n")
            for step in self.steps:
                f.write(json.dumps({"record": "step", **step.as_dict()}))
                f.write("\n")

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=_CSV_COLUMNS)
            writer.writeheader()
            for step in self.steps:
                writer.writerow(step.as_dict())


def expected_grades(policy: ToyPolicy) -> dict[str, float]:
    """Policy-expected grade per behavior axis plus mass on the optimum."""
    p = policy.probs()
    return {
        "format_rate": float(p @ _FORMAT_GRADE),
        "ocr_level": float(p @ _OCR_GRADE),
        "asr_level": float(p @ _ASR_GRADE),
        "anchor_level": float(p @ _ANCHOR_GRADE),
        "p_optimal": float(p[OPTIMAL_INDEX]),
    }


def default_samples() -> list[Sample]:
    return read_samples(resolve_data_path("builtin:grpo_samples.jsonl"))


class _BalancedDealer:
    """Deals tuple indices from rng-shuffled without-replacement cycles."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.deck: list[int] = []

    def deal(self, n: int) -> list[int]:
        out: list[int] = []
        while len(out) < n:
            if not self.deck:
                self.deck = [int(k) for k in self.rng.permutation(NUM_TUPLES)]
            take = min(n - len(out), len(self.deck))
            out.extend(self.deck[:take])
            del self.deck[:take]
        return out


def reward_matrix(samples: Sequence[Sample], weights: RewardWeights, seed: int = 0) -> np.ndarray:
    """Total reward for every (sample, behavior tuple) pair.

    Grades fully determine the totals (corruption counts, not positions), so
    one rendering per pair is exact.
    """
    rng = np.random.default_rng([seed, NUM_TUPLES])
    matrix = np.zeros((len(samples), NUM_TUPLES))
    for si, sample in enumerate(samples):
        for k, tup in enumerate(ALL_TUPLES):
            matrix[si, k] = total_reward(sample, render(tup, sample, rng), weights).total
    return matrix


def train(config: SimConfig) -> TrainTrace:
    """Run the sampling -> render -> score -> update loop; reproducible from seed."""
    if config.steps < 1 or config.group_size < 2:
        raise ToolkitError("bad-config", "need steps >= 1 and group_size >= 2")
    if config.lr <= 0:
        raise ToolkitError("bad-config", "lr must be > 0")
    samples = config.samples or default_samples()
    rewards_by_tuple = reward_matrix(samples, config.weights, config.seed)
    rng = np.random.default_rng(config.seed)
    dealer = _BalancedDealer(rng)
    policy = ToyPolicy()
    trace: list[TraceStep] = []
    # Rendered rollouts repeat; rewards are deterministic per (sample,
    # rendered string), so memoize the scoring.
    cache: dict[tuple[int, str], RewardBreakdown] = {}
    for step in range(config.steps):
        si = int(rng.integers(len(samples)))
        sample = samples[si]
        if config.exploration == "policy":
            indices = [int(k) for k in rng.choice(NUM_TUPLES, size=config.group_size, p=policy.probs())]
        else:
            indices = dealer.deal(config.group_size)
        tuples = [ALL_TUPLES[k] for k in indices]
        rendered = [render(t, sample, rng) for t in tuples]
        breakdowns = []
        for text in rendered:
            key = (si, text)
            found = cache.get(key)
            if found is None:
                found = total_reward(sample, text, config.weights)
                cache[key] = found
            breakdowns.append(found)
        rewards = np.array([b.total for b in breakdowns])
        advantages = group_advantages(rewards)
        rollout = GroupRollout(indices, tuples, rendered, breakdowns, rewards, advantages)
        policy = policy_step(policy, rollout, config.lr)
        probs = policy.probs()
        trace.append(
            TraceStep(
                step=step,
                mean_reward=float(rewards.mean()),
                expected_reward=float(probs @ rewards_by_tuple[si]),
                mean_format=float(np.mean([b.r_format for b in breakdowns])),
                mean_ocr=float(np.mean([b.r_ocr for b in breakdowns])),
                mean_asr=float(np.mean([b.r_asr for b in breakdowns])),
                mean_va=float(np.mean([b.r_va for b in breakdowns])),
                p_optimal=float(probs[OPTIMAL_INDEX]),
            )
        )
    return TrainTrace(steps=trace, seed=config.seed, config=config.snapshot(), final_policy=policy)
