#!/usr/bin/env python3
"""Score a few rollout styles and compare their reward breakdowns.

The reward has four parts: format compliance, OCR fidelity of the think
block, ASR fidelity of the answer, and an F1 that ties entities recognized in
the think block to entities used in the answer.
"""

from vapokit import RewardWeights, Sample, total_reward
from vapokit.structured import serialize_structured

sample = Sample(
    id="demo",
    domain="biology",
    lang="en",
    slide_text="Gene Editing\nKey topics include crispr and plasmid delivery in the lab.",
    transcript_gt="we explain how crispr uses a plasmid vector in everyday lab work",
    entities=["crispr", "plasmid"],
    audio_ref="audio/demo.wav",
)

rollouts = {
    "ideal: reads slide, then transcribes": serialize_structured(
        sample.slide_text, sample.transcript_gt
    ),
    "slide copier: answer repeats the slide": serialize_structured(
        sample.slide_text, sample.slide_text
    ),
    "deaf to slides: empty think block": serialize_structured("", sample.transcript_gt),
    "format violation: missing closing tag": "<think>gene editing<answer>we explain",
    "misses one entity in the answer": serialize_structured(
        sample.slide_text, "we explain how crispr uses a vector in everyday lab work"
    ),
}

weights = RewardWeights()  # 1:1:1:1
print(f"{'rollout':42s} {'fmt':>4} {'ocr':>6} {'asr':>6} {'va':>6} {'total':>6}")
for label, raw in rollouts.items():
    b = total_reward(sample, raw, weights)
    print(f"{label:42s} {b.r_format:4d} {b.r_ocr:6.3f} {b.r_asr:6.3f} {b.r_va:6.3f} {b.total:6.3f}")

print("\nnote how the slide copier keeps a high OCR reward but loses ASR reward,")
print("while the contextless transcriber loses both OCR and anchoring reward.")
