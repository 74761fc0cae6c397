"""Independent oracles used by the tests.

Everything here is deliberately written without reusing the library's
implementations: recursive edit distance (memoized over the decision space),
literal enumeration of every alignment path for small inputs, and a
regex-based recognizer for the rollout grammar.
"""

from __future__ import annotations

import random
import re
from functools import lru_cache


def levenshtein_recursive(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Minimum alignment cost by exploring every decision, memoized."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        best = go(i + 1, j + 1) + (0 if a[i] == b[j] else 1)
        best = min(best, go(i + 1, j) + 1)  # delete a[i]
        best = min(best, go(i, j + 1) + 1)  # insert b[j]
        return best

    return go(0, 0)


def enumerate_alignments_min(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Cost of the best alignment by walking every path (no memoization).

    Exponential; only for short sequences.
    """
    best = [len(a) + len(b)]

    def walk(i: int, j: int, cost: int) -> None:
        if cost >= best[0]:
            return
        if i == len(a) and j == len(b):
            best[0] = cost
            return
        if i < len(a) and j < len(b):
            walk(i + 1, j + 1, cost + (0 if a[i] == b[j] else 1))
        if i < len(a):
            walk(i + 1, j, cost + 1)
        if j < len(b):
            walk(i, j + 1, cost + 1)

    walk(0, 0, 0)
    return best[0]


def char_distance(a: str, b: str) -> int:
    return levenshtein_recursive(tuple(a), tuple(b))


# Reference recognizer for the rollout grammar: one think block, one answer
# block, properly nested and ordered, nothing but whitespace outside, no tag
# literal inside a block.
_REFERENCE_RE = re.compile(
    r"\s*<think>((?:(?!</?think>|</?answer>).)*)</think>"
    r"\s*<answer>((?:(?!</?think>|</?answer>).)*)</answer>\s*\Z",
    re.DOTALL,
)


def reference_well_formed(raw: str) -> bool:
    return _REFERENCE_RE.match(raw) is not None


_TAG_PIECES = [
    "<think>",
    "</think>",
    "<answer>",
    "</answer>",
    "<think",
    "think>",
    "< think>",
    "<Think>",
    "</ answer>",
    "",
    " ",
    "\n",
    "\t",
    "hello",
    "slide text",
    "你好",
    "a b c",
    "<",
    ">",
    "/",
]


def tag_soup(rng: random.Random) -> str:
    """Random concatenations of tag fragments; sometimes near-canonical."""
    roll = rng.random()
    if roll < 0.25:
        think = " ".join(rng.choices(_TAG_PIECES, k=rng.randint(0, 3)))
        answer = " ".join(rng.choices(_TAG_PIECES, k=rng.randint(0, 3)))
        lead = rng.choice(["", " ", "\n", "x"])
        mid = rng.choice(["", " ", "\n", "junk"])
        tail = rng.choice(["", " ", "\n", "y"])
        return f"{lead}<think>{think}</think>{mid}<answer>{answer}</answer>{tail}"
    count = rng.randint(0, 8)
    return "".join(rng.choice(_TAG_PIECES) for _ in range(count))


_WORDS = ["alpha", "beta", "gamma", "delta", "slide", "talk", "你", "好", "x", "qq"]


def rollout_soup(rng: random.Random) -> str:
    """Arbitrary rollout strings: raw noise, tag soup, or well-formed text."""
    roll = rng.random()
    if roll < 0.5:
        alphabet = "<>/thinkanswer abz你好\n\t."
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
    if roll < 0.8:
        return tag_soup(rng)
    think = " ".join(rng.choices(_WORDS, k=rng.randint(0, 12)))
    answer = " ".join(rng.choices(_WORDS, k=rng.randint(0, 12)))
    return f"<think>{think}</think><answer>{answer}</answer>"
