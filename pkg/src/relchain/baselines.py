"""Reference predictors for the held-out-relation task.

Four comparison systems: uniform random draws, the training-set class prior,
a per-context conditional model that sums log probabilities over the input
slots, and a random forest over the flattened numeric encoding (see
``forest``).  Ties always break toward the smaller class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dataset import ClozeExample


def predict_random(vocab: Sequence[str], seed: int, n: int) -> list[str]:
    """n independent uniform draws from the relation vocabulary."""
    if not vocab:
        raise ValueError("empty relation vocabulary")
    rng = np.random.default_rng(seed)
    return [vocab[i] for i in rng.integers(0, len(vocab), size=n)]


# -- class-prior model -------------------------------------------------------


@dataclass
class UnigramModel:
    vocab: list[str]
    counts: dict[str, int]
    total: int

    def prob(self, relation: str) -> float:
        # add-one smoothing over the full vocabulary
        return (self.counts.get(relation, 0) + 1) / (self.total + len(self.vocab))


def train_unigram(train: Sequence[ClozeExample], vocab: Sequence[str]) -> UnigramModel:
    if not train:
        raise ValueError("empty training set")
    counts: dict[str, int] = {}
    for ex in train:
        counts[ex.target] = counts.get(ex.target, 0) + 1
    return UnigramModel(vocab=list(vocab), counts=counts, total=len(train))


def predict_unigram(model: UnigramModel) -> str:
    best = max(
        range(len(model.vocab)),
        key=lambda i: (model.counts.get(model.vocab[i], 0), -i),
    )
    return model.vocab[best]


# -- per-context conditional model --------------------------------------------


@dataclass
class SingleModel:
    """Conditional relation probabilities given individual context tokens.

    P(r | a) = (count(a, r) + 1) / (count(a) + |vocab|); contexts are the
    input slot tokens (entities, intermediates and revealed relations).
    """

    vocab: list[str]
    pair_counts: dict[tuple[str, str], int] = field(default_factory=dict)
    context_counts: dict[str, int] = field(default_factory=dict)

    def prob(self, relation: str, context: str) -> float:
        num = self.pair_counts.get((context, relation), 0) + 1
        den = self.context_counts.get(context, 0) + len(self.vocab)
        return num / den


def train_single(train: Sequence[ClozeExample], vocab: Sequence[str]) -> SingleModel:
    if not train:
        raise ValueError("empty training set")
    model = SingleModel(vocab=list(vocab))
    for ex in train:
        for slot in ex.input_slots():
            token = slot.token
            model.context_counts[token] = model.context_counts.get(token, 0) + 1
            key = (token, ex.target)
            model.pair_counts[key] = model.pair_counts.get(key, 0) + 1
    return model


def score_single(model: SingleModel, example: ClozeExample) -> np.ndarray:
    """Per-relation scores: the sum of log P(r | a) over the input slots."""
    contexts = [slot.token for slot in example.input_slots()]
    if not contexts:
        raise ValueError("example has no populated input slots")
    scores = np.zeros(len(model.vocab), dtype=np.float64)
    for i, relation in enumerate(model.vocab):
        scores[i] = sum(math.log(model.prob(relation, a)) for a in contexts)
    return scores


def predict_single(model: SingleModel, example: ClozeExample) -> str:
    return model.vocab[int(np.argmax(score_single(model, example)))]


# -- serialization ------------------------------------------------------------


def unigram_to_dict(model: UnigramModel) -> dict:
    return {
        "kind": "unigram",
        "vocab": model.vocab,
        "counts": dict(sorted(model.counts.items())),
        "total": model.total,
    }


def unigram_from_dict(data: dict) -> UnigramModel:
    return UnigramModel(
        vocab=list(data["vocab"]),
        counts={k: int(v) for k, v in data["counts"].items()},
        total=int(data["total"]),
    )


def single_to_dict(model: SingleModel) -> dict:
    return {
        "kind": "single",
        "vocab": model.vocab,
        "pair_counts": [[a, r, c] for (a, r), c in sorted(model.pair_counts.items())],
        "context_counts": dict(sorted(model.context_counts.items())),
    }


def single_from_dict(data: dict) -> SingleModel:
    return SingleModel(
        vocab=list(data["vocab"]),
        pair_counts={(a, r): int(c) for a, r, c in data["pair_counts"]},
        context_counts={k: int(v) for k, v in data["context_counts"].items()},
    )
