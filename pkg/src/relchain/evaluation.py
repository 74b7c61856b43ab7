"""Score predictors on held-out relations and report the results.

Metrics come from a gold-by-predicted confusion matrix over the full relation
vocabulary.  Macro precision/recall/F1 average the per-class values over
every vocabulary class, counting classes with an empty denominator as zero;
this keeps a constant majority-class predictor's macro precision near
(modal share / vocabulary size) rather than near its accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dataset import ClozeExample


@dataclass
class ConfusionMatrix:
    relations: list[str]
    counts: np.ndarray  # (n, n) int64, rows = gold, columns = predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index(self, name: str) -> int:
        try:
            return self.relations.index(name)
        except ValueError:
            raise ValueError(f"relation {name!r} not in vocabulary") from None


def confusion_from_labels(
    gold: Sequence[str], predicted: Sequence[str], relations: Sequence[str]
) -> ConfusionMatrix:
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted lengths differ")
    index = {name: i for i, name in enumerate(relations)}
    counts = np.zeros((len(relations), len(relations)), dtype=np.int64)
    for g, p in zip(gold, predicted):
        if g not in index:
            raise ValueError(f"gold relation {g!r} outside the vocabulary")
        if p not in index:
            raise ValueError(f"prediction {p!r} outside the vocabulary")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(relations=list(relations), counts=counts)


@dataclass
class RelationStats:
    relation: str
    gold_total: int
    correct: int
    rate: float
    top_wrong: list[tuple[str, int]] = field(default_factory=list)


@dataclass
class EvalReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    n_examples: int
    per_relation: list[RelationStats] = field(default_factory=list)


def _per_class_metrics(cm: ConfusionMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    counts = cm.counts.astype(np.float64)
    diag = np.diag(counts)
    colsum = counts.sum(axis=0)
    rowsum = counts.sum(axis=1)
    precision = np.divide(diag, colsum, out=np.zeros_like(diag), where=colsum > 0)
    recall = np.divide(diag, rowsum, out=np.zeros_like(diag), where=rowsum > 0)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros_like(diag), where=denom > 0)
    return precision, recall, f1


def report_from_matrix(cm: ConfusionMatrix, top_k: int = 3) -> EvalReport:
    total = cm.total
    if total == 0:
        raise ValueError("cannot report on an empty confusion matrix")
    precision, recall, f1 = _per_class_metrics(cm)
    accuracy = float(np.trace(cm.counts)) / total
    report = EvalReport(
        accuracy=accuracy,
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        n_examples=total,
    )
    confusions = dict(top_confusions(cm, top_k))
    for name, correct, rate in per_relation_report(cm):
        gold_total = int(cm.counts[cm.index(name)].sum())
        report.per_relation.append(
            RelationStats(
                relation=name,
                gold_total=gold_total,
                correct=correct,
                rate=rate,
                top_wrong=confusions.get(name, []),
            )
        )
    return report


def evaluate(
    predictor: Callable[[Sequence[ClozeExample]], Sequence[str]],
    test: Sequence[ClozeExample],
    relations: Sequence[str],
    top_k: int = 3,
) -> tuple[EvalReport, ConfusionMatrix]:
    """Run a batched predictor over the test set and summarize the outcome."""
    if not test:
        raise ValueError("empty test set")
    predicted = list(predictor(test))
    if len(predicted) != len(test):
        raise ValueError("predictor returned a different number of predictions")
    gold = [ex.target for ex in test]
    cm = confusion_from_labels(gold, predicted, relations)
    return report_from_matrix(cm, top_k), cm


def per_relation_report(cm: ConfusionMatrix) -> list[tuple[str, int, float]]:
    """(relation, correct count, correct rate) for each relation that occurs
    in the gold labels, in vocabulary order."""
    rows: list[tuple[str, int, float]] = []
    for i, name in enumerate(cm.relations):
        rowsum = int(cm.counts[i].sum())
        if rowsum == 0:
            continue
        correct = int(cm.counts[i, i])
        rows.append((name, correct, correct / rowsum))
    return rows


def top_confusions(cm: ConfusionMatrix, k: int = 3) -> list[tuple[str, list[tuple[str, int]]]]:
    """Per gold relation, the k most frequent wrong predictions (descending
    count, ties toward the smaller class index); zero counts are omitted."""
    rows: list[tuple[str, list[tuple[str, int]]]] = []
    for i, name in enumerate(cm.relations):
        if cm.counts[i].sum() == 0:
            continue
        wrong = [
            (j, int(c))
            for j, c in enumerate(cm.counts[i])
            if j != i and c > 0
        ]
        wrong.sort(key=lambda jc: (-jc[1], jc[0]))
        rows.append((name, [(cm.relations[j], c) for j, c in wrong[:k]]))
    return rows


# -- rendering ----------------------------------------------------------------


def render_metrics_table(rows: list[tuple[str, EvalReport]]) -> str:
    """Aligned text table: one row per method with recall, precision, F1 and
    accuracy."""
    header = ["Method", "Recall", "Precision", "F1 Score", "Accuracy"]
    lines = ["{:<14} {:>9} {:>10} {:>9} {:>9}".format(*header)]
    for name, report in rows:
        lines.append(
            "{:<14} {:>9.4f} {:>10.4f} {:>9.4f} {:>9.4f}".format(
                name,
                report.macro_recall,
                report.macro_precision,
                report.macro_f1,
                report.accuracy,
            )
        )
    return "\n".join(lines)


def render_per_relation_table(cm: ConfusionMatrix) -> str:
    lines = ["{:<28} {:>9} {:>8}".format("Relation", "Correct", "Rate")]
    for name, correct, rate in per_relation_report(cm):
        lines.append("{:<28} {:>9d} {:>8.3f}".format(name, correct, rate))
    return "\n".join(lines)


def render_confusion_table(cm: ConfusionMatrix, k: int = 3) -> str:
    lines = ["{:<28} {}".format("Relation", "Top wrong predictions")]
    for name, wrong in top_confusions(cm, k):
        rendered = ", ".join(f"{w}({c})" for w, c in wrong) or "-"
        lines.append("{:<28} {}".format(name, rendered))
    return "\n".join(lines)


def report_to_dict(report: EvalReport, cm: ConfusionMatrix) -> dict:
    return {
        "accuracy": report.accuracy,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "macro_f1": report.macro_f1,
        "n_examples": report.n_examples,
        "relations": cm.relations,
        "confusion": cm.counts.tolist(),
        "per_relation": [
            {
                "relation": s.relation,
                "gold_total": s.gold_total,
                "correct": s.correct,
                "rate": s.rate,
                "top_wrong": [[w, c] for w, c in s.top_wrong],
            }
            for s in report.per_relation
        ],
    }
