"""Score candidate paths by distributional coherence and prune weak ones.

For each entity pair the best-scoring path sets the bar: any candidate whose
score falls below half of that pair-local maximum is dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from .embeddings import EmbeddingTable, relatedness
from .kb import KnowledgeGraph
from .paths import RelationPath


class ScoreStrategy(Enum):
    """How a path's coherence score aggregates concept relatedness.

    TARGET_ANCHORED relates each intermediate concept to the target
    endpoint; ALL_PAIRS averages over every unordered concept pair;
    CONSECUTIVE averages over adjacent concept pairs.
    """

    TARGET_ANCHORED = "target_anchored"
    ALL_PAIRS = "all_pairs"
    CONSECUTIVE = "consecutive"


@dataclass(frozen=True)
class ScoredPath:
    path: RelationPath
    score: float
    strategy: ScoreStrategy = ScoreStrategy.TARGET_ANCHORED


@dataclass
class FilterOutcome:
    kept: list[ScoredPath] = field(default_factory=list)
    dropped: list[ScoredPath] = field(default_factory=list)
    max_score: float = 0.0
    threshold: float = 0.0


def score_path(
    table: EmbeddingTable,
    g: KnowledgeGraph,
    path: RelationPath,
    strategy: ScoreStrategy = ScoreStrategy.TARGET_ANCHORED,
) -> ScoredPath:
    """Coherence score in [0, 1] for one candidate path.

    With TARGET_ANCHORED, a size-1 path (no intermediates) degenerates to
    the relatedness of the two endpoints.
    """
    surfaces = [g.concepts[c] for c in path.concepts]
    if strategy is ScoreStrategy.TARGET_ANCHORED:
        target = surfaces[-1]
        intermediates = surfaces[1:-1]
        if not intermediates:
            score = relatedness(table, surfaces[0], target)
        else:
            score = sum(relatedness(table, x, target) for x in intermediates) / len(
                intermediates
            )
    elif strategy is ScoreStrategy.ALL_PAIRS:
        pairs = list(itertools.combinations(surfaces, 2))
        score = sum(relatedness(table, a, b) for a, b in pairs) / len(pairs)
    elif strategy is ScoreStrategy.CONSECUTIVE:
        pairs = list(zip(surfaces, surfaces[1:]))
        score = sum(relatedness(table, a, b) for a, b in pairs) / len(pairs)
    else:
        raise ValueError(f"unknown strategy: {strategy!r}")
    return ScoredPath(path, score, strategy)


def filter_paths(candidates: list[ScoredPath]) -> FilterOutcome:
    """Drop candidates scoring strictly below half the pair's best score.

    The candidate set must come from a single entity pair and a single
    scoring strategy.  The maximum always survives its own threshold, so a
    nonempty input yields a nonempty kept list; boundary scores (exactly
    half the maximum) are kept.
    """
    if not candidates:
        return FilterOutcome()
    strategies = {c.strategy for c in candidates}
    if len(strategies) > 1:
        raise ValueError(f"mixed scoring strategies in one candidate set: {strategies}")
    max_score = max(c.score for c in candidates)
    threshold = max_score / 2.0
    outcome = FilterOutcome(max_score=max_score, threshold=threshold)
    for cand in candidates:
        if cand.score < threshold:
            outcome.dropped.append(cand)
        else:
            outcome.kept.append(cand)
    return outcome
