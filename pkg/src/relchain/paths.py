"""Enumerate all simple relation paths of bounded length between two concepts.

Path size is counted in relations, so a size-3 path visits two intermediate
concepts.  By default edges are traversed in both directions and each step
records whether it ran along (``fwd``) or against (``rev``) the stored edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .kb import FWD, REV, KnowledgeGraph

DIRECTION_MODES = ("directed", "undirected")

_DIR_CHAR = {FWD: "f", REV: "r"}
_CHAR_DIR = {"f": FWD, "r": REV}


@dataclass(frozen=True)
class RelationPath:
    """Alternating concept/relation sequence between a query pair.

    ``concepts`` has one more element than ``relations``; ``directions``
    parallels ``relations``.  Concepts never repeat.
    """

    concepts: tuple[int, ...]
    relations: tuple[int, ...]
    directions: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.concepts) != len(self.relations) + 1:
            raise ValueError("need exactly one more concept than relations")
        if len(self.directions) != len(self.relations):
            raise ValueError("need one direction per relation")
        if any(d not in (FWD, REV) for d in self.directions):
            raise ValueError(f"directions must be {FWD!r} or {REV!r}")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("paths must not revisit a concept")
        if not self.relations:
            raise ValueError("a path needs at least one relation")

    @property
    def size(self) -> int:
        return len(self.relations)


@dataclass(frozen=True)
class SearchLimits:
    max_len: int = 3
    max_paths: Optional[int] = None
    direction_mode: str = "undirected"

    def __post_init__(self) -> None:
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.max_paths is not None and self.max_paths < 0:
            raise ValueError("max_paths must be >= 0")
        if self.direction_mode not in DIRECTION_MODES:
            raise ValueError(f"direction_mode must be one of {DIRECTION_MODES}")


@dataclass
class PathSearchResult:
    paths: list[RelationPath] = field(default_factory=list)
    truncated: bool = False

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)


def _canonical_key(p: RelationPath) -> tuple:
    steps = tuple(
        (r, c, 0 if d == FWD else 1)
        for r, c, d in zip(p.relations, p.concepts[1:], p.directions)
    )
    return (p.size, steps)


def _check_query(g: KnowledgeGraph, e1: int, e2: int) -> None:
    g._check_concept(e1)
    g._check_concept(e2)
    if e1 == e2:
        raise ValueError("endpoints must differ; a self-relation is undefined")


def enumerate_paths(
    g: KnowledgeGraph, e1: int, e2: int, limits: SearchLimits = SearchLimits()
) -> PathSearchResult:
    """All simple paths of size <= ``limits.max_len`` from ``e1`` to ``e2``.

    Paths are returned in a canonical order (shorter first, then
    lexicographic over the (relation, concept, direction) step triples) so
    downstream artifacts are reproducible.  If ``limits.max_paths`` cuts the
    list short, the result is flagged as truncated.
    """
    _check_query(g, e1, e2)
    neighbor_mode = "outgoing" if limits.direction_mode == "directed" else "both"
    found: list[RelationPath] = []

    nodes = [e1]
    rels: list[int] = []
    dirs: list[str] = []
    visited = {e1}

    def extend(node: int) -> None:
        depth = len(rels)
        for rel, nbr, direction in g.neighbors(node, neighbor_mode):
            if nbr == e2:
                found.append(
                    RelationPath(
                        tuple(nodes) + (e2,), tuple(rels) + (rel,), tuple(dirs) + (direction,)
                    )
                )
            elif depth + 1 < limits.max_len and nbr not in visited:
                visited.add(nbr)
                nodes.append(nbr)
                rels.append(rel)
                dirs.append(direction)
                extend(nbr)
                visited.discard(nbr)
                nodes.pop()
                rels.pop()
                dirs.pop()

    extend(e1)
    found.sort(key=_canonical_key)
    truncated = limits.max_paths is not None and len(found) > limits.max_paths
    if truncated:
        found = found[: limits.max_paths]
    return PathSearchResult(found, truncated)


def count_paths_by_length(
    g: KnowledgeGraph,
    e1: int,
    e2: int,
    max_len: int = 3,
    direction_mode: str = "undirected",
) -> dict[int, int]:
    """Per-length counts of the paths enumerate_paths would return.

    Counts without materializing path objects; lengths with zero paths are
    omitted from the result.
    """
    _check_query(g, e1, e2)
    if direction_mode not in DIRECTION_MODES:
        raise ValueError(f"direction_mode must be one of {DIRECTION_MODES}")
    neighbor_mode = "outgoing" if direction_mode == "directed" else "both"
    counts: dict[int, int] = {}
    visited = {e1}

    def walk(node: int, depth: int) -> None:
        for _, nbr, _ in g.neighbors(node, neighbor_mode):
            if nbr == e2:
                counts[depth + 1] = counts.get(depth + 1, 0) + 1
            elif depth + 1 < max_len and nbr not in visited:
                visited.add(nbr)
                walk(nbr, depth + 1)
                visited.discard(nbr)

    walk(e1, 0)
    return dict(sorted(counts.items()))


# -- text rendering ------------------------------------------------------
#
# Paths file line: `concept/relation/concept/...<TAB>f,r,...` with an
# optional `<TAB>sq=<score>` suffix written by the filtering stage.


def render_path(g: KnowledgeGraph, path: RelationPath) -> str:
    tokens: list[str] = [g.concepts[path.concepts[0]]]
    for rel, concept in zip(path.relations, path.concepts[1:]):
        tokens.append(g.relations[rel])
        tokens.append(g.concepts[concept])
    for tok in tokens:
        if "/" in tok:
            raise ValueError(f"token {tok!r} contains '/', cannot render unambiguously")
    return "/".join(tokens)


def direction_string(path: RelationPath) -> str:
    return ",".join(_DIR_CHAR[d] for d in path.directions)


def render_path_line(g: KnowledgeGraph, path: RelationPath, score: Optional[float] = None) -> str:
    line = f"{render_path(g, path)}\t{direction_string(path)}"
    if score is not None:
        line += f"\tsq={score:.6f}"
    return line


def parse_path_line(
    g: KnowledgeGraph, line: str
) -> tuple[RelationPath, Optional[float]]:
    """Parse a rendered path line back into a RelationPath against ``g``.

    Validates that every step corresponds to an existing edge under its
    recorded direction.
    """
    fields = line.rstrip("\n").split("\t")
    if len(fields) < 2:
        raise ValueError(f"path line needs a direction field: {line!r}")
    dir_chars = fields[1].split(",")
    try:
        directions = tuple(_CHAR_DIR[c] for c in dir_chars)
    except KeyError:
        raise ValueError(f"bad direction string {fields[1]!r}") from None
    k = len(directions)
    tokens = fields[0].split("/")
    if len(tokens) != 2 * k + 1:
        raise ValueError(
            f"path text has {len(tokens)} tokens, expected {2 * k + 1} for size {k}"
        )
    concepts = tuple(g.concept_id(tok) for tok in tokens[0::2])
    relations = tuple(g.relation_id(tok) for tok in tokens[1::2])
    for i, (rel, direction) in enumerate(zip(relations, directions)):
        a, b = concepts[i], concepts[i + 1]
        start, end = (a, b) if direction == FWD else (b, a)
        if not g.has_edge(rel, start, end):
            raise ValueError(
                f"no edge {g.relations[rel]}({g.concepts[start]}, {g.concepts[end]}) in graph"
            )
    score: Optional[float] = None
    if len(fields) >= 3 and fields[2]:
        if not fields[2].startswith("sq="):
            raise ValueError(f"bad score field {fields[2]!r}")
        score = float(fields[2][3:])
    return RelationPath(concepts, relations, directions), score
