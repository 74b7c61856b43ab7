"""Load, normalize and index a knowledge graph of typed binary relations.

The graph is read from a tab-separated edge file (``relation<TAB>start<TAB>end``
with an optional fourth weight column, ``#`` comment lines ignored) and is
immutable once loaded.  Concept and relation surfaces are interned to dense
integer ids in first-seen order, so reloading the same file always produces
the same id assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

FWD = "fwd"
REV = "rev"

NEIGHBOR_MODES = ("outgoing", "incoming", "both")


class EdgeFileError(ValueError):
    """Malformed edge-file content; the message names the offending line."""


def normalize(surface: str) -> str:
    """Normalize a concept or relation surface form.

    Lowercases, strips leading/trailing whitespace and joins internal
    whitespace runs with a single underscore.  Idempotent.

    Raises ValueError for empty or all-whitespace input.
    """
    parts = surface.lower().split()
    if not parts:
        raise ValueError(f"cannot normalize empty or all-whitespace text: {surface!r}")
    return "_".join(parts)


@dataclass(frozen=True)
class Edge:
    relation: int
    start: int
    end: int
    weight: float = 1.0


class KnowledgeGraph:
    """Immutable directed graph of typed relations between interned concepts.

    ``concepts[i]`` / ``relations[i]`` hold the normalized surface for id
    ``i``.  Adjacency is indexed both ways; ``neighbors`` reports each step
    with the traversal direction (``fwd`` along the stored edge, ``rev``
    against it).
    """

    def __init__(self) -> None:
        self.concepts: list[str] = []
        self.relations: list[str] = []
        self.edges: list[Edge] = []
        self._concept_ids: dict[str, int] = {}
        self._relation_ids: dict[str, int] = {}
        # (relation, start, end) -> weight, insertion ordered; duplicates
        # collapse keeping the max weight.
        self._edge_weights: dict[tuple[int, int, int], float] = {}
        self._adj_out: list[list[tuple[int, int, str]]] = []
        self._adj_in: list[list[tuple[int, int, str]]] = []
        self._adj_both: list[list[tuple[int, int, str]]] = []

    # -- interning -------------------------------------------------------

    def _intern_concept(self, surface: str) -> int:
        cid = self._concept_ids.get(surface)
        if cid is None:
            cid = len(self.concepts)
            self._concept_ids[surface] = cid
            self.concepts.append(surface)
        return cid

    def _intern_relation(self, name: str) -> int:
        rid = self._relation_ids.get(name)
        if rid is None:
            rid = len(self.relations)
            self._relation_ids[name] = rid
            self.relations.append(name)
        return rid

    def _add_edge(self, relation: str, start: str, end: str, weight: float) -> None:
        key = (
            self._intern_relation(relation),
            self._intern_concept(start),
            self._intern_concept(end),
        )
        prev = self._edge_weights.get(key)
        self._edge_weights[key] = weight if prev is None else max(prev, weight)

    def _freeze(self) -> None:
        self.edges = [Edge(r, s, e, w) for (r, s, e), w in self._edge_weights.items()]
        n = len(self.concepts)
        self._adj_out = [[] for _ in range(n)]
        self._adj_in = [[] for _ in range(n)]
        for edge in self.edges:
            self._adj_out[edge.start].append((edge.relation, edge.end, FWD))
            self._adj_in[edge.end].append((edge.relation, edge.start, REV))
        for adj in self._adj_out:
            adj.sort()
        for adj in self._adj_in:
            adj.sort()
        self._adj_both = [
            sorted(out + inc) for out, inc in zip(self._adj_out, self._adj_in)
        ]

    # -- lookup ----------------------------------------------------------

    @property
    def n_concepts(self) -> int:
        return len(self.concepts)

    @property
    def n_relations(self) -> int:
        return len(self.relations)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def concept_id(self, surface: str) -> int:
        cid = self.find_concept(surface)
        if cid is None:
            raise ValueError(f"unknown concept: {surface!r}")
        return cid

    def find_concept(self, surface: str) -> Optional[int]:
        try:
            return self._concept_ids.get(normalize(surface))
        except ValueError:
            return None

    def relation_id(self, name: str) -> int:
        rid = self._relation_ids.get(normalize(name))
        if rid is None:
            raise ValueError(f"unknown relation: {name!r}")
        return rid

    def has_edge(self, relation: int, start: int, end: int) -> bool:
        return (relation, start, end) in self._edge_weights

    def _check_concept(self, cid: int) -> None:
        if not 0 <= cid < len(self.concepts):
            raise ValueError(f"unknown concept id: {cid}")

    def neighbors(self, cid: int, mode: str = "both") -> list[tuple[int, int, str]]:
        """Adjacent steps from ``cid`` as (relation id, neighbor id, direction).

        Deterministically ordered by relation id, then neighbor id, then
        direction (``fwd`` before ``rev``).
        """
        self._check_concept(cid)
        if mode == "outgoing":
            return list(self._adj_out[cid])
        if mode == "incoming":
            return list(self._adj_in[cid])
        if mode == "both":
            return list(self._adj_both[cid])
        raise ValueError(f"mode must be one of {NEIGHBOR_MODES}, got {mode!r}")


def load_edges(rows: Iterable[str]) -> KnowledgeGraph:
    """Build a KnowledgeGraph from edge-file lines.

    Duplicate (relation, start, end) rows collapse into one edge keeping the
    maximum weight.  Empty input yields a valid empty graph.
    """
    g = KnowledgeGraph()
    for lineno, raw in enumerate(rows, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise EdgeFileError(
                f"line {lineno}: expected 3 or 4 tab-separated fields, got {len(fields)}"
            )
        try:
            relation = normalize(fields[0])
            start = normalize(fields[1])
            end = normalize(fields[2])
        except ValueError as exc:
            raise EdgeFileError(f"line {lineno}: {exc}") from None
        weight = 1.0
        if len(fields) == 4:
            try:
                weight = float(fields[3])
            except ValueError:
                raise EdgeFileError(f"line {lineno}: bad weight {fields[3]!r}") from None
            if not math.isfinite(weight) or weight < 0.0:
                raise EdgeFileError(f"line {lineno}: weight must be finite and >= 0")
        g._add_edge(relation, start, end, weight)
    g._freeze()
    return g


def load_edges_file(path: str) -> KnowledgeGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_edges(fh)
