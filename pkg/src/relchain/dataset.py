"""Turn relation paths into fixed-length cloze examples and numeric matrices.

A path of size k yields k examples, one per held-out relation.  Every example
is padded to exactly six input slots; the input always starts with the two
query endpoints, then interleaves the not-yet-predicted intermediates with the
already-revealed relations in the fixed orders below (later intermediates
first):

    size 1:  [e1, e2]                     -> R1
    size 2:  [e1, e2, X1]                 -> R1
             [e1, e2, X1, R1]             -> R2
    size 3:  [e1, e2, X1]                 -> R1
             [e1, e2, X2, X1, R1]         -> R2
             [e1, e2, X2, R2, X1, R1]     -> R3
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

import numpy as np

from . import embeddings
from .kb import KnowledgeGraph
from .paths import RelationPath, direction_string, render_path

KIND_ENTITY = "entity"
KIND_INTERMEDIATE = "intermediate"
KIND_RELATION = "relation"
KIND_PAD = "pad"

SLOT_COUNT = 6
TYPE_COUNT = 3  # entity / intermediate / relation one-hot width

_TYPE_INDEX = {KIND_ENTITY: 0, KIND_INTERMEDIATE: 1, KIND_RELATION: 2}


@dataclass(frozen=True)
class Slot:
    kind: str
    token: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (KIND_ENTITY, KIND_INTERMEDIATE, KIND_RELATION, KIND_PAD):
            raise ValueError(f"bad slot kind: {self.kind!r}")
        if self.kind == KIND_PAD and self.token:
            raise ValueError("pad slots carry no token")
        if self.kind != KIND_PAD and not self.token:
            raise ValueError(f"{self.kind} slot needs a token")


PAD = Slot(KIND_PAD)


@dataclass(frozen=True)
class ClozeExample:
    """Six input slots plus the held-out target relation.

    ``path_key`` identifies the source path (its rendered text plus
    direction string) and is the grouping key that keeps all examples of one
    path inside the same dataset partition.  ``position`` is the 1-based
    index of the held-out relation within the source path.
    """

    slots: tuple[Slot, ...]
    target: str
    pair: tuple[str, str]
    path_key: str
    position: int

    def __post_init__(self) -> None:
        if len(self.slots) != SLOT_COUNT:
            raise ValueError(f"need exactly {SLOT_COUNT} slots, got {len(self.slots)}")
        seen_pad = False
        for slot in self.slots:
            if slot.kind == KIND_PAD:
                seen_pad = True
            elif seen_pad:
                raise ValueError("pad slots must form a suffix")
        if not any(s.kind != KIND_PAD for s in self.slots):
            raise ValueError("example needs at least one populated slot")
        if self.position < 1:
            raise ValueError("position is 1-based")

    def input_slots(self) -> list[Slot]:
        return [s for s in self.slots if s.kind != KIND_PAD]


def _pad(slots: list[Slot]) -> tuple[Slot, ...]:
    return tuple(slots + [PAD] * (SLOT_COUNT - len(slots)))


def build_examples(g: KnowledgeGraph, paths: Iterable[RelationPath]) -> list[ClozeExample]:
    """One cloze example per relation position of every path (sizes 1-3)."""
    out: list[ClozeExample] = []
    for path in paths:
        k = path.size
        if not 1 <= k <= 3:
            raise ValueError(f"paths must have size 1..3, got {k}")
        concepts = [g.concepts[c] for c in path.concepts]
        rels = [g.relations[r] for r in path.relations]
        e1, e2 = concepts[0], concepts[-1]
        xs = concepts[1:-1]  # X1, X2 in path order
        key = f"{render_path(g, path)}\t{direction_string(path)}"
        ent = lambda t: Slot(KIND_ENTITY, t)
        mid = lambda t: Slot(KIND_INTERMEDIATE, t)
        rel = lambda t: Slot(KIND_RELATION, t)

        patterns: list[list[Slot]]
        if k == 1:
            patterns = [[ent(e1), ent(e2)]]
        elif k == 2:
            patterns = [
                [ent(e1), ent(e2), mid(xs[0])],
                [ent(e1), ent(e2), mid(xs[0]), rel(rels[0])],
            ]
        else:
            patterns = [
                [ent(e1), ent(e2), mid(xs[0])],
                [ent(e1), ent(e2), mid(xs[1]), mid(xs[0]), rel(rels[0])],
                [ent(e1), ent(e2), mid(xs[1]), rel(rels[1]), mid(xs[0]), rel(rels[0])],
            ]
        for pos, inputs in enumerate(patterns, start=1):
            out.append(
                ClozeExample(
                    slots=_pad(inputs),
                    target=rels[pos - 1],
                    pair=(e1, e2),
                    path_key=key,
                    position=pos,
                )
            )
    return out


# -- splitting -------------------------------------------------------------


@dataclass
class DatasetSplit:
    train: list[ClozeExample]
    dev: list[ClozeExample]
    test: list[ClozeExample]
    seed: int


def split(
    examples: list[ClozeExample],
    test_fraction: float = 0.25,
    dev_fraction_of_train: float = 0.25,
    seed: int = 0,
) -> DatasetSplit:
    """Seeded three-way partition keeping each source path's examples together.

    Whole path groups are shuffled and assigned until the test partition
    reaches ``floor(n_examples * test_fraction)`` examples, then the dev
    partition reaches ``floor(remaining * dev_fraction_of_train)``; the rest
    is training data.
    """
    for name, frac in (("test_fraction", test_fraction), ("dev_fraction_of_train", dev_fraction_of_train)):
        if not 0.0 < frac < 1.0:
            raise ValueError(f"{name} must be in (0, 1), got {frac}")
    groups: dict[str, list[ClozeExample]] = {}
    for ex in examples:
        groups.setdefault(ex.path_key, []).append(ex)
    keys = list(groups)
    order = np.random.default_rng(seed).permutation(len(keys))

    total = len(examples)
    test_target = int(total * test_fraction)
    test: list[ClozeExample] = []
    dev: list[ClozeExample] = []
    train: list[ClozeExample] = []
    remaining: list[str] = []
    for idx in order:
        key = keys[idx]
        if len(test) < test_target:
            test.extend(groups[key])
        else:
            remaining.append(key)
    dev_target = int((total - len(test)) * dev_fraction_of_train)
    for key in remaining:
        if len(dev) < dev_target:
            dev.extend(groups[key])
        else:
            train.extend(groups[key])
    if not (train and dev and test):
        raise ValueError(
            f"too few examples ({total}) to populate train/dev/test at these fractions"
        )
    return DatasetSplit(train=train, dev=dev, test=test, seed=seed)


# -- numeric encoding -------------------------------------------------------


@dataclass
class EncodedExample:
    matrix: np.ndarray  # (SLOT_COUNT, dim + TYPE_COUNT)
    label: int


def encode(
    example: ClozeExample, table: embeddings.EmbeddingTable, relation_embedder
) -> EncodedExample:
    """Encode one example as a 6 x (d+3) matrix plus its class label.

    Entity and intermediate rows hold the phrase vector from ``table``
    (out-of-vocabulary phrases become zero vectors), relation rows hold the
    learned relation vector, and every row appends a 3-way slot-type one-hot.
    Pad rows are entirely zero.
    """
    d = table.dim
    if relation_embedder.dim != d:
        raise ValueError(
            f"embedding dim mismatch: table {d} vs relation embedder {relation_embedder.dim}"
        )
    matrix = np.zeros((SLOT_COUNT, d + TYPE_COUNT), dtype=np.float64)
    for row, slot in enumerate(example.slots):
        if slot.kind == KIND_PAD:
            continue
        if slot.kind == KIND_RELATION:
            matrix[row, :d] = relation_embedder.vector(slot.token)
        else:
            vec = embeddings.phrase_vector(table, slot.token)
            if vec is not None:
                matrix[row, :d] = vec
        matrix[row, d + _TYPE_INDEX[slot.kind]] = 1.0
    return EncodedExample(matrix=matrix, label=relation_embedder.index(example.target))


def flatten_features(encoded: EncodedExample) -> np.ndarray:
    return encoded.matrix.reshape(-1)


# -- disk format -------------------------------------------------------------
#
# One JSON object per line; `#` lines are headers/comments and are skipped on
# read.  Serialization is key-sorted so identical inputs produce identical
# bytes.


def example_to_dict(example: ClozeExample) -> dict:
    return {
        "slots": [{"kind": s.kind, "token": s.token} for s in example.slots],
        "target": example.target,
        "pair": list(example.pair),
        "path": example.path_key,
        "position": example.position,
    }


def example_from_dict(record: dict) -> ClozeExample:
    slots = tuple(Slot(s["kind"], s.get("token", "")) for s in record["slots"])
    pair = record["pair"]
    return ClozeExample(
        slots=slots,
        target=record["target"],
        pair=(pair[0], pair[1]),
        path_key=record["path"],
        position=record["position"],
    )


def write_examples(examples: Iterable[ClozeExample], sink: Union[str, IO[str]]) -> None:
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as fh:
            write_examples(examples, fh)
        return
    for ex in examples:
        sink.write(json.dumps(example_to_dict(ex), sort_keys=True) + "\n")


def read_examples(source: Union[str, IO[str]]) -> list[ClozeExample]:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_examples(fh)
    out: list[ClozeExample] = []
    index = 0
    for line in source:
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        index += 1
        try:
            out.append(example_from_dict(json.loads(line)))
        except (KeyError, IndexError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ValueError(f"malformed example record {index}: {exc}") from None
    return out


def relation_vocabulary(examples: Iterable[ClozeExample]) -> list[str]:
    """Sorted names of every relation occurring in the examples (targets and
    revealed input relations alike)."""
    names = set()
    for ex in examples:
        names.add(ex.target)
        for slot in ex.slots:
            if slot.kind == KIND_RELATION:
                names.add(slot.token)
    return sorted(names)
