"""Word-vector tables and distributional relatedness between surface forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .kb import normalize


@dataclass
class EmbeddingTable:
    """Token -> vector map with a fixed dimensionality.

    Lookups are case-normalized the same way graph surfaces are, so
    ``vector(t, "Cat")`` and ``vector(t, "cat")`` agree.  ``rejected_rows``
    counts input rows dropped during loading (wrong arity, unparseable or
    non-finite values, duplicate tokens).
    """

    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    source_tag: str = ""
    rejected_rows: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return self.lookup(token) is not None

    def lookup(self, token: str) -> Optional[np.ndarray]:
        key = _norm(token)
        if key is None:
            return None
        return self.entries.get(key)


def _norm(text: str) -> Optional[str]:
    try:
        return normalize(text)
    except ValueError:
        return None


def load_word_vectors(
    lines: Iterable[str], expected_dim: Optional[int] = None, source_tag: str = ""
) -> EmbeddingTable:
    """Read a textual word-vector export: header ``<count> <dim>``, then one
    ``<token> <f1> ... <fdim>`` row per line.

    Malformed rows are dropped and counted in ``rejected_rows``; a bad
    header or a dimensionality that contradicts ``expected_dim`` is an error.
    """
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise ValueError("empty vector file: missing header") from None
    parts = header.split()
    if len(parts) != 2:
        raise ValueError(f"bad header {header.rstrip()!r}: expected '<count> <dim>'")
    try:
        _, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"bad header {header.rstrip()!r}: expected two integers") from None
    if dim < 1:
        raise ValueError(f"bad header dimension {dim}")
    if expected_dim is not None and dim != expected_dim:
        raise ValueError(f"vector file has dim {dim}, expected {expected_dim}")

    table = EmbeddingTable(dim=dim, source_tag=source_tag)
    for raw in it:
        fields = raw.split()
        if not fields:
            continue
        if len(fields) != dim + 1:
            table.rejected_rows += 1
            continue
        key = _norm(fields[0])
        if key is None or key in table.entries:
            table.rejected_rows += 1
            continue
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            table.rejected_rows += 1
            continue
        if not np.all(np.isfinite(vec)):
            table.rejected_rows += 1
            continue
        vec.flags.writeable = False
        table.entries[key] = vec
    return table


def load_word_vectors_file(
    path: str, expected_dim: Optional[int] = None, source_tag: str = ""
) -> EmbeddingTable:
    with open(path, "r", encoding="utf-8") as fh:
        return load_word_vectors(fh, expected_dim, source_tag or path)


def vector(table: EmbeddingTable, token: str) -> Optional[np.ndarray]:
    """The stored vector for a token, or None when out of vocabulary."""
    return table.lookup(token)


def phrase_vector(table: EmbeddingTable, text: str) -> Optional[np.ndarray]:
    """Mean of the in-vocabulary token vectors of an underscore-joined phrase.

    None when no token of the phrase is in vocabulary.
    """
    key = _norm(text)
    if key is None:
        return None
    vecs = [table.entries[tok] for tok in key.split("_") if tok in table.entries]
    if not vecs:
        return None
    if len(vecs) == 1:
        return vecs[0]
    return np.mean(vecs, axis=0)


def relatedness(table: EmbeddingTable, a: str, b: str) -> float:
    """Distributional relatedness of two phrases in [0, 1].

    Cosine similarity of the phrase vectors, clamped below at zero so the
    downstream half-of-max filter threshold stays meaningful.  Phrases with
    no in-vocabulary token score 0.  Total and exactly symmetric.
    """
    va = phrase_vector(table, a)
    vb = phrase_vector(table, b)
    if va is None or vb is None:
        return 0.0
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    cos = float(np.dot(va, vb)) / (na * nb)
    return min(1.0, max(0.0, cos))
