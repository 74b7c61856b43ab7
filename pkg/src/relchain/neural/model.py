"""Recurrent sequence classifier for held-out-relation prediction.

The default architecture stacks three LSTM layers (450/200/100 hidden units)
over the 6-slot encoded input and maps the final hidden state to relation
logits; a variant with one LSTM layer followed by tanh dense layers is
available behind the ``architecture`` switch.  Entity rows of the input come
from frozen pretrained vectors (or deterministic random vectors when training
without pretraining); relation-token rows come from a learned embedding whose
rows receive gradients through the input.
"""

from __future__ import annotations

import copy
import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .. import embeddings as emb
from ..dataset import (
    KIND_PAD,
    KIND_RELATION,
    SLOT_COUNT,
    TYPE_COUNT,
    ClozeExample,
    DatasetSplit,
    _TYPE_INDEX,
)
from .adam import Adam
from .layers import DenseLayer, LstmLayer, cross_entropy_from_logits, dropout_mask

ARCHITECTURES = ("stacked_lstm", "lstm_dense")

MODEL_MAGIC = b"RELCHAIN"
MODEL_FORMAT_VERSION = 1


@dataclass
class RelationEmbedder:
    """Learned vector per relation name; row order defines the class indexing."""

    relations: list[str]
    matrix: np.ndarray  # (n_relations, dim)
    seed: int = 0
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.matrix.shape[0] != len(self.relations):
            raise ValueError("one matrix row per relation required")
        self._index = {name: i for i, name in enumerate(self.relations)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"relation {name!r} not in vocabulary") from None

    def vector(self, name: str) -> np.ndarray:
        return self.matrix[self.index(name)]


class LstmClassifier:
    def __init__(
        self,
        n_classes: int,
        input_dim: int,
        hidden_sizes: Sequence[int] = (450, 200, 100),
        dropout_rate: float = 0.5,
        architecture: str = "stacked_lstm",
        input_len: int = SLOT_COUNT,
        rng: Optional[np.random.Generator] = None,
    ):
        if n_classes < 2:
            raise ValueError("need at least two relation classes")
        if input_dim < 1 or input_len < 1 or not hidden_sizes:
            raise ValueError("dimensions must be positive")
        if architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be one of {ARCHITECTURES}")
        self.n_classes = n_classes
        self.input_dim = input_dim
        self.input_len = input_len
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        self.dropout_rate = dropout_rate
        self.architecture = architecture

        self.lstm_layers: list[LstmLayer] = []
        self.dense_layers: list[DenseLayer] = []
        if architecture == "stacked_lstm":
            size = input_dim
            for h in self.hidden_sizes:
                self.lstm_layers.append(LstmLayer(size, h, rng))
                size = h
        else:
            self.lstm_layers.append(LstmLayer(input_dim, self.hidden_sizes[0], rng))
            size = self.hidden_sizes[0]
            for h in self.hidden_sizes[1:]:
                self.dense_layers.append(DenseLayer(size, h, rng, activation="tanh"))
                size = h
        self.head = DenseLayer(size, n_classes, rng)

    def parameters(self) -> dict[str, np.ndarray]:
        params: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.lstm_layers):
            params[f"lstm{i}.wx"] = layer.wx
            params[f"lstm{i}.wh"] = layer.wh
            params[f"lstm{i}.b"] = layer.b
        for i, layer in enumerate(self.dense_layers, start=1):
            params[f"dense{i}.w"] = layer.w
            params[f"dense{i}.b"] = layer.b
        params["head.w"] = self.head.w
        params["head.b"] = self.head.b
        return params

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters().values())


def init_relation_embedder(
    relations: Sequence[str], dim: int, seed: int
) -> RelationEmbedder:
    """Seed-deterministic relation embedding with U(-1/sqrt(d), 1/sqrt(d)) rows."""
    if dim < 1:
        raise ValueError("embedding dim must be positive")
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(dim)
    matrix = rng.uniform(-bound, bound, size=(len(relations), dim))
    return RelationEmbedder(relations=list(relations), matrix=matrix, seed=seed)


def init_model(
    relations: Sequence[str],
    input_dim: int,
    seed: int,
    hidden_sizes: Sequence[int] = (450, 200, 100),
    dropout_rate: float = 0.5,
    architecture: str = "stacked_lstm",
    input_len: int = SLOT_COUNT,
) -> tuple[LstmClassifier, RelationEmbedder]:
    """Seed-deterministic model plus relation embedder.

    Weights draw from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the relation
    embedding dimension is ``input_dim - 3`` so embedded rows line up with
    the encoded entity rows.
    """
    if input_dim <= TYPE_COUNT:
        raise ValueError(f"input_dim must exceed {TYPE_COUNT}")
    rng = np.random.default_rng(seed)
    model = LstmClassifier(
        n_classes=len(relations),
        input_dim=input_dim,
        hidden_sizes=hidden_sizes,
        dropout_rate=dropout_rate,
        architecture=architecture,
        input_len=input_len,
        rng=rng,
    )
    d = input_dim - TYPE_COUNT
    bound = 1.0 / np.sqrt(d)
    matrix = rng.uniform(-bound, bound, size=(len(relations), d))
    embedder = RelationEmbedder(relations=list(relations), matrix=matrix, seed=seed)
    return model, embedder


# -- forward / backward -------------------------------------------------------


def _check_batch(model: LstmClassifier, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3 or x.shape[1] != model.input_len or x.shape[2] != model.input_dim:
        raise ValueError(
            f"expected batch shaped (n, {model.input_len}, {model.input_dim}), got {x.shape}"
        )
    return x


def _forward(
    model: LstmClassifier,
    x: np.ndarray,
    train: bool,
    rng: Optional[np.random.Generator],
) -> tuple[np.ndarray, np.ndarray, list]:
    """Returns (logits, probs is computed by caller, caches).

    In train mode a dropout mask follows every recurrent (and dense) layer
    output; masks come from ``rng`` so a fixed seed fixes the whole pass.
    """
    if train and model.dropout_rate > 0.0 and rng is None:
        raise ValueError("train-mode forward needs an RNG for dropout masks")
    caches: list = []
    h = x
    for layer in model.lstm_layers:
        h, cache = layer.forward(h)
        mask = None
        if train and model.dropout_rate > 0.0:
            mask = dropout_mask(h.shape, model.dropout_rate, rng)
            h = h * mask
        caches.append(("lstm", layer, cache, mask))
    out = h[:, -1, :]
    for layer in model.dense_layers:
        out, cache = layer.forward(out)
        mask = None
        if train and model.dropout_rate > 0.0:
            mask = dropout_mask(out.shape, model.dropout_rate, rng)
            out = out * mask
        caches.append(("dense", layer, cache, mask))
    logits, head_cache = model.head.forward(out)
    caches.append(("head", model.head, head_cache, None))
    return logits, h, caches


def forward(
    model: LstmClassifier,
    batch: np.ndarray,
    mode: str = "infer",
    seed: Optional[int] = None,
) -> np.ndarray:
    """Per-example probability vectors over the relation classes."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    x = _check_batch(model, batch)
    rng = np.random.default_rng(seed) if mode == "train" else None
    logits, _, _ = _forward(model, x, mode == "train", rng)
    from .layers import softmax

    return softmax(logits)


def _backward(
    model: LstmClassifier, caches: list, dlogits: np.ndarray
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    grads: dict[str, np.ndarray] = {}
    kind, layer, cache, _ = caches[-1]
    assert kind == "head"
    dout, head_grads = layer.backward(cache, dlogits)
    grads["head.w"] = head_grads["w"]
    grads["head.b"] = head_grads["b"]

    dense_caches = [c for c in caches[:-1] if c[0] == "dense"]
    for i in reversed(range(len(dense_caches))):
        _, layer, cache, mask = dense_caches[i]
        if mask is not None:
            dout = dout * mask
        dout, layer_grads = layer.backward(cache, dout)
        grads[f"dense{i + 1}.w"] = layer_grads["w"]
        grads[f"dense{i + 1}.b"] = layer_grads["b"]

    lstm_caches = [c for c in caches if c[0] == "lstm"]
    _, _, top_cache, _ = lstm_caches[-1]
    batch, steps = top_cache["x"].shape[0], top_cache["x"].shape[1]
    dh_seq = np.zeros((batch, steps, model.lstm_layers[-1].hidden_size))
    dh_seq[:, -1] = dout
    for i in reversed(range(len(lstm_caches))):
        _, layer, cache, mask = lstm_caches[i]
        if mask is not None:
            dh_seq = dh_seq * mask
        dh_seq, layer_grads = layer.backward(cache, dh_seq)
        grads[f"lstm{i}.wx"] = layer_grads["wx"]
        grads[f"lstm{i}.wh"] = layer_grads["wh"]
        grads[f"lstm{i}.b"] = layer_grads["b"]
    return dh_seq, grads


def loss_and_gradients(
    model: LstmClassifier,
    batch: np.ndarray,
    labels: Sequence[int],
    mode: str = "train",
    seed: Optional[int] = None,
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """Mean cross-entropy plus gradients for every model parameter and for
    the input batch (the latter feeds embedding-row updates)."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    x = _check_batch(model, batch)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (x.shape[0],):
        raise ValueError(f"need one label per example, got {labels.shape}")
    rng = np.random.default_rng(seed) if mode == "train" else None
    logits, _, caches = _forward(model, x, mode == "train", rng)
    loss, dlogits = cross_entropy_from_logits(logits, labels)
    dx, grads = _backward(model, caches, dlogits)
    return loss, grads, dx


# -- batch assembly -----------------------------------------------------------


def entity_vector_fn(
    table: Optional[emb.EmbeddingTable],
    dim: int,
    entity_mode: str = "pretrained",
    seed: int = 0,
) -> Callable[[str], Optional[np.ndarray]]:
    """Vector source for entity/intermediate slot tokens.

    ``pretrained`` reads frozen phrase vectors from the table (out of
    vocabulary -> None, encoded as zeros); ``random`` draws a deterministic
    frozen vector per token, for training without pretrained vectors.
    """
    if entity_mode == "pretrained":
        if table is None:
            raise ValueError("pretrained entity mode needs an embedding table")
        if table.dim != dim:
            raise ValueError(f"table dim {table.dim} != expected {dim}")
        return lambda token: emb.phrase_vector(table, token)
    if entity_mode == "random":
        bound = 1.0 / np.sqrt(dim)
        cache: dict[str, np.ndarray] = {}

        def fn(token: str) -> np.ndarray:
            vec = cache.get(token)
            if vec is None:
                digest = hashlib.sha256(f"{seed}\x00{token}".encode()).digest()
                words = np.frombuffer(digest, dtype=np.uint32)
                rng = np.random.default_rng(np.random.SeedSequence(words.tolist()))
                vec = rng.uniform(-bound, bound, size=dim)
                cache[token] = vec
            return vec

        return fn
    raise ValueError(f"entity_mode must be 'pretrained' or 'random', got {entity_mode!r}")


def encode_batch(
    examples: Sequence[ClozeExample],
    embedder: RelationEmbedder,
    entity_fn: Callable[[str], Optional[np.ndarray]],
) -> tuple[np.ndarray, np.ndarray, list[tuple[int, int, int]]]:
    """(batch matrix, labels, relation-slot positions).

    Positions list (example, slot, relation index) so relation-row gradients
    can be scattered back into the embedder matrix.
    """
    d = embedder.dim
    x = np.zeros((len(examples), SLOT_COUNT, d + TYPE_COUNT))
    labels = np.zeros(len(examples), dtype=np.int64)
    rel_positions: list[tuple[int, int, int]] = []
    for b, ex in enumerate(examples):
        labels[b] = embedder.index(ex.target)
        for t, slot in enumerate(ex.slots):
            if slot.kind == KIND_PAD:
                continue
            if slot.kind == KIND_RELATION:
                ridx = embedder.index(slot.token)
                x[b, t, :d] = embedder.matrix[ridx]
                rel_positions.append((b, t, ridx))
            else:
                vec = entity_fn(slot.token)
                if vec is not None:
                    x[b, t, :d] = vec
            x[b, t, d + _TYPE_INDEX[slot.kind]] = 1.0
    return x, labels, rel_positions


# -- training -----------------------------------------------------------------


@dataclass
class TrainConfig:
    batch_size: int = 25
    epochs: int = 50
    seed: int = 0
    learning_rate: float = 1e-3
    entity_mode: str = "pretrained"
    train_relation_embedding: bool = True


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    dev_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = 0  # 1-based epoch whose weights the model keeps


def _accuracy(
    model: LstmClassifier,
    examples: Sequence[ClozeExample],
    embedder: RelationEmbedder,
    entity_fn: Callable[[str], Optional[np.ndarray]],
    batch_size: int,
) -> float:
    correct = 0
    for start in range(0, len(examples), batch_size):
        chunk = examples[start : start + batch_size]
        x, labels, _ = encode_batch(chunk, embedder, entity_fn)
        probs = forward(model, x, mode="infer")
        correct += int((probs.argmax(axis=1) == labels).sum())
    return correct / len(examples)


def train(
    model: LstmClassifier,
    embedder: RelationEmbedder,
    split: DatasetSplit,
    config: TrainConfig,
    table: Optional[emb.EmbeddingTable] = None,
) -> TrainHistory:
    """Adam training with seeded per-epoch shuffling and dropout.

    Dev accuracy is measured in infer mode after every epoch and the
    best-dev weights (earliest epoch on ties) are restored at the end.
    """
    if not split.train or not split.dev:
        raise ValueError("train and dev partitions must be nonempty")
    if config.epochs < 1:
        raise ValueError("epochs must be >= 1")
    if config.batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    d = embedder.dim
    entity_fn = entity_vector_fn(table, d, config.entity_mode, config.seed)

    params = dict(model.parameters())
    if config.train_relation_embedding:
        params["relation_embedding"] = embedder.matrix
    optimizer = Adam(learning_rate=config.learning_rate)
    history = TrainHistory()
    best_acc = -1.0
    best_params: dict[str, np.ndarray] = {p: a.copy() for p, a in params.items()}

    epoch_streams = np.random.SeedSequence(config.seed).spawn(config.epochs)
    n = len(split.train)
    for epoch, stream in enumerate(epoch_streams, start=1):
        rng = np.random.default_rng(stream)
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            chunk = [split.train[i] for i in order[start : start + config.batch_size]]
            x, labels, rel_positions = encode_batch(chunk, embedder, entity_fn)
            mask_seed = int(rng.integers(0, 2**63))
            loss, grads, dx = loss_and_gradients(
                model, x, labels, mode="train", seed=mask_seed
            )
            loss_sum += loss * len(chunk)
            if config.train_relation_embedding:
                embed_grad = np.zeros_like(embedder.matrix)
                for b, t, ridx in rel_positions:
                    embed_grad[ridx] += dx[b, t, :d]
                grads["relation_embedding"] = embed_grad
            optimizer.step(params, grads)
        history.train_loss.append(loss_sum / n)
        acc = _accuracy(model, split.dev, embedder, entity_fn, config.batch_size)
        history.dev_accuracy.append(acc)
        if acc > best_acc:
            best_acc = acc
            history.best_epoch = epoch
            best_params = {p: a.copy() for p, a in params.items()}
    for name, arr in params.items():
        arr[...] = best_params[name]
    return history


def predict(
    model: LstmClassifier, batch: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(argmax class indices, probability matrix) in infer mode."""
    probs = forward(model, batch, mode="infer")
    return probs.argmax(axis=1), probs


def make_predictor(
    model: LstmClassifier,
    embedder: RelationEmbedder,
    table: Optional[emb.EmbeddingTable],
    entity_mode: str = "pretrained",
    seed: int = 0,
    batch_size: int = 64,
) -> Callable[[Sequence[ClozeExample]], list[str]]:
    """Batched ClozeExample -> relation-name predictor for evaluation."""
    entity_fn = entity_vector_fn(table, embedder.dim, entity_mode, seed)

    def predict_names(examples: Sequence[ClozeExample]) -> list[str]:
        names: list[str] = []
        for start in range(0, len(examples), batch_size):
            chunk = examples[start : start + batch_size]
            x, _, _ = encode_batch(chunk, embedder, entity_fn)
            idx, _ = predict(model, x)
            names.extend(embedder.relations[i] for i in idx)
        return names

    return predict_names


# -- model file ---------------------------------------------------------------
#
# Layout: 8-byte magic, uint32 format version, uint64 header length, UTF-8
# JSON header (dims, relation vocabulary, parameter names/shapes, metadata),
# then the parameter tensors as little-endian float64 in header order.


def _ordered_params(
    model: LstmClassifier, embedder: RelationEmbedder
) -> dict[str, np.ndarray]:
    params = {"relation_embedding": embedder.matrix}
    params.update(model.parameters())
    return params


def save_model(
    path: str,
    model: LstmClassifier,
    embedder: RelationEmbedder,
    meta: Optional[dict] = None,
) -> None:
    params = _ordered_params(model, embedder)
    header = {
        "architecture": model.architecture,
        "input_dim": model.input_dim,
        "input_len": model.input_len,
        "hidden_sizes": list(model.hidden_sizes),
        "dropout_rate": model.dropout_rate,
        "relations": embedder.relations,
        "embedder_seed": embedder.seed,
        "params": [{"name": k, "shape": list(v.shape)} for k, v in params.items()],
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", MODEL_FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for arr in params.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path: str) -> tuple[LstmClassifier, RelationEmbedder, dict]:
    with open(path, "rb") as fh:
        magic = fh.read(len(MODEL_MAGIC))
        if magic != MODEL_MAGIC:
            raise ValueError(f"{path}: not a relchain model file (magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(
                f"{path}: unsupported model format version {version}; "
                f"this build reads version {MODEL_FORMAT_VERSION}"
            )
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        payload = fh.read()

    model = LstmClassifier(
        n_classes=len(header["relations"]),
        input_dim=header["input_dim"],
        hidden_sizes=header["hidden_sizes"],
        dropout_rate=header["dropout_rate"],
        architecture=header["architecture"],
        input_len=header["input_len"],
        rng=None,
    )
    d = header["input_dim"] - TYPE_COUNT
    embedder = RelationEmbedder(
        relations=list(header["relations"]),
        matrix=np.zeros((len(header["relations"]), d)),
        seed=header.get("embedder_seed", 0),
    )
    params = _ordered_params(model, embedder)
    offset = 0
    for spec in header["params"]:
        name, shape = spec["name"], tuple(spec["shape"])
        if name not in params or params[name].shape != shape:
            raise ValueError(f"{path}: unexpected parameter {name!r} with shape {shape}")
        size = int(np.prod(shape)) * 8
        chunk = payload[offset : offset + size]
        if len(chunk) != size:
            raise ValueError(f"{path}: truncated tensor data for {name!r}")
        params[name][...] = np.frombuffer(chunk, dtype="<f8").reshape(shape)
        offset += size
    if offset != len(payload):
        raise ValueError(f"{path}: {len(payload) - offset} trailing bytes after tensors")
    return model, embedder, header.get("meta", {})
