"""Random forest of Gini-impurity decision trees over numeric feature rows.

Trees are grown greedily: at each node a random subset of features is
examined, candidate thresholds are the midpoints between consecutive distinct
values, and the split minimizing the size-weighted child Gini impurity wins
(strict improvement over the node's own impurity required; ties resolve to
the smallest feature index, then the smallest threshold).  Samples go left
when ``x[feature] < threshold``.  Prediction is the majority vote over trees,
ties toward the smaller class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_depth: Optional[int] = None
    feature_subsample: Optional[int] = None  # default: floor(sqrt(n_features))
    bootstrap: bool = True


@dataclass
class TreeNode:
    # leaf >= 0 marks a leaf; internal nodes route on (feature, threshold)
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    leaf: int = -1


@dataclass
class DecisionTree:
    nodes: list[TreeNode] = field(default_factory=list)

    def predict(self, x: np.ndarray) -> int:
        node = self.nodes[0]
        while node.leaf < 0:
            node = self.nodes[node.left if x[node.feature] < node.threshold else node.right]
        return node.leaf


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    n_classes: int
    n_features: int
    config: ForestConfig
    seed: int


def _gini(y: np.ndarray, n_classes: int) -> float:
    probs = np.bincount(y, minlength=n_classes) / y.size
    return 1.0 - float(np.sum(probs * probs))


def _majority(y: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(y, minlength=n_classes)))


def _best_split(
    X: np.ndarray, y: np.ndarray, features: np.ndarray, n_classes: int
) -> Optional[tuple[float, int, float]]:
    n = y.size
    best: Optional[tuple[float, int, float]] = None
    for f in np.sort(features):
        values = np.unique(X[:, f])
        if values.size < 2:
            continue
        for t in (values[:-1] + values[1:]) / 2.0:
            mask = X[:, f] < t
            nl = int(mask.sum())
            nr = n - nl
            if nl == 0 or nr == 0:
                continue
            cost = (
                nl * _gini(y[mask], n_classes) + nr * _gini(y[~mask], n_classes)
            ) / n
            if best is None or cost < best[0]:
                best = (cost, int(f), float(t))
    return best


def _grow(
    tree: DecisionTree,
    X: np.ndarray,
    y: np.ndarray,
    depth: int,
    n_classes: int,
    config: ForestConfig,
    n_subsample: int,
    rng: np.random.Generator,
) -> int:
    idx = len(tree.nodes)
    tree.nodes.append(TreeNode())
    impurity = _gini(y, n_classes)
    stop = (
        y.size < 2
        or impurity == 0.0
        or (config.max_depth is not None and depth >= config.max_depth)
    )
    if not stop:
        features = rng.choice(X.shape[1], size=n_subsample, replace=False)
        best = _best_split(X, y, features, n_classes)
        if best is not None and best[0] < impurity:
            _, f, t = best
            mask = X[:, f] < t
            node = tree.nodes[idx]
            node.feature = f
            node.threshold = t
            node.left = _grow(tree, X[mask], y[mask], depth + 1, n_classes, config, n_subsample, rng)
            node.right = _grow(tree, X[~mask], y[~mask], depth + 1, n_classes, config, n_subsample, rng)
            return idx
    tree.nodes[idx].leaf = _majority(y, n_classes)
    return idx


def train_forest(
    X: np.ndarray, y: np.ndarray, config: ForestConfig = ForestConfig(), seed: int = 0
) -> ForestModel:
    """Fit a forest on feature matrix X (n_samples, n_features) and int labels y.

    Each tree sees its own bootstrap resample and its own RNG stream derived
    from (seed, tree index), so training is reproducible and trees could be
    grown concurrently.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise ValueError(f"bad training shapes: X {X.shape}, y {y.shape}")
    n_classes = int(y.max()) + 1
    if np.unique(y).size < 2:
        raise ValueError("training data contains a single class")
    n_features = X.shape[1]
    n_subsample = config.feature_subsample or max(1, int(math.sqrt(n_features)))
    if not 1 <= n_subsample <= n_features:
        raise ValueError(f"feature_subsample must be in 1..{n_features}")

    streams = np.random.SeedSequence(seed).spawn(config.n_trees)
    trees: list[DecisionTree] = []
    for stream in streams:
        rng = np.random.default_rng(stream)
        if config.bootstrap:
            rows = rng.integers(0, X.shape[0], size=X.shape[0])
            Xb, yb = X[rows], y[rows]
        else:
            Xb, yb = X, y
        tree = DecisionTree()
        _grow(tree, Xb, yb, 0, n_classes, config, n_subsample, rng)
        trees.append(tree)
    return ForestModel(
        trees=trees, n_classes=n_classes, n_features=n_features, config=config, seed=seed
    )


def predict_forest(model: ForestModel, x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(f"expected feature vector of length {model.n_features}")
    votes = np.bincount(
        [tree.predict(x) for tree in model.trees], minlength=model.n_classes
    )
    return int(np.argmax(votes))


# -- serialization ------------------------------------------------------------


def forest_to_dict(model: ForestModel) -> dict:
    return {
        "kind": "forest",
        "n_classes": model.n_classes,
        "n_features": model.n_features,
        "seed": model.seed,
        "config": {
            "n_trees": model.config.n_trees,
            "max_depth": model.config.max_depth,
            "feature_subsample": model.config.feature_subsample,
            "bootstrap": model.config.bootstrap,
        },
        "trees": [
            [[n.feature, n.threshold, n.left, n.right, n.leaf] for n in tree.nodes]
            for tree in model.trees
        ],
    }


def forest_from_dict(data: dict) -> ForestModel:
    cfg = data["config"]
    return ForestModel(
        trees=[
            DecisionTree(
                nodes=[
                    TreeNode(int(f), float(t), int(l), int(r), int(leaf))
                    for f, t, l, r, leaf in tree
                ]
            )
            for tree in data["trees"]
        ],
        n_classes=int(data["n_classes"]),
        n_features=int(data["n_features"]),
        config=ForestConfig(
            n_trees=int(cfg["n_trees"]),
            max_depth=cfg["max_depth"],
            feature_subsample=cfg["feature_subsample"],
            bootstrap=bool(cfg["bootstrap"]),
        ),
        seed=int(data["seed"]),
    )
