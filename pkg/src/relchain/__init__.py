"""relchain: classify the relation chain linking an entity pair through a
commonsense knowledge graph.

Pipeline: load a knowledge graph, enumerate bounded-length relation paths
between entity pairs, prune incoherent paths with a distributional
relatedness filter, turn the survivors into held-out-relation cloze examples,
then train and evaluate baseline and recurrent classifiers on them.
"""

__version__ = "0.1.0"

from . import baselines, dataset, embeddings, evaluation, filtering, forest, kb, neural, paths

__all__ = [
    "__version__",
    "baselines",
    "dataset",
    "embeddings",
    "evaluation",
    "filtering",
    "forest",
    "kb",
    "neural",
    "paths",
]
