from .adam import Adam
from .layers import (
    DenseLayer,
    LstmLayer,
    cross_entropy,
    cross_entropy_from_logits,
    dropout_mask,
    log_softmax,
    sigmoid,
    softmax,
)
from .model import (
    ARCHITECTURES,
    LstmClassifier,
    RelationEmbedder,
    TrainConfig,
    TrainHistory,
    encode_batch,
    entity_vector_fn,
    forward,
    init_model,
    init_relation_embedder,
    load_model,
    loss_and_gradients,
    make_predictor,
    predict,
    save_model,
    train,
)

__all__ = [
    "Adam",
    "ARCHITECTURES",
    "DenseLayer",
    "LstmClassifier",
    "LstmLayer",
    "RelationEmbedder",
    "TrainConfig",
    "TrainHistory",
    "cross_entropy",
    "cross_entropy_from_logits",
    "dropout_mask",
    "encode_batch",
    "entity_vector_fn",
    "forward",
    "init_model",
    "init_relation_embedder",
    "load_model",
    "log_softmax",
    "loss_and_gradients",
    "make_predictor",
    "predict",
    "save_model",
    "sigmoid",
    "softmax",
    "train",
]
