"""Unsupervised fake-news detection with a masked, contrastive graph autoencoder.

The library trains a GIN autoencoder over news-propagation graphs without
labels: each graph is augmented into two views by feature masking and edge
dropping, both views are encoded, re-masked, and decoded, and the model
minimizes reconstruction error minus a weighted cosine alignment of the two
reconstructions. Frozen graph-level embeddings then feed a linear SVM probe
for classification.
"""

from .augment import AugmentConfig, AugmentedView, drop_edges, make_views, mask_features
from .errors import ContractError, DataError, GamcError, NumericError, ShapeError
from .evaluation import (
    LinearSvm,
    Metrics,
    evaluate,
    metrics_from_predictions,
    multi_run,
    split_stratified,
    sweep,
    train_svm,
)
from .graphs import (
    AdjacencyCSR,
    Dataset,
    PropagationGraph,
    dataset_stats,
    load_dataset,
    save_dataset,
    to_csr,
)
from .losses import LossBreakdown, LossConfig, contrast_loss, reconstruction_loss, total_loss
from .model import ModelParams, embed_clean, init_params
from .optim import AdamState, adam_step
from .synth import SynthConfig, default_config, generate
from .tensor import Tape, Tensor2, backward
from .training import TrainConfig, TrainReport, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"
