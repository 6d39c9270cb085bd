"""GIN autoencoder: learnable parameters and forward passes.

The encoder is two GIN layers; each node update is
MLP((1 + eps) * h_i + sum of neighbor h_j) with a two-affine ReLU MLP, and
the graph-level embedding is the column-wise sum of the final node
embeddings. The decoder re-masks the encoded rows with a learnable token and
runs one more GIN layer back to feature space, so masked nodes must be
rebuilt from their neighbors.
"""

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import DataError
from .graphs import to_csr
from .rng import INIT, stream
from .tensor import Tape, Tensor2

FORMAT_VERSION = 1


@dataclass
class GinLayerParams:
    eps: object  # 1x1
    w1: object  # in_dim x hidden_dim
    b1: object  # 1 x hidden_dim
    w2: object  # hidden_dim x out_dim
    b2: object  # 1 x out_dim


@dataclass
class EncoderParams:
    layer1: GinLayerParams
    layer2: GinLayerParams


@dataclass
class DecoderParams:
    remask_token: object  # 1 x hidden_dim
    layers: tuple  # GinLayerParams chain ending at feature_dim


@dataclass
class ModelParams:
    feature_dim: int
    hidden_dim: int
    mask_token: object  # 1 x feature_dim
    encoder: EncoderParams
    decoder: DecoderParams
    format_version: int = FORMAT_VERSION


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _init_layer(rng, in_dim, hidden_dim, out_dim):
    return GinLayerParams(
        eps=np.zeros((1, 1)),
        w1=_glorot(rng, in_dim, hidden_dim),
        b1=np.zeros((1, hidden_dim)),
        w2=_glorot(rng, hidden_dim, out_dim),
        b2=np.zeros((1, out_dim)),
    )


def init_params(feature_dim, hidden_dim=512, decoder_layers=1, seed=0):
    """Fresh model: Glorot-uniform weights, zero biases, eps, and tokens."""
    rng = stream(seed, INIT)
    encoder = EncoderParams(
        layer1=_init_layer(rng, feature_dim, hidden_dim, hidden_dim),
        layer2=_init_layer(rng, hidden_dim, hidden_dim, hidden_dim),
    )
    dims = [hidden_dim] * decoder_layers + [feature_dim]
    layers = tuple(
        _init_layer(rng, dims[i], hidden_dim, dims[i + 1]) for i in range(decoder_layers)
    )
    decoder = DecoderParams(remask_token=np.zeros((1, hidden_dim)), layers=layers)
    return ModelParams(
        feature_dim=feature_dim,
        hidden_dim=hidden_dim,
        mask_token=np.zeros((1, feature_dim)),
        encoder=encoder,
        decoder=decoder,
    )


def _layer_items(prefix, layer):
    for field in ("eps", "w1", "b1", "w2", "b2"):
        yield f"{prefix}.{field}", getattr(layer, field)


def named_params(params):
    """Flat name -> array view of all learnables, in a fixed order."""
    out = {"mask_token": params.mask_token}
    out.update(_layer_items("encoder.layer1", params.encoder.layer1))
    out.update(_layer_items("encoder.layer2", params.encoder.layer2))
    out["decoder.remask_token"] = params.decoder.remask_token
    for i, layer in enumerate(params.decoder.layers):
        out.update(_layer_items(f"decoder.layer{i + 1}", layer))
    return out


def from_named(named, feature_dim, hidden_dim, decoder_layers):
    """Rebuild a ModelParams from the flat dict produced by named_params."""

    def layer(prefix):
        return GinLayerParams(*(named[f"{prefix}.{f}"] for f in ("eps", "w1", "b1", "w2", "b2")))

    return ModelParams(
        feature_dim=feature_dim,
        hidden_dim=hidden_dim,
        mask_token=named["mask_token"],
        encoder=EncoderParams(layer("encoder.layer1"), layer("encoder.layer2")),
        decoder=DecoderParams(
            remask_token=named["decoder.remask_token"],
            layers=tuple(layer(f"decoder.layer{i + 1}") for i in range(decoder_layers)),
        ),
    )


def bind(params, tape):
    """Track every learnable as a leaf on `tape`.

    Returns the same ModelParams structure holding leaf tensors, plus the
    flat name -> leaf dict used to pull gradients after backward().
    """
    leaves = {name: tape.leaf(arr) for name, arr in named_params(params).items()}
    bound = from_named(leaves, params.feature_dim, params.hidden_dim, len(params.decoder.layers))
    return bound, leaves


def gin_forward(layer, adj, h):
    """One GIN update: MLP((1 + eps) * h_i + sum over neighbors of h_j)."""
    pre = T.add(T.smul(T.add_const(layer.eps, 1.0), h), T.spmm_neighbors(adj, h))
    z = T.add_bias(T.matmul(pre, layer.w1), layer.b1)
    return T.add_bias(T.matmul(T.relu(z), layer.w2), layer.b2)


def encode(encoder, adj, x):
    """Node embeddings H and the sum-pooled graph vector F."""
    h = gin_forward(encoder.layer2, adj, gin_forward(encoder.layer1, adj, x))
    return h, T.row_sum(h)


def remask(h, masked_nodes, remask_token):
    """Replace encoded rows of masked nodes with the re-mask token."""
    return T.replace_rows(h, masked_nodes, remask_token)


def decode(decoder, adj, h_hat):
    out = h_hat
    for layer in decoder.layers:
        out = gin_forward(layer, adj, out)
    return out


@dataclass
class ViewOutputs:
    x_hat: Tensor2  # masked input actually fed to the encoder
    h: Tensor2  # node embeddings
    pooled: Tensor2  # 1 x hidden graph vector
    x_rec: Tensor2  # reconstructed features


def view_forward(p, view):
    """Mask substitution, encoding, re-mask, and decoding for one view.

    `p` may hold raw arrays (inference) or tape leaves (training); the mask
    and re-mask tokens are substituted here so gradients flow into them.
    """
    adj = to_csr(view.graph)
    x_hat = T.replace_rows(Tensor2(view.graph.features), view.masked_nodes, p.mask_token)
    h, pooled = encode(p.encoder, adj, x_hat)
    h_hat = remask(h, view.masked_nodes, p.decoder.remask_token)
    return ViewOutputs(x_hat, h, pooled, decode(p.decoder, adj, h_hat))


def embed_clean(params, g):
    """Inference-time embedding of the original graph: no masking, no dropping."""
    if g.feature_dim != params.feature_dim:
        raise DataError(
            f"graph {g.id!r} has feature_dim {g.feature_dim}, "
            f"model expects {params.feature_dim}"
        )
    _, pooled = encode(params.encoder, to_csr(g), Tensor2(g.features))
    return pooled.data[0].copy()
