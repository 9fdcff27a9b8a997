from .layers import (DenseSpec, GraphBatch, GraphLayerSpec, NetworkSpec, QNetwork,
                     default_spec, dense_forward, gat_layer_forward, huber_loss,
                     mask_scores, s2v_layer_forward)
from .params import Adam, ParameterStore, glorot_init, load_parameters, save_parameters
from .tensor import Segments, Tensor, backward, no_grad

__all__ = [
    "Adam", "DenseSpec", "GraphBatch", "GraphLayerSpec", "NetworkSpec",
    "ParameterStore", "QNetwork", "Segments", "Tensor", "backward",
    "default_spec", "dense_forward", "gat_layer_forward", "glorot_init",
    "huber_loss", "load_parameters", "mask_scores", "no_grad",
    "s2v_layer_forward", "save_parameters",
]
