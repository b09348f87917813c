"""Federated averaging over a two-layer MLP classifier.

Pure-numpy softmax cross-entropy network with one ReLU hidden layer,
minibatch SGD for local client epochs, and sample-count-weighted model
averaging. Transmitted parameter vectors can be impaired per the channel
state: additive white Gaussian noise scaled by 1/sqrt(snr), or packetized
erasures where a lost packet leaves the receiver's previous values.
"""

import math
from dataclasses import dataclass

import numpy as np

from .optical_link import LinkSample

PACKET_BITS_PER_PARAM = 32


@dataclass
class Dataset:
    """Feature matrix with integer class labels."""

    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {self.labels.shape}")
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )
        if self.n_classes < 2:
            raise ValueError(f"need at least 2 classes, got {self.n_classes}")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError("labels out of range for n_classes")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.features[indices], self.labels[indices], self.n_classes)


@dataclass
class ModelParams:
    """Layered weights and biases of the MLP."""

    weights: list
    biases: list

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must pair up layer by layer")
        for w, b in zip(self.weights, self.biases):
            if w.shape[1] != b.shape[0]:
                raise ValueError(f"bias shape {b.shape} mismatches weight {w.shape}")

    @property
    def arch(self) -> tuple:
        dims = [w.shape[0] for w in self.weights]
        dims.append(self.weights[-1].shape[1])
        return tuple(dims)

    @property
    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def from_flat(self, vec: np.ndarray) -> "ModelParams":
        """Rebuild a model with this one's shapes from a flat vector."""
        if vec.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} values, got shape {vec.shape}")
        weights, biases = [], []
        at = 0
        for w, b in zip(self.weights, self.biases):
            weights.append(vec[at : at + w.size].reshape(w.shape).copy())
            at += w.size
            biases.append(vec[at : at + b.size].reshape(b.shape).copy())
            at += b.size
        return ModelParams(weights, biases)

    def copy(self) -> "ModelParams":
        return ModelParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass(frozen=True)
class TrainConfig:
    """Local training hyperparameters shared by every client."""

    learning_rate: float = 0.1
    local_epochs: int = 2
    batch_size: int = 32
    hidden_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.local_epochs < 1:
            raise ValueError(f"local epochs must be >= 1, got {self.local_epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.hidden_size < 1:
            raise ValueError(f"hidden size must be >= 1, got {self.hidden_size}")


@dataclass(frozen=True)
class CorruptionSpec:
    """How transmitted parameter vectors are impaired."""

    kind: str = "none"
    awgn_scale: float = 1.0
    packet_bits: int = 8192

    def __post_init__(self):
        if self.kind not in ("none", "awgn", "packet"):
            raise ValueError(f"unknown corruption kind {self.kind!r}")
        if self.awgn_scale < 0.0:
            raise ValueError(f"awgn scale must be >= 0, got {self.awgn_scale}")
        if self.packet_bits < 1:
            raise ValueError(f"packet bits must be >= 1, got {self.packet_bits}")


@dataclass
class ClientState:
    """One participating satellite's shard and latest local model.

    last_upload is the edge's most recent received copy of this client's
    parameters, the fallback content for lost packets on the uplink.
    """

    sat: object
    shard: Dataset
    local_model: ModelParams = None
    last_upload: ModelParams = None


def init_model(
    n_features: int, hidden_size: int, n_classes: int, rng: np.random.Generator
) -> ModelParams:
    """Glorot-uniform weights, zero biases, layer by layer in order."""
    dims = (n_features, hidden_size, n_classes)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return ModelParams(weights, biases)


def _forward(model: ModelParams, x: np.ndarray):
    """Hidden activations and output logits for a batch."""
    h_pre = x @ model.weights[0] + model.biases[0]
    h = np.maximum(h_pre, 0.0)
    logits = h @ model.weights[1] + model.biases[1]
    return h, logits


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))

def local_loss(model: ModelParams, data: Dataset) -> float:
    """Mean cross-entropy of the model on the given samples."""
    if data.n_samples == 0:
        raise ValueError("cannot evaluate loss on an empty dataset")
    _, logits = _forward(model, data.features)
    log_p = _log_softmax(logits)
    return float(-log_p[np.arange(data.n_samples), data.labels].mean())


def _gradients(model: ModelParams, x: np.ndarray, y: np.ndarray):
    """Mean cross-entropy gradients for one minibatch."""
    n = x.shape[0]
    h, logits = _forward(model, x)
    log_p = _log_softmax(logits)
    delta_out = np.exp(log_p)
    delta_out[np.arange(n), y] -= 1.0
    delta_out /= n
    g_w1 = h.T @ delta_out
    g_b1 = delta_out.sum(axis=0)
    delta_h = (delta_out @ model.weights[1].T) * (h > 0.0)
    g_w0 = x.T @ delta_h
    g_b0 = delta_h.sum(axis=0)
    return [g_w0, g_w1], [g_b0, g_b1]


def sgd_epoch(
    model: ModelParams, data: Dataset, cfg: TrainConfig, rng: np.random.Generator
) -> ModelParams:
    """One pass over the data in shuffled minibatches; returns a new model."""
    order = rng.permutation(data.n_samples)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    current = ModelParams(weights, biases)
    for start in range(0, data.n_samples, cfg.batch_size):
        batch = order[start : start + cfg.batch_size]
        g_w, g_b = _gradients(current, data.features[batch], data.labels[batch])
        for layer in range(len(weights)):
            if not (np.isfinite(g_w[layer]).all() and np.isfinite(g_b[layer]).all()):
                raise FloatingPointError(
                    f"non-finite gradient in layer {layer} at batch offset {start}"
                )
            weights[layer] -= cfg.learning_rate * g_w[layer]
            biases[layer] -= cfg.learning_rate * g_b[layer]
    return current


def train_local(
    client: ClientState,
    w_global: ModelParams,
    cfg: TrainConfig,
    rng: np.random.Generator = None,
    epochs: int = None,
) -> ModelParams:
    """Local update: start from the global model, run E epochs on the shard."""
    n_epochs = cfg.local_epochs if epochs is None else epochs
    if n_epochs < 0:
        raise ValueError(f"epochs must be >= 0, got {n_epochs}")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    model = w_global.copy()
    for _ in range(n_epochs):
        model = sgd_epoch(model, client.shard, cfg, rng)
    return model


def aggregate(models: list, total_samples: int = None) -> ModelParams:
    """Sample-count-weighted average of local models.

    Weights are N_k over the participants' sample total unless total_samples
    pins the denominator to a fixed population size instead.
    """
    if not models:
        raise ValueError("cannot aggregate an empty participant list")
    denom = total_samples if total_samples is not None else sum(n for _, n in models)
    if denom <= 0:
        raise ValueError(f"aggregation denominator must be > 0, got {denom}")
    first = models[0][0]
    acc = first.from_flat(np.zeros(first.n_params))
    for model, n_k in models:
        if model.arch != first.arch:
            raise ValueError(f"architecture mismatch: {model.arch} vs {first.arch}")
        scale = n_k / denom
        for layer in range(len(acc.weights)):
            acc.weights[layer] += scale * model.weights[layer]
            acc.biases[layer] += scale * model.biases[layer]
    return acc


def evaluate(model: ModelParams, test: Dataset) -> tuple:
    """(top-1 accuracy, mean cross-entropy) on the test set.

    Argmax ties resolve to the lowest class index.
    """
    if test.n_samples == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    _, logits = _forward(model, test.features)
    predicted = np.argmax(logits, axis=1)
    log_p = _log_softmax(logits)
    loss = float(-log_p[np.arange(test.n_samples), test.labels].mean())
    return float((predicted == test.labels).mean()), loss


def partition_data(
    full: Dataset, clients: list, samples_per_client: int, rng: np.random.Generator
) -> dict:
    """Draw one shard per client, sequentially in the given client order.

    Each shard samples without replacement; different clients may overlap.
    """
    if not clients:
        raise ValueError("need at least one client")
    if samples_per_client > full.n_samples:
        raise ValueError(
            f"shard size {samples_per_client} exceeds dataset size {full.n_samples}"
        )
    shards = {}
    for client in clients:
        picks = rng.choice(full.n_samples, size=samples_per_client, replace=False)
        shards[client] = full.subset(picks)
    return shards


def corrupt_vector(
    vec: np.ndarray,
    link: LinkSample,
    spec: CorruptionSpec,
    rng: np.random.Generator,
    prev: np.ndarray = None,
) -> np.ndarray:
    """Impair one transmitted vector according to the link realization.

    'none' passes through. 'awgn' adds white noise with SD awgn_scale/sqrt(snr).
    'packet' splits the vector into packets of packet_bits and replaces each
    lost one with the receiver's previous values (zeros when there are none).
    """
    vec = np.asarray(vec, dtype=np.float64)
    if spec.kind == "none":
        return vec.copy()
    if spec.kind == "awgn":
        if link.snr_linear <= 0.0:
            raise ValueError(f"awgn corruption needs snr > 0, got {link.snr_linear}")
        sd = spec.awgn_scale / math.sqrt(link.snr_linear)
        return vec + rng.normal(0.0, sd, size=vec.shape)
    # packet erasures
    if prev is None:
        prev = np.zeros_like(vec)
    elif prev.shape != vec.shape:
        raise ValueError(f"prev shape {prev.shape} mismatches vector {vec.shape}")
    params_per_packet = max(1, spec.packet_bits // PACKET_BITS_PER_PARAM)
    n_packets = math.ceil(vec.size / params_per_packet)
    p_fail = 1.0 - (1.0 - link.ber) ** spec.packet_bits
    lost = rng.random(n_packets) < p_fail
    out = vec.copy()
    for i in np.nonzero(lost)[0]:
        lo = i * params_per_packet
        hi = min(lo + params_per_packet, vec.size)
        out[lo:hi] = prev[lo:hi]
    return out


def corrupt_model(
    model: ModelParams,
    link: LinkSample,
    spec: CorruptionSpec,
    rng: np.random.Generator,
    prev: ModelParams = None,
) -> ModelParams:
    """Apply corrupt_vector to a model's flattened parameters."""
    prev_vec = prev.flat() if prev is not None else None
    return model.from_flat(corrupt_vector(model.flat(), link, spec, rng, prev=prev_vec))
