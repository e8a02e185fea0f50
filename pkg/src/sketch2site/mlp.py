"""Container classification: a two-branch feedforward network.

One branch reads the container's page-relative geometry, the other the
flattened one-hot classes of its leaf descendants; a merge head turns
the concatenation into probabilities over the five container classes.
Training is minibatch Adam on categorical cross-entropy with early
stopping on validation accuracy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import ContainerClass, ElementClass, LayoutNode, copy_tree

CONTAINER_ORDER = (
    ContainerClass.ROW,
    ContainerClass.STACK,
    ContainerClass.FORM,
    ContainerClass.HEADER,
    ContainerClass.FOOTER,
)
ELEMENT_ORDER = tuple(ElementClass)

CHILD_SLOTS = 50
CHILD_CLASSES = 6  # five element classes + null padding
GEOM_SIZE = 4
CHILD_SIZE = CHILD_SLOTS * CHILD_CLASSES

HIDDEN_GEOM = 32
HIDDEN_CHILD = 128
HIDDEN_MERGE = 64
N_CLASSES = len(CONTAINER_ORDER)


class CheckpointError(ValueError):
    """Checkpoint file malformed or incompatible."""


@dataclass
class ContainerFeatures:
    geom: np.ndarray      # (4,) x, y, w, h
    children: np.ndarray  # (50, 6) one-hot rows

    def flat_children(self) -> np.ndarray:
        return self.children.reshape(-1)


def featurize(node: LayoutNode) -> ContainerFeatures:
    """Geometry plus the classes of leaf descendants in reading order.

    Reading order uses banded rows (2% of the page) so a pixel of
    detection jitter cannot reshuffle slot assignments between siblings
    that sit on one line.
    """
    if node.is_leaf:
        raise ValueError("featurize expects a container node, got a leaf")
    geom = np.array([node.box.x, node.box.y, node.box.w, node.box.h], dtype=np.float64)
    children = np.zeros((CHILD_SLOTS, CHILD_CLASSES), dtype=np.float64)
    children[:, CHILD_CLASSES - 1] = 1.0  # null padding
    leaves = [n for n in node.walk() if n is not node and n.is_leaf]
    leaves.sort(key=lambda n: (int(n.box.y / 0.02), n.box.x))
    for slot, leaf in enumerate(leaves[:CHILD_SLOTS]):
        children[slot] = 0.0
        children[slot, ELEMENT_ORDER.index(leaf.label)] = 1.0
    return ContainerFeatures(geom=geom, children=children)


@dataclass
class MlpParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    w4: np.ndarray
    b4: np.ndarray

    _SHAPES = {
        "w1": (GEOM_SIZE, HIDDEN_GEOM),
        "b1": (HIDDEN_GEOM,),
        "w2": (CHILD_SIZE, HIDDEN_CHILD),
        "b2": (HIDDEN_CHILD,),
        "w3": (HIDDEN_GEOM + HIDDEN_CHILD, HIDDEN_MERGE),
        "b3": (HIDDEN_MERGE,),
        "w4": (HIDDEN_MERGE, N_CLASSES),
        "b4": (N_CLASSES,),
    }

    def __post_init__(self):
        for name, shape in self._SHAPES.items():
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            setattr(self, name, arr)

    def arrays(self):
        return [(name, getattr(self, name)) for name in self._SHAPES]

    def copy(self) -> "MlpParams":
        return MlpParams(**{name: arr.copy() for name, arr in self.arrays()})

    def check_finite(self) -> None:
        for name, arr in self.arrays():
            if not np.isfinite(arr).all():
                raise ValueError(f"non-finite values in parameter {name}")

    @classmethod
    def init(cls, seed: int = 0) -> "MlpParams":
        rng = np.random.default_rng(seed)
        values = {}
        for name, shape in cls._SHAPES.items():
            if name.startswith("w"):
                fan_in = shape[0]
                values[name] = rng.normal(0.0, np.sqrt(2.0 / fan_in), shape)
            else:
                values[name] = np.zeros(shape)
        return cls(**values)

    @classmethod
    def zeros(cls) -> "MlpParams":
        return cls(**{name: np.zeros(shape) for name, shape in cls._SHAPES.items()})


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _forward_batch(p: MlpParams, geom: np.ndarray, child: np.ndarray):
    z1 = geom @ p.w1 + p.b1
    a1 = np.maximum(z1, 0.0)
    z2 = child @ p.w2 + p.b2
    a2 = np.maximum(z2, 0.0)
    merged = np.concatenate([a1, a2], axis=1)
    z3 = merged @ p.w3 + p.b3
    a3 = np.maximum(z3, 0.0)
    logits = a3 @ p.w4 + p.b4
    return _softmax(logits), (z1, z2, merged, z3, a3)


def forward(p: MlpParams, features: ContainerFeatures) -> np.ndarray:
    """Probability 5-vector over (row, stack, form, header, footer)."""
    p.check_finite()
    probs, _ = _forward_batch(p, features.geom[None, :], features.flat_children()[None, :])
    return probs[0]


def loss_and_grads(p: MlpParams, geom: np.ndarray, child: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy and gradients for a batch of label indices."""
    n = len(labels)
    probs, (z1, z2, merged, z3, a3) = _forward_batch(p, geom, child)
    eps = 1e-12
    loss = -np.log(probs[np.arange(n), labels] + eps).mean()

    dlogits = probs.copy()
    dlogits[np.arange(n), labels] -= 1.0
    dlogits /= n

    grads = MlpParams.zeros()
    grads.w4 = a3.T @ dlogits
    grads.b4 = dlogits.sum(axis=0)
    da3 = dlogits @ p.w4.T
    dz3 = da3 * (z3 > 0)
    grads.w3 = merged.T @ dz3
    grads.b3 = dz3.sum(axis=0)
    dmerged = dz3 @ p.w3.T
    dz1 = dmerged[:, :HIDDEN_GEOM] * (z1 > 0)
    dz2 = dmerged[:, HIDDEN_GEOM:] * (z2 > 0)
    grads.w1 = geom.T @ dz1
    grads.b1 = dz1.sum(axis=0)
    grads.w2 = child.T @ dz2
    grads.b2 = dz2.sum(axis=0)
    return loss, grads


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 120
    patience: int = 3
    val_fraction: float = 0.2
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("learning rate and batch size must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


def _to_matrices(data):
    geom = np.stack([f.geom for f, _ in data])
    child = np.stack([f.flat_children() for f, _ in data])
    labels = np.array([CONTAINER_ORDER.index(lbl) for _, lbl in data], dtype=np.int64)
    return geom, child, labels


def train(data, cfg: TrainConfig | None = None):
    """(best-validation params, per-epoch history) for labeled features."""
    cfg = cfg or TrainConfig()
    if not data:
        raise ValueError("training data is empty")
    labels_present = {lbl for _, lbl in data}
    if len(labels_present) < 2:
        raise ValueError("training data must contain at least 2 classes")

    geom, child, labels = _to_matrices(data)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(labels))
    n_val = max(1, int(round(len(labels) * cfg.val_fraction)))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        raise ValueError("no training samples left after the validation split")

    params = MlpParams.init(cfg.seed)
    m = MlpParams.zeros()
    v = MlpParams.zeros()
    step = 0
    best = params.copy()
    best_acc = -1.0
    stale = 0
    history = []

    for epoch in range(cfg.max_epochs):
        idx = rng.permutation(train_idx) if cfg.shuffle else train_idx
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(idx), cfg.batch_size):
            batch = idx[start : start + cfg.batch_size]
            loss, grads = loss_and_grads(params, geom[batch], child[batch], labels[batch])
            epoch_loss += loss
            n_batches += 1
            step += 1
            for name, arr in params.arrays():
                g = getattr(grads, name)
                m_arr = getattr(m, name)
                v_arr = getattr(v, name)
                m_arr *= cfg.beta1
                m_arr += (1 - cfg.beta1) * g
                v_arr *= cfg.beta2
                v_arr += (1 - cfg.beta2) * g * g
                m_hat = m_arr / (1 - cfg.beta1**step)
                v_hat = v_arr / (1 - cfg.beta2**step)
                arr -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)

        val_probs, _ = _forward_batch(params, geom[val_idx], child[val_idx])
        val_acc = float((val_probs.argmax(axis=1) == labels[val_idx]).mean())
        history.append(
            {"epoch": epoch, "train_loss": float(epoch_loss / max(n_batches, 1)), "val_acc": val_acc}
        )
        if val_acc > best_acc:
            best_acc = val_acc
            best = params.copy()
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    return best, history


def accuracy(params: MlpParams, data) -> float:
    geom, child, labels = _to_matrices(data)
    probs, _ = _forward_batch(params, geom, child)
    return float((probs.argmax(axis=1) == labels).mean())


def classify_tree(params: MlpParams, tree: LayoutNode) -> LayoutNode:
    """Label every non-root branch with the argmax container class."""
    params.check_finite()
    out = copy_tree(tree)
    for node in out.walk():
        if node is out or node.is_leaf:
            continue
        probs = forward(params, featurize(node))
        node.label = CONTAINER_ORDER[int(probs.argmax())]
    return out


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

_FORMAT = "sketch2site-container-mlp"
_VERSION = 1


def save_checkpoint(params: MlpParams, path) -> None:
    payload = {
        "format": _FORMAT,
        "version": _VERSION,
        "classes": [c.value for c in CONTAINER_ORDER],
        "weights": {
            name: {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}
            for name, arr in params.arrays()
        },
    }
    Path(path).write_text(json.dumps(payload))


def load_checkpoint(path) -> MlpParams:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise CheckpointError(f"cannot read checkpoint: {err}") from err
    if payload.get("format") != _FORMAT:
        raise CheckpointError(f"not a container-net checkpoint: {payload.get('format')!r}")
    if payload.get("version") != _VERSION:
        raise CheckpointError(f"unsupported checkpoint version {payload.get('version')!r}")
    if payload.get("classes") != [c.value for c in CONTAINER_ORDER]:
        raise CheckpointError("checkpoint class order does not match this build")
    values = {}
    for name, shape in MlpParams._SHAPES.items():
        entry = payload.get("weights", {}).get(name)
        if entry is None:
            raise CheckpointError(f"checkpoint is missing weight {name}")
        arr = np.asarray(entry["data"], dtype=np.float64)
        if tuple(entry["shape"]) != shape or arr.size != int(np.prod(shape)):
            raise CheckpointError(f"weight {name} has wrong shape {entry['shape']}, want {shape}")
        values[name] = arr.reshape(shape)
    params = MlpParams(**values)
    params.check_finite()
    return params
