"""Small feedforward classifier, written from scratch on numpy.

Hidden layers are ReLU; the output layer is sigmoid, the shifted sine
0.5 + 0.5*sin(z), or softmax. Training is plain mini-batch SGD on
cross-entropy against one-hot labels (per-class binary cross-entropy for
the sigmoid-family outputs, categorical for softmax). Everything is
deterministic given the seed: weight init and batch order both come from
one PCG64 stream.
"""

from pathlib import Path
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from modlearn._validation import MAX_VALUE, check_labels, check_matrix
from modlearn.encoders import check_kind

OUTPUT_ACTIVATIONS = ("sigmoid", "sine_shift", "softmax")

_CLIP = 1e-12


def input_scale(kind):
    """Feature scale applied before MLP training: raw x / 2**32, digits / 9."""
    check_kind(kind)
    if kind == "raw":
        return 1.0 / MAX_VALUE
    return 1.0 / 9.0


class EpochStats(NamedTuple):
    epoch: int
    loss: float
    val_accuracy: float


def _relu(z):
    return np.maximum(z, 0.0)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z):
    shifted = z - z.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


def _one_hot(y, n_classes):
    out = np.zeros((y.size, n_classes))
    out[np.arange(y.size), y] = 1.0
    return out


class MlpClassifier(BaseEstimator, ClassifierMixin):
    """ReLU feedforward network trained by mini-batch SGD.

    Parameters
    ----------
    hidden : sizes of the hidden layers; () gives a single linear layer
        followed by the output activation.
    output_activation : "sigmoid", "sine_shift" or "softmax".
    validation_fraction : tail fraction of the fit data held out for the
        per-epoch validation accuracy when no explicit validation set is
        passed to :meth:`fit`.
    n_classes : fixed output width; None infers max(y) + 1.

    The defaults (learning_rate 0.05, batch_size 64, epochs 60) are artifact
    constants chosen so the benchmark thresholds are met; they carry no
    outside meaning.
    """

    def __init__(self, hidden=(64, 32), output_activation="sigmoid", learning_rate=0.05,
                 epochs=60, batch_size=64, seed=0, validation_fraction=0.1, n_classes=None):
        self.hidden = hidden
        self.output_activation = output_activation
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.validation_fraction = validation_fraction
        self.n_classes = n_classes

    # -- construction ------------------------------------------------------

    def _init_params(self, input_dim, n_classes, rng):
        dims = [int(input_dim), *[int(h) for h in self.hidden], int(n_classes)]
        if any(d <= 0 for d in dims):
            raise ValueError(f"all layer dimensions must be positive, got {dims}")
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        self.weights_ = weights
        self.biases_ = biases
        self.input_dim_ = dims[0]
        self.n_classes_ = dims[-1]
        self.classes_ = np.arange(dims[-1])

    def initialize(self, input_dim, n_classes):
        """Set untrained weights deterministically from the seed; returns self."""
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        self._init_params(input_dim, n_classes, np.random.Generator(np.random.PCG64(self.seed)))
        return self

    # -- forward / loss ----------------------------------------------------

    def _trace(self, X):
        """Pre-activations and activations of every layer."""
        zs, acts = [], [X]
        a = X
        for i, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            z = a @ W + b
            zs.append(z)
            if i < len(self.weights_) - 1:
                a = _relu(z)
            elif self.output_activation == "sigmoid":
                a = _sigmoid(z)
            elif self.output_activation == "sine_shift":
                a = 0.5 + 0.5 * np.sin(z)
            else:
                a = _softmax(z)
            acts.append(a)
        return zs, acts

    def forward(self, X):
        """Output-layer activations, one row per sample, entries in [0, 1]."""
        self._check_fitted()
        X = check_matrix(X, name="X")
        if X.shape[1] != self.input_dim_:
            raise ValueError(f"dimension mismatch: expected {self.input_dim_} features, got {X.shape[1]}")
        return self._trace(X)[1][-1]

    def _loss_and_output_grad(self, z_out, targets):
        """Mean-over-batch loss and dL/dz at the output layer."""
        batch = z_out.shape[0]
        if self.output_activation == "sigmoid":
            # binary cross-entropy from logits: softplus(z) - t*z, exactly
            loss = np.sum(np.logaddexp(0.0, z_out) - targets * z_out) / batch
            grad = (_sigmoid(z_out) - targets) / batch
        elif self.output_activation == "sine_shift":
            s = np.clip(0.5 + 0.5 * np.sin(z_out), _CLIP, 1.0 - _CLIP)
            loss = -np.sum(targets * np.log(s) + (1.0 - targets) * np.log(1.0 - s)) / batch
            grad = ((s - targets) / (s * (1.0 - s))) * (0.5 * np.cos(z_out)) / batch
        else:
            shifted = z_out - z_out.max(axis=1, keepdims=True)
            log_probs = shifted - np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
            loss = -np.sum(targets * log_probs) / batch
            grad = (np.exp(log_probs) - targets) / batch
        return float(loss), grad

    def _loss_and_grads(self, X, targets):
        zs, acts = self._trace(X)
        loss, delta = self._loss_and_output_grad(zs[-1], targets)
        grads_w = [None] * len(self.weights_)
        grads_b = [None] * len(self.weights_)
        for layer in range(len(self.weights_) - 1, -1, -1):
            grads_w[layer] = acts[layer].T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights_[layer].T) * (zs[layer - 1] > 0.0)
        return loss, grads_w, grads_b

    def _loss(self, X, targets):
        zs, _ = self._trace(X)
        return self._loss_and_output_grad(zs[-1], targets)[0]

    # -- training ----------------------------------------------------------

    def fit(self, X, y, validation_data=None):
        """Train with mini-batch SGD; per-epoch loss and validation accuracy
        land in ``training_history_``.

        When ``validation_data`` is given the model trains on all of (X, y)
        and scores that set each epoch; otherwise the trailing
        ``validation_fraction`` of the rows is held out.
        """
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        X = check_matrix(X, name="X")
        n_classes = self.n_classes
        if n_classes is None:
            n_classes = max(2, int(np.max(np.asarray(y))) + 1)
        y = check_labels(y, n_classes=n_classes)
        if y.size != X.shape[0]:
            raise ValueError(f"dimension mismatch: {X.shape[0]} rows vs {y.size} labels")

        fraction = 0.0 if self.validation_fraction is None else float(self.validation_fraction)
        if not 0.0 <= fraction < 1.0:
            raise ValueError(f"validation_fraction must lie in [0, 1), got {fraction}")
        if validation_data is not None:
            X_val = check_matrix(validation_data[0], name="X_val")
            y_val = check_labels(validation_data[1], n_classes=n_classes, name="y_val")
            X_train, y_train = X, y
        elif fraction > 0.0:
            cut = X.shape[0] - int(np.floor(fraction * X.shape[0]))
            if cut == 0 or cut == X.shape[0]:
                raise ValueError("validation_fraction leaves an empty side")
            X_train, y_train = X[:cut], y[:cut]
            X_val, y_val = X[cut:], y[cut:]
        else:
            X_train, y_train = X, y
            X_val = y_val = None

        rng = np.random.Generator(np.random.PCG64(self.seed))
        self._init_params(X.shape[1], n_classes, rng)
        targets = _one_hot(y_train, n_classes)

        lr = float(self.learning_rate)
        batch_size = int(self.batch_size)
        history = []
        for epoch in range(int(self.epochs)):
            order = rng.permutation(X_train.shape[0])
            for start in range(0, order.size, batch_size):
                idx = order[start:start + batch_size]
                _, grads_w, grads_b = self._loss_and_grads(X_train[idx], targets[idx])
                for layer in range(len(self.weights_)):
                    self.weights_[layer] -= lr * grads_w[layer]
                    self.biases_[layer] -= lr * grads_b[layer]
            loss = self._loss(X_train, targets)
            if X_val is not None and X_val.shape[0] > 0:
                val_acc = float(np.mean(self._predict_unchecked(X_val) == y_val))
            else:
                val_acc = float("nan")
            history.append(EpochStats(epoch=epoch, loss=loss, val_accuracy=val_acc))
        self.training_history_ = history
        return self

    # -- inference ---------------------------------------------------------

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise ValueError("model is not fitted")

    def _predict_unchecked(self, X):
        return np.argmax(self._trace(X)[1][-1], axis=1)

    def predict(self, X):
        self._check_fitted()
        X = check_matrix(X, name="X")
        if X.shape[1] != self.input_dim_:
            raise ValueError(f"dimension mismatch: expected {self.input_dim_} features, got {X.shape[1]}")
        return self._predict_unchecked(X)

    # -- persistence -------------------------------------------------------

    def to_text(self):
        self._check_fitted()
        lines = [
            "model=mlp",
            "hidden=" + ",".join(str(int(h)) for h in self.hidden),
            f"output_activation={self.output_activation}",
            f"learning_rate={float(self.learning_rate):.17g}",
            f"epochs={int(self.epochs)}",
            f"batch_size={int(self.batch_size)}",
            f"seed={int(self.seed)}",
            f"validation_fraction={float(self.validation_fraction):.17g}",
            f"input_dim={self.input_dim_}",
            f"n_classes={self.n_classes_}",
        ]
        for i, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            lines.append(f"layer{i}.weights=" + ",".join(f"{v:.17g}" for v in W.ravel()))
            lines.append(f"layer{i}.biases=" + ",".join(f"{v:.17g}" for v in b))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        fields = {}
        for line in text.strip().splitlines():
            key, value = line.split("=", 1)
            fields[key] = value
        if fields.get("model") != "mlp":
            raise ValueError("not an mlp model file")
        hidden = tuple(int(v) for v in fields["hidden"].split(",")) if fields["hidden"] else ()
        model = cls(
            hidden=hidden,
            output_activation=fields["output_activation"],
            learning_rate=float(fields["learning_rate"]),
            epochs=int(fields["epochs"]),
            batch_size=int(fields["batch_size"]),
            seed=int(fields["seed"]),
            validation_fraction=float(fields["validation_fraction"]),
            n_classes=int(fields["n_classes"]),
        )
        input_dim = int(fields["input_dim"])
        n_classes = int(fields["n_classes"])
        dims = [input_dim, *hidden, n_classes]
        weights, biases = [], []
        for i, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
            w = np.array([float(v) for v in fields[f"layer{i}.weights"].split(",")])
            weights.append(w.reshape(fan_in, fan_out))
            biases.append(np.array([float(v) for v in fields[f"layer{i}.biases"].split(",")]))
        model.weights_ = weights
        model.biases_ = biases
        model.input_dim_ = input_dim
        model.n_classes_ = n_classes
        model.classes_ = np.arange(n_classes)
        return model

    def write_history_csv(self, path):
        self._check_fitted()
        if not hasattr(self, "training_history_"):
            raise ValueError("model has no training history")
        lines = ["epoch,loss,val_accuracy"]
        for row in self.training_history_:
            lines.append(f"{row.epoch},{row.loss:.17g},{row.val_accuracy:.17g}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def gradient_check(model, x, label, n_samples=120, step=1e-5, seed=0):
    """Max relative error between backprop and central finite differences.

    Perturbs a seeded sample of at least ``n_samples`` parameter coordinates
    (all of them when the model is smaller) on the single-example loss.
    """
    model._check_fitted()
    X = check_matrix(np.asarray(x, dtype=np.float64).reshape(1, -1), name="x")
    targets = _one_hot(check_labels(np.array([label]), n_classes=model.n_classes_), model.n_classes_)

    _, grads_w, grads_b = model._loss_and_grads(X, targets)
    params = [(kind, layer) for layer in range(len(model.weights_)) for kind in ("W", "b")]
    coords = []
    for kind, layer in params:
        arr = model.weights_[layer] if kind == "W" else model.biases_[layer]
        coords.extend((kind, layer, i) for i in range(arr.size))
    rng = np.random.Generator(np.random.PCG64(seed))
    if len(coords) > n_samples:
        picked = [coords[i] for i in rng.choice(len(coords), size=n_samples, replace=False)]
    else:
        picked = coords

    worst = 0.0
    for kind, layer, flat in picked:
        arr = model.weights_[layer] if kind == "W" else model.biases_[layer]
        grad = grads_w[layer] if kind == "W" else grads_b[layer]
        index = np.unravel_index(flat, arr.shape)
        original = arr[index]
        arr[index] = original + step
        up = model._loss(X, targets)
        arr[index] = original - step
        down = model._loss(X, targets)
        arr[index] = original
        numeric = (up - down) / (2.0 * step)
        analytic = grad[index]
        scale = max(abs(numeric), abs(analytic), 1e-8)
        worst = max(worst, abs(numeric - analytic) / scale)
    return worst
