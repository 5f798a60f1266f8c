"""One-vs-rest linear SVM trained by dual coordinate descent.

L2-regularized L1-hinge formulation; each binary subproblem sweeps the dual
variables in a seeded random permutation per epoch and stops once the duality
gap drops below tolerance.  The bias is an appended constant feature.
"""

import json
from dataclasses import dataclass

import numpy as np
from numba import njit

from .rng import substream


class ModelError(ValueError):
    """Invalid training input or model/embedding mismatch."""


@njit(cache=True)
def _dual_cd(x, y, c, max_epochs, tol, seed):
    """Binary L1-hinge dual coordinate descent.

    Returns (w, dual_objective_per_epoch, epochs_run).  The dual objective is
    non-decreasing by construction (each coordinate step is an exact
    one-dimensional maximization).
    """
    n, dim = x.shape
    w = np.zeros(dim)
    alpha = np.zeros(n)
    qdiag = np.empty(n)
    for i in range(n):
        s = 0.0
        for k in range(dim):
            s += x[i, k] * x[i, k]
        qdiag[i] = s
    np.random.seed(seed)
    idx = np.arange(n)
    trace = np.zeros(max_epochs)
    epochs = 0
    for epoch in range(max_epochs):
        np.random.shuffle(idx)
        for t in range(n):
            i = idx[t]
            if qdiag[i] <= 0.0:
                continue
            g = y[i] * np.dot(x[i], w) - 1.0
            a_old = alpha[i]
            a_new = a_old - g / qdiag[i]
            if a_new < 0.0:
                a_new = 0.0
            elif a_new > c:
                a_new = c
            if a_new != a_old:
                step = (a_new - a_old) * y[i]
                for k in range(dim):
                    w[k] += step * x[i, k]
                alpha[i] = a_new
        wnorm = 0.0
        for k in range(dim):
            wnorm += w[k] * w[k]
        dual = alpha.sum() - 0.5 * wnorm
        hinge = 0.0
        for i in range(n):
            m = 1.0 - y[i] * np.dot(x[i], w)
            if m > 0.0:
                hinge += m
        primal = 0.5 * wnorm + c * hinge
        trace[epoch] = dual
        epochs = epoch + 1
        if primal - dual <= tol:
            break
    return w, trace[:epochs], epochs


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray  # num_classes x R
    bias: np.ndarray  # num_classes
    reg_c: float
    classes: tuple  # label names, position = class id

    @property
    def r(self):
        return self.weights.shape[1]

    def scores(self, values):
        return values @ self.weights.T + self.bias

    def predict(self, values):
        """Argmax over per-class scores; ties break toward the lowest class
        index."""
        if values.shape[1] != self.r:
            raise ModelError(f"embedding has {values.shape[1]} columns but model expects {self.r}")
        return np.argmax(self.scores(values), axis=1)

    def save(self, path, header_lines=()):
        with open(path, "w", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"strembed-model v1 classes={len(self.classes)} R={self.r} reg_c={self.reg_c!r}\n")
            fh.write(" ".join(str(c) for c in self.classes) + "\n")
            for ci in range(len(self.classes)):
                row = " ".join("%.17g" % v for v in self.weights[ci])
                fh.write("%.17g %s\n" % (self.bias[ci], row))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
        tokens = lines[0].split()
        if tokens[0] != "strembed-model" or tokens[1] != "v1":
            raise ModelError(f"{path}: not a strembed-model v1 file")
        kv = dict(t.split("=", 1) for t in tokens[2:])
        num_classes, r = int(kv["classes"]), int(kv["R"])
        classes = tuple(lines[1].split())
        weights = np.empty((num_classes, r))
        bias = np.empty(num_classes)
        for ci in range(num_classes):
            vals = [float(v) for v in lines[2 + ci].split()]
            bias[ci] = vals[0]
            weights[ci] = vals[1:]
        return cls(weights=weights, bias=bias, reg_c=float(kv["reg_c"]), classes=classes)


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    per_class_accuracy: tuple
    confusion: np.ndarray  # [true, predicted] counts
    classes: tuple

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "per_class_accuracy": list(self.per_class_accuracy),
            "confusion": self.confusion.tolist(),
            "classes": list(self.classes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def train(embedding, labels, reg_c=1.0, epochs=1000, seed=0, tol=1e-4, classes=None):
    """Fit a one-vs-rest model on an embedding matrix.

    `labels` are dense 0-based class ids; `classes` optionally carries the
    original label tokens for reporting.
    """
    labels = np.asarray(labels, dtype=np.int64)
    values = embedding if isinstance(embedding, np.ndarray) else embedding.values
    present = np.unique(labels)
    if len(present) < 2:
        raise ModelError("training set contains a single class")
    if reg_c <= 0:
        raise ModelError(f"reg_c must be > 0, got {reg_c}")
    num_classes = int(labels.max()) + 1
    if classes is None:
        classes = tuple(range(num_classes))

    x = np.ascontiguousarray(np.hstack([values, np.ones((values.shape[0], 1))]))
    weights = np.zeros((num_classes, values.shape[1]))
    bias = np.zeros(num_classes)
    for ci in range(num_classes):
        y = np.where(labels == ci, 1.0, -1.0)
        class_seed = int(substream(seed, "svm", ci).integers(0, 2**31 - 1))
        w, _, _ = _dual_cd(x, y, reg_c, epochs, tol, class_seed)
        weights[ci] = w[:-1]
        bias[ci] = w[-1]
    return LinearModel(weights=weights, bias=bias, reg_c=reg_c, classes=tuple(classes))


def solve_binary(values, y, reg_c, epochs=1000, tol=1e-4, seed=0):
    """Single binary subproblem, exposing the per-epoch dual objective trace
    (used by solver diagnostics and tests)."""
    x = np.ascontiguousarray(np.hstack([values, np.ones((values.shape[0], 1))]))
    w, trace, epochs_run = _dual_cd(x, np.asarray(y, dtype=np.float64), reg_c, epochs, tol, seed)
    return w, trace, epochs_run


def evaluate(model, embedding, labels):
    """Accuracy, per-class accuracy, and the confusion matrix on a test
    embedding."""
    values = embedding if isinstance(embedding, np.ndarray) else embedding.values
    labels = np.asarray(labels, dtype=np.int64)
    pred = model.predict(values)
    num_classes = len(model.classes)
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    for t, p in zip(labels, pred):
        confusion[t, p] += 1
    accuracy = float((pred == labels).mean())
    per_class = []
    for ci in range(num_classes):
        total = confusion[ci].sum()
        per_class.append(float(confusion[ci, ci] / total) if total else 0.0)
    return EvalReport(
        accuracy=accuracy,
        per_class_accuracy=tuple(per_class),
        confusion=confusion,
        classes=model.classes,
    )


def cross_validate(ds, strategy, grid, folds=3, r=512, map_kind="sf", epochs=200, seed=0):
    """Grid-search (gamma, d_max, reg_c) by k-fold accuracy on the training
    partition.

    Each fold rebuilds the reference bank from that fold's training strings so
    data-dependent strategies never see the held-out fold.  Returns
    (best_config_dict, results_list); deterministic given the seed.
    """
    from .data import SequenceDataset
    from .distance import FeatureParams
    from .embedding import embed
    from .sampler import SamplerConfig, build_bank

    if folds < 2:
        raise ModelError(f"folds must be >= 2, got {folds}")
    gammas = list(grid.get("gamma", [1.0]))
    d_maxes = list(grid.get("d_max", [10]))
    reg_cs = list(grid.get("reg_c", [1.0]))
    if not gammas or not d_maxes or not reg_cs:
        raise ModelError("hyperparameter grid is empty")

    records = list(ds.train)
    order = substream(seed, "cv").permutation(len(records))
    fold_of = np.arange(len(records)) % folds

    results = []
    best = None
    for d_max in d_maxes:
        for gamma in gammas:
            for reg_c in reg_cs:
                accs = []
                for k in range(folds):
                    tr = [records[i] for i, f in zip(order, fold_of) if f != k]
                    va = [records[i] for i, f in zip(order, fold_of) if f == k]
                    fold_ds = SequenceDataset(
                        alphabet=ds.alphabet, train=tuple(tr), test=(), label_names=ds.label_names
                    )
                    bank = build_bank(
                        fold_ds,
                        SamplerConfig(strategy=strategy, d_max=min(d_max, fold_ds.max_length), seed=seed),
                        r,
                    )
                    params = FeatureParams(map_kind=map_kind, gamma=gamma)
                    ztr = embed([x.text for x in tr], bank, params)
                    zva = embed([x.text for x in va], bank, params)
                    model = train(
                        ztr, [x.label for x in tr], reg_c=reg_c, epochs=epochs, seed=seed, classes=ds.label_names
                    )
                    accs.append(evaluate(model, zva, [x.label for x in va]).accuracy)
                mean_acc = float(np.mean(accs))
                entry = {"gamma": gamma, "d_max": d_max, "reg_c": reg_c, "mean_accuracy": mean_acc}
                results.append(entry)
                if best is None or mean_acc > best["mean_accuracy"]:
                    best = entry
    return best, results
