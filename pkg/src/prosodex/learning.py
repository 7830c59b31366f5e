"""Feature ranking and binary classification under leave-one-out folds.

Features are ranked by normalized mutual information against the labels
after equal-frequency binning.  The five classifiers are written out in
full here: a Fisher discriminant, a small random forest, K nearest
neighbors, a linear margin classifier trained by the Pegasos schedule,
and a one-hidden-layer network.  Every stochastic component draws from
an explicit seed, so a full evaluation is reproducible bit for bit.

Fold hygiene: standardization, ranking, and training all see only the
training rows of a fold; the held-out row passes through the fitted
transforms.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, TrainError
from .features import apply_standardizer, fit_standardizer

CLASSIFIER_KINDS = ("lda", "rf", "knn", "svm", "mlp")


@dataclass
class Dataset:
    matrix: np.ndarray
    labels: list
    feature_names: list
    doc_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise DomainError("matrix must be two-dimensional")
        if len(self.labels) != self.matrix.shape[0]:
            raise DomainError("one label per row required")
        if len(self.feature_names) != self.matrix.shape[1]:
            raise DomainError("one name per feature column required")


# -- feature ranking ---------------------------------------------------------

def _entropy(counts, n) -> float:
    total = 0.0
    for c in counts:
        if c:
            p = c / n
            total -= p * math.log(p)
    return total


def nmi(feature_column, labels, bins: int = 10) -> float:
    """Normalized mutual information of a binned feature and the labels.

    Equal-frequency bin edges come from interior quantiles; degenerate
    columns occupy fewer bins.  Zero entropy on either side gives 0.
    """
    if bins < 2:
        raise ConfigError("need at least 2 bins")
    column = np.asarray(feature_column, dtype=float)
    n = column.size
    if n < 2:
        raise DomainError("need at least 2 samples")
    edges = np.quantile(column, [i / bins for i in range(1, bins)])
    assignments = np.searchsorted(edges, column, side="right")
    joint = Counter(zip(assignments.tolist(), labels))
    bin_counts = Counter(assignments.tolist())
    label_counts = Counter(labels)
    h_bin = _entropy(bin_counts.values(), n)
    h_label = _entropy(label_counts.values(), n)
    if h_bin == 0.0 or h_label == 0.0:
        return 0.0
    mi = 0.0
    for (b, lab), c in joint.items():
        mi += (c / n) * math.log(n * c / (bin_counts[b] * label_counts[lab]))
    return min(1.0, max(0.0, mi / math.sqrt(h_bin * h_label)))


@dataclass
class SelectionRanking:
    indices: list
    scores: list

    def top(self, count: int) -> list:
        return self.indices[:count]


def rank_features(dataset: Dataset, bins: int = 10) -> SelectionRanking:
    """Columns ordered by descending NMI; ties keep the lower index first."""
    scored = [(nmi(dataset.matrix[:, j], dataset.labels, bins), j)
              for j in range(dataset.matrix.shape[1])]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return SelectionRanking(indices=[j for _, j in scored],
                            scores=[s for s, _ in scored])


# -- classifiers -------------------------------------------------------------

def _class_order(labels) -> list:
    order = sorted(set(labels))
    if len(order) != 2:
        raise TrainError(f"need exactly 2 classes, got {order}")
    return order


class FisherDiscriminant:
    """Two-class discriminant on the pooled-covariance Fisher direction.

    The threshold sits at the midpoint of the projected class means,
    shifted by the log prior ratio under the equal-variance Gaussian
    model.
    """

    def __init__(self, ridge: float = 1e-6):
        self.ridge = ridge

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.classes = _class_order(y)
        y = np.asarray(y)
        parts = [X[y == c] for c in self.classes]
        means = [p.mean(axis=0) for p in parts]
        n = X.shape[0]
        scatter = sum((p - m).T @ (p - m) for p, m in zip(parts, means))
        pooled = scatter / (n - 2) + self.ridge * np.eye(X.shape[1])
        self.direction = np.linalg.solve(pooled, means[1] - means[0])
        centers = [float(m @ self.direction) for m in means]
        gap = centers[1] - centers[0]
        if gap == 0.0:
            self.threshold = None  # degenerate projection: majority wins
            sizes = [len(p) for p in parts]
            self.majority = self.classes[int(sizes[1] > sizes[0])]
            return self
        projected_var = sum(
            float(np.sum((part @ self.direction - center) ** 2))
            for part, center in zip(parts, centers)) / (n - 2)
        prior_shift = projected_var / gap * math.log(len(parts[0]) / len(parts[1]))
        self.threshold = (centers[0] + centers[1]) / 2.0 + prior_shift
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if self.threshold is None:
            return [self.majority] * X.shape[0]
        scores = X @ self.direction
        return [self.classes[int(s > self.threshold)] for s in scores]


class _Stump:
    __slots__ = ("feature", "threshold", "low", "high", "label")

    def __init__(self, label=None):
        self.label = label


def _gini(ones: int, size: int) -> float:
    if size == 0:
        return 0.0
    p = ones / size
    return 2.0 * p * (1.0 - p)


class RandomForest:
    """Bagged depth-limited trees with random feature candidates."""

    def __init__(self, trees: int = 100, max_depth: int = 2, seed: int = 0):
        self.trees = trees
        self.max_depth = max_depth
        self.seed = seed

    def _split(self, X, y01, rng):
        n, p = X.shape
        candidates = rng.choice(p, size=max(1, int(math.sqrt(p))),
                                replace=False)
        node_gini = _gini(int(y01.sum()), n)
        best = None
        for f in candidates:
            order = np.argsort(X[:, f], kind="stable")
            values = X[order, f]
            ones = np.cumsum(y01[order])
            total_ones = int(ones[-1])
            for k in range(n - 1):
                if values[k] == values[k + 1]:
                    continue
                left = _gini(int(ones[k]), k + 1)
                right = _gini(total_ones - int(ones[k]), n - k - 1)
                weighted = ((k + 1) * left + (n - k - 1) * right) / n
                if best is None or weighted < best[0] - 1e-15:
                    best = (weighted, int(f),
                            (values[k] + values[k + 1]) / 2.0)
        if best is None or best[0] >= node_gini - 1e-15:
            return None
        return best[1], best[2]

    def _grow(self, X, y01, depth, rng):
        node = _Stump()
        ones = int(y01.sum())
        if ones == 0 or ones == len(y01) or depth == self.max_depth:
            node.label = int(ones * 2 > len(y01))  # ties fall to class 0
            return node
        split = self._split(X, y01, rng)
        if split is None:
            node.label = int(ones * 2 > len(y01))
            return node
        node.feature, node.threshold = split
        mask = X[:, node.feature] <= node.threshold
        node.low = self._grow(X[mask], y01[mask], depth + 1, rng)
        node.high = self._grow(X[~mask], y01[~mask], depth + 1, rng)
        return node

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.classes = _class_order(y)
        y01 = np.array([self.classes.index(lab) for lab in y])
        rng = np.random.default_rng(self.seed)
        n = X.shape[0]
        self.forest = []
        for _ in range(self.trees):
            picks = rng.integers(0, n, size=n)
            self.forest.append(self._grow(X[picks], y01[picks], 0, rng))
        return self

    def _vote(self, node, row):
        while node.label is None:
            node = node.low if row[node.feature] <= node.threshold else node.high
        return node.label

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = []
        for row in X:
            ones = sum(self._vote(tree, row) for tree in self.forest)
            out.append(self.classes[int(ones * 2 > len(self.forest))])
        return out


class NearestNeighbors:
    """Majority vote over the K nearest training rows.

    Equidistant neighbors are taken in training order; a split vote goes
    to the class of the single nearest neighbor.
    """

    def __init__(self, neighbors: int = 5):
        self.neighbors = neighbors

    def fit(self, X, y):
        self.X = np.asarray(X, dtype=float)
        self.classes = _class_order(y)
        self.y = list(y)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = []
        k = min(self.neighbors, len(self.y))
        for row in X:
            squared = ((self.X - row) ** 2).sum(axis=1)
            order = np.argsort(squared, kind="stable")[:k]
            votes = Counter(self.y[i] for i in order)
            top = max(votes.values())
            leaders = [c for c, v in votes.items() if v == top]
            if len(leaders) == 1:
                out.append(leaders[0])
            else:
                out.append(self.y[order[0]])
        return out


class PegasosSvm:
    """Linear soft-margin classifier, single-sample Pegasos updates.

    The bias rides as an appended constant feature, so it is regularized
    with the rest of the weight vector.
    """

    def __init__(self, margin_penalty: float = 1e-2,
                 iterations: int = 100_000, seed: int = 0):
        self.margin_penalty = margin_penalty
        self.iterations = iterations
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.classes = _class_order(y)
        signs = np.array([1.0 if lab == self.classes[1] else -1.0 for lab in y])
        augmented = np.hstack([X, np.ones((X.shape[0], 1))])
        rng = np.random.default_rng(self.seed)
        picks = rng.integers(0, X.shape[0], size=self.iterations)
        lam = self.margin_penalty
        # running sum of the violating updates; w_t = summed / (lam * (t-1))
        summed = np.zeros(augmented.shape[1])
        for t in range(1, self.iterations + 1):
            i = picks[t - 1]
            if t == 1:
                violated = True
            else:
                margin = signs[i] * (summed @ augmented[i]) / (lam * (t - 1))
                violated = margin < 1.0
            if violated:
                summed += signs[i] * augmented[i]
        self.weights = summed / (lam * self.iterations)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        augmented = np.hstack([X, np.ones((X.shape[0], 1))])
        return [self.classes[int(s >= 0.0)] for s in augmented @ self.weights]


class MlpClassifier:
    """One tanh hidden layer into a logistic output, full-batch descent.

    Training stops when the cross-entropy improves by less than the
    tolerance between consecutive iterations.  Weights initialize from a
    seeded uniform(-0.5, 0.5) draw in the order W1, b1, W2, b2.
    """

    def __init__(self, hidden_units: int = 40, learning_rate: float = 0.01,
                 max_iterations: int = 10_000, tolerance: float = 1e-6,
                 seed: int = 0):
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.classes = _class_order(y)
        target = np.array([1.0 if lab == self.classes[1] else 0.0 for lab in y])
        n, p = X.shape
        h = self.hidden_units
        rng = np.random.default_rng(self.seed)
        w1 = rng.uniform(-0.5, 0.5, size=(p, h))
        b1 = rng.uniform(-0.5, 0.5, size=h)
        w2 = rng.uniform(-0.5, 0.5, size=h)
        b2 = rng.uniform(-0.5, 0.5)
        lr = self.learning_rate
        previous = math.inf
        for _ in range(self.max_iterations):
            hidden = np.tanh(X @ w1 + b1)
            prob = 1.0 / (1.0 + np.exp(-(hidden @ w2 + b2)))
            clipped = np.clip(prob, 1e-12, 1.0 - 1e-12)
            loss = -float(np.mean(target * np.log(clipped)
                                  + (1.0 - target) * np.log(1.0 - clipped)))
            if previous - loss < self.tolerance:
                break
            previous = loss
            delta = (prob - target) / n
            grad_w2 = hidden.T @ delta
            grad_b2 = float(delta.sum())
            back = np.outer(delta, w2) * (1.0 - hidden ** 2)
            w1 -= lr * (X.T @ back)
            b1 -= lr * back.sum(axis=0)
            w2 -= lr * grad_w2
            b2 -= lr * grad_b2
        self.params = (w1, b1, w2, b2)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        w1, b1, w2, b2 = self.params
        prob = 1.0 / (1.0 + np.exp(-(np.tanh(X @ w1 + b1) @ w2 + b2)))
        return [self.classes[int(p >= 0.5)] for p in prob]


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str
    seed: int = 0
    options: tuple = ()  # sorted (name, value) pairs

    @classmethod
    def make(cls, kind: str, seed: int = 0, **options) -> "ClassifierConfig":
        if kind not in CLASSIFIER_KINDS:
            raise ConfigError(f"unknown classifier {kind!r}")
        return cls(kind=kind, seed=seed, options=tuple(sorted(options.items())))


def make_classifier(config: ClassifierConfig):
    options = dict(config.options)
    if config.kind == "lda":
        return FisherDiscriminant(**options)
    if config.kind == "rf":
        return RandomForest(seed=config.seed, **options)
    if config.kind == "knn":
        return NearestNeighbors(**options)
    if config.kind == "svm":
        return PegasosSvm(seed=config.seed, **options)
    if config.kind == "mlp":
        return MlpClassifier(seed=config.seed, **options)
    raise ConfigError(f"unknown classifier {config.kind!r}")


def train(config: ClassifierConfig, X, y):
    return make_classifier(config).fit(np.asarray(X, dtype=float), list(y))


def predict(model, row):
    return model.predict(np.asarray([row], dtype=float))[0]


# -- evaluation --------------------------------------------------------------

@dataclass
class EvalRow:
    classifier: str
    n_f: int
    precision: dict
    recall: dict
    accuracy: float


@dataclass
class EvalReport:
    rows: list
    best: dict  # classifier kind -> EvalRow


def _fold_contexts(dataset: Dataset, bins: int):
    """Per-fold standardized matrices and rankings, training rows only."""
    n = dataset.matrix.shape[0]
    contexts = []
    for i in range(n):
        keep = [j for j in range(n) if j != i]
        train_rows = dataset.matrix[keep]
        model = fit_standardizer(train_rows)
        z_train = apply_standardizer(model, train_rows)
        z_test = apply_standardizer(model, dataset.matrix[i:i + 1])
        ranking = rank_features(
            Dataset(z_train, [dataset.labels[j] for j in keep],
                    dataset.feature_names), bins)
        contexts.append((keep, z_train, z_test, ranking))
    return contexts


def _fold_predict(dataset: Dataset, config: ClassifierConfig, n_f: int,
                  contexts) -> list:
    predictions = []
    for keep, z_train, z_test, ranking in contexts:
        chosen = ranking.top(n_f)
        model = train(config, z_train[:, chosen],
                      [dataset.labels[j] for j in keep])
        predictions.append(model.predict(z_test[:, chosen])[0])
    return predictions


def fold_predictions(dataset: Dataset, config: ClassifierConfig,
                     bins: int = 10, n_f: int = 3) -> list:
    """The held-out prediction of every leave-one-out fold, in row order."""
    return _fold_predict(dataset, config, n_f, _fold_contexts(dataset, bins))


def _evaluate(dataset: Dataset, config: ClassifierConfig, n_f: int,
              contexts) -> EvalRow:
    classes = sorted(set(dataset.labels))
    predictions = _fold_predict(dataset, config, n_f, contexts)
    correct = Counter()
    predicted = Counter(predictions)
    actual = Counter(dataset.labels)
    for truth, guess in zip(dataset.labels, predictions):
        if truth == guess:
            correct[truth] += 1
    precision = {c: correct[c] / predicted[c] if predicted[c] else 0.0
                 for c in classes}
    recall = {c: correct[c] / actual[c] for c in classes}
    accuracy = sum(correct.values()) / len(predictions)
    return EvalRow(classifier=config.kind, n_f=n_f, precision=precision,
                   recall=recall, accuracy=accuracy)


def loocv(dataset: Dataset, config: ClassifierConfig, bins: int = 10,
          n_f: int = 3) -> EvalRow:
    """One leave-one-out evaluation at a fixed feature count."""
    n, p = dataset.matrix.shape
    if n < 4:
        raise DomainError("need at least 4 rows")
    if len(set(dataset.labels)) != 2:
        raise TrainError("need exactly 2 classes")
    if not 1 <= n_f <= p:
        raise ConfigError(f"n_f must be within 1..{p}")
    return _evaluate(dataset, config, n_f, _fold_contexts(dataset, bins))


def sweep_nf(dataset: Dataset, configs, nf_values=None,
             bins: int = 10) -> EvalReport:
    """Evaluate each classifier over the feature-count sweep.

    The best row per classifier is the highest accuracy, smallest
    feature count first on ties.
    """
    if nf_values is None:
        nf_values = range(3, 51)
    nf_values = [n_f for n_f in nf_values]
    p = dataset.matrix.shape[1]
    for n_f in nf_values:
        if not 1 <= n_f <= p:
            raise ConfigError(f"n_f must be within 1..{p}")
    contexts = _fold_contexts(dataset, bins)
    rows = []
    best = {}
    for config in configs:
        for n_f in sorted(nf_values):
            row = _evaluate(dataset, config, n_f, contexts)
            rows.append(row)
            leader = best.get(config.kind)
            if leader is None or row.accuracy > leader.accuracy:
                best[config.kind] = row
    return EvalReport(rows=rows, best=best)


def write_report(report: EvalReport, csv_path, json_path=None) -> None:
    """CSV of every row; JSON of the per-classifier best, two decimals."""
    classes = sorted(report.rows[0].precision) if report.rows else []
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["classifier", "n_f",
                         *(f"precision_{c}" for c in classes),
                         *(f"recall_{c}" for c in classes),
                         "accuracy"])
        for row in report.rows:
            writer.writerow([
                row.classifier, row.n_f,
                *(repr(row.precision[c]) for c in classes),
                *(repr(row.recall[c]) for c in classes),
                repr(row.accuracy)])
    if json_path is not None:
        summary = {}
        for kind in sorted(report.best):
            row = report.best[kind]
            summary[kind] = {
                "n_f": row.n_f,
                **{f"precision_{c}": float(f"{row.precision[c]:.2f}")
                   for c in classes},
                **{f"recall_{c}": float(f"{row.recall[c]:.2f}")
                   for c in classes},
                "accuracy": float(f"{row.accuracy:.2f}"),
            }
        with open(json_path, "w", encoding="utf-8", newline="") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
