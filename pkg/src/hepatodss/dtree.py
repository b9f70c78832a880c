"""CART decision tree: Gini/entropy growth, k-fold evaluation, feature
importance, and root-to-leaf path extraction into rules.

Splits are binary on `feature <= threshold` with thresholds at midpoints of
adjacent distinct sorted values. Ties between candidate splits resolve to the
lowest feature index (fixed feature order), then the lowest threshold, so
fitting is fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DataError
from .ingest import FEATURE_ORDER, EncodedRecord
from . import rules as rules_mod
from .terms import XSD_BOOLEAN, XSD_FLOAT, Literal

_TIE_EPS = 1e-12


@dataclass(frozen=True)
class Leaf:
    class_counts: tuple[int, ...]
    predicted: int


@dataclass(frozen=True)
class Internal:
    feature: str
    threshold: float
    left: "TreeNode"   # feature <= threshold
    right: "TreeNode"  # feature >  threshold


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class TrainConfig:
    criterion: str = "gini"
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    random_seed: int = 42

    def __post_init__(self):
        if self.criterion not in ("gini", "entropy"):
            raise DataError(f"unknown criterion {self.criterion!r}")
        if self.min_samples_leaf < 1:
            raise DataError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_report(self, criterion: str, folds: int) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.macro_precision,
            "recall": self.macro_recall,
            "f1": self.macro_f1,
            "criterion": criterion,
            "folds": folds,
        }


def impurity(counts: Sequence[float], criterion: str = "gini") -> float:
    total = float(sum(counts))
    if total <= 0:
        raise DataError("impurity of an empty count vector is undefined")
    probs = [c / total for c in counts if c > 0]
    if criterion == "gini":
        return 1.0 - sum(p * p for p in probs)
    if criterion == "entropy":
        return -sum(p * math.log2(p) for p in probs)
    raise DataError(f"unknown criterion {criterion!r}")


def _feature_order(rows: Sequence[Mapping[str, float]], features: Optional[Sequence[str]]):
    if features is not None:
        return list(features)
    keys = set()
    for row in rows:
        keys.update(row.keys())
    if keys <= set(FEATURE_ORDER):
        return [f for f in FEATURE_ORDER if f in keys]
    return sorted(keys)


def _as_matrix(rows, features) -> np.ndarray:
    try:
        return np.array([[float(row[f]) for f in features] for row in rows], dtype=np.float64)
    except KeyError as exc:
        raise DataError(f"record is missing feature {exc.args[0]!r}")


def fit(
    rows: Sequence[Mapping[str, float]],
    labels: Sequence[int],
    config: Optional[TrainConfig] = None,
    features: Optional[Sequence[str]] = None,
) -> TreeNode:
    """Grow a tree by greedy weighted-impurity minimization."""
    if not rows:
        raise DataError("cannot fit a tree on zero records")
    if len(rows) != len(labels):
        raise DataError("rows and labels differ in length")
    config = config or TrainConfig()
    features = _feature_order(rows, features)
    X = _as_matrix(rows, features)
    y = np.asarray(labels, dtype=np.int64)
    n_classes = int(y.max()) + 1 if len(y) else 0
    return _grow(X, y, np.arange(len(y)), features, n_classes, config, depth=0)


def fit_records(records: Sequence[EncodedRecord], config: Optional[TrainConfig] = None) -> TreeNode:
    rows = [r.features() for r in records]
    labels = [r.category for r in records]
    return fit(rows, labels, config, features=FEATURE_ORDER)


def _leaf(y: np.ndarray, idx: np.ndarray, n_classes: int) -> Leaf:
    counts = np.bincount(y[idx], minlength=n_classes)
    # argmax breaks ties toward the lowest class index
    return Leaf(tuple(int(c) for c in counts), int(np.argmax(counts)))


def _grow(X, y, idx, features, n_classes, config, depth) -> TreeNode:
    labels_here = y[idx]
    if len(np.unique(labels_here)) == 1:
        return _leaf(y, idx, n_classes)
    if config.max_depth is not None and depth >= config.max_depth:
        return _leaf(y, idx, n_classes)
    split = _best_split(X, y, idx, n_classes, config)
    if split is None:
        return _leaf(y, idx, n_classes)
    j, threshold = split
    mask = X[idx, j] <= threshold
    left = _grow(X, y, idx[mask], features, n_classes, config, depth + 1)
    right = _grow(X, y, idx[~mask], features, n_classes, config, depth + 1)
    return Internal(features[j], float(threshold), left, right)


def _best_split(X, y, idx, n_classes, config):
    n = len(idx)
    msl = config.min_samples_leaf
    best: Optional[tuple[float, int, float]] = None  # (score, feature idx, threshold)
    labels = y[idx]
    onehot = np.zeros((n, n_classes), dtype=np.float64)
    onehot[np.arange(n), labels] = 1.0
    for j in range(X.shape[1]):
        values = X[idx, j]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        cum = np.cumsum(onehot[order], axis=0)
        boundaries = np.nonzero(sv[:-1] < sv[1:])[0]  # split after position b
        if len(boundaries) == 0:
            continue
        nl = boundaries + 1.0
        nr = n - nl
        valid = (nl >= msl) & (nr >= msl)
        if not valid.any():
            continue
        boundaries = boundaries[valid]
        nl, nr = nl[valid], nr[valid]
        left_counts = cum[boundaries]
        right_counts = cum[-1] - left_counts
        if config.criterion == "gini":
            imp_l = 1.0 - ((left_counts / nl[:, None]) ** 2).sum(axis=1)
            imp_r = 1.0 - ((right_counts / nr[:, None]) ** 2).sum(axis=1)
        else:
            pl = left_counts / nl[:, None]
            pr = right_counts / nr[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                imp_l = -np.where(pl > 0, pl * np.log2(pl), 0.0).sum(axis=1)
                imp_r = -np.where(pr > 0, pr * np.log2(pr), 0.0).sum(axis=1)
        scores = (nl * imp_l + nr * imp_r) / n
        k = int(np.argmin(scores))  # lowest threshold wins ties within a feature
        score = float(scores[k])
        if best is None or score < best[0] - _TIE_EPS:
            b = boundaries[k]
            threshold = (sv[b] + sv[b + 1]) / 2.0
            best = (score, j, float(threshold))
    if best is None:
        return None
    return best[1], best[2]


def predict(tree: TreeNode, row: Mapping[str, float]) -> int:
    node = tree
    while isinstance(node, Internal):
        if node.feature not in row:
            raise DataError(f"record is missing feature {node.feature!r}")
        node = node.left if float(row[node.feature]) <= node.threshold else node.right
    return node.predicted


def _stratified_folds(labels: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Deal each class's shuffled indices round-robin over k folds."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for cls in np.unique(labels):
        members = np.nonzero(labels == cls)[0]
        rng.shuffle(members)
        for i, m in enumerate(members):
            folds[(cursor + i) % k].append(int(m))
        cursor += len(members)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def cross_validate(
    rows: Sequence[Mapping[str, float]],
    labels: Sequence[int],
    config: Optional[TrainConfig] = None,
    k: int = 10,
    features: Optional[Sequence[str]] = None,
) -> EvalMetrics:
    """Stratified k-fold; metrics averaged over folds, macro-averaged over
    the full class set (a class absent from a fold's test set contributes 0
    to its own term)."""
    if k < 2:
        raise DataError("k must be >= 2")
    if k > len(rows):
        raise DataError(f"k={k} exceeds the number of records ({len(rows)})")
    config = config or TrainConfig()
    features = _feature_order(rows, features)
    y = np.asarray(labels, dtype=np.int64)
    classes = list(range(int(y.max()) + 1))
    folds = _stratified_folds(y, k, config.random_seed)
    all_idx = np.arange(len(rows))
    fold_metrics = []
    for test_idx in folds:
        if len(test_idx) == 0:
            continue
        train_mask = np.ones(len(rows), dtype=bool)
        train_mask[test_idx] = False
        train_idx = all_idx[train_mask]
        tree = fit(
            [rows[i] for i in train_idx],
            [int(y[i]) for i in train_idx],
            config,
            features,
        )
        predictions = np.array([predict(tree, rows[i]) for i in test_idx])
        actual = y[test_idx]
        accuracy = float((predictions == actual).mean())
        precisions, recalls, f1s = [], [], []
        for cls in classes:
            tp = int(((predictions == cls) & (actual == cls)).sum())
            fp = int(((predictions == cls) & (actual != cls)).sum())
            fn = int(((predictions != cls) & (actual == cls)).sum())
            precision = tp / (tp + fp) if (tp + fp) else 0.0
            recall = tp / (tp + fn) if (tp + fn) else 0.0
            f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
            precisions.append(precision)
            recalls.append(recall)
            f1s.append(f1)
        fold_metrics.append(
            (accuracy, float(np.mean(precisions)), float(np.mean(recalls)), float(np.mean(f1s)))
        )
    means = [float(np.mean([m[i] for m in fold_metrics])) for i in range(4)]
    return EvalMetrics(*means)


def cross_validate_records(
    records: Sequence[EncodedRecord], config: Optional[TrainConfig] = None, k: int = 10
) -> EvalMetrics:
    rows = [r.features() for r in records]
    labels = [r.category for r in records]
    return cross_validate(rows, labels, config, k, features=FEATURE_ORDER)


def feature_importance(
    tree: TreeNode,
    rows: Sequence[Mapping[str, float]],
    labels: Sequence[int],
    criterion: str = "gini",
) -> dict[str, float]:
    """Impurity-decrease importance summed per feature, normalized to sum 1
    (all zeros for a single leaf)."""
    features = sorted({f for f in _tree_features(tree)})
    all_features = _feature_order(rows, None)
    importance = {f: 0.0 for f in all_features}
    for f in features:
        importance.setdefault(f, 0.0)
    y = np.asarray(labels, dtype=np.int64)
    n_total = len(rows)

    def descend(node: TreeNode, idx: list[int]):
        if isinstance(node, Leaf) or not idx:
            return
        counts = np.bincount(y[idx]) if len(idx) else np.array([0])
        node_imp = impurity(counts, criterion)
        left_idx = [i for i in idx if float(rows[i][node.feature]) <= node.threshold]
        right_idx = [i for i in idx if float(rows[i][node.feature]) > node.threshold]
        decrease = node_imp
        if left_idx:
            decrease -= len(left_idx) / len(idx) * impurity(np.bincount(y[left_idx]), criterion)
        if right_idx:
            decrease -= len(right_idx) / len(idx) * impurity(np.bincount(y[right_idx]), criterion)
        importance[node.feature] += len(idx) / n_total * decrease
        descend(node.left, left_idx)
        descend(node.right, right_idx)

    descend(tree, list(range(n_total)))
    total = sum(importance.values())
    if total > 0:
        importance = {f: v / total for f, v in importance.items()}
    return importance


def _tree_features(node: TreeNode):
    if isinstance(node, Internal):
        yield node.feature
        yield from _tree_features(node.left)
        yield from _tree_features(node.right)


@dataclass(frozen=True)
class RulePath:
    conditions: tuple[tuple[str, str, float], ...]  # (feature, "<=" | ">", threshold)
    klass: int


def extract_paths(tree: TreeNode) -> list[RulePath]:
    """One entry per leaf; conditions are the edge tests root-to-leaf."""
    paths: list[RulePath] = []

    def walk(node: TreeNode, conditions: tuple):
        if isinstance(node, Leaf):
            paths.append(RulePath(conditions, node.predicted))
            return
        walk(node.left, conditions + ((node.feature, "<=", node.threshold),))
        walk(node.right, conditions + ((node.feature, ">", node.threshold),))

    walk(tree, ())
    return paths


def paths_to_rules(
    paths: Sequence[RulePath],
    feature_map: Mapping[str, str],
    class_map: Mapping[int, str],
    subject_class: str = "Patient",
    name_prefix: str = "r",
) -> list[rules_mod.Rule]:
    """Each path becomes `Patient(?x) ^ per-condition atoms -> head(?x, true)`.

    A feature's value atom is introduced once; subsequent conditions on the
    same feature reuse its variable.
    """
    out = []
    for i, path in enumerate(paths, start=1):
        for feature, _, _ in path.conditions:
            if feature not in feature_map:
                raise DataError(f"no property mapping for feature {feature!r}")
        if path.klass not in class_map:
            raise DataError(f"no head mapping for class {path.klass!r}")
        x = rules_mod.Var("x")
        body: list[rules_mod.Atom] = [rules_mod.ClassAtom(subject_class, x)]
        introduced: set[str] = set()
        for feature, op, threshold in path.conditions:
            var = rules_mod.Var(feature.lower())
            if feature not in introduced:
                body.append(rules_mod.PropertyAtom(feature_map[feature], x, var))
                introduced.add(feature)
            builtin = "lessThanOrEqualTo" if op == "<=" else "greaterThan"
            body.append(
                rules_mod.BuiltinAtom(builtin, var, Literal(repr(float(threshold)), XSD_FLOAT))
            )
        head = rules_mod.PropertyAtom(class_map[path.klass], x, Literal("true", XSD_BOOLEAN))
        out.append(rules_mod.Rule(f"{name_prefix}{i}", tuple(body), (head,)))
    return out


# default mappings for the HCV panel
FEATURE_PROPERTY_MAP = {name: f"hasValue{name}" for name in FEATURE_ORDER}
CLASS_HEAD_MAP = {
    0: "isHealthy",
    1: "isShowingSigns",
    2: "isHepatitisCpatient",
    3: "isFibrosisPatient",
    4: "isCirrhosisPatient",
}
