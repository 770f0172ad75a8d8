from dataclasses import dataclass

import numpy as np


def gini(counts):
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def split_impurity(left_counts, right_counts):
    """Size-weighted Gini impurity of a two-way split."""
    nl, nr = float(np.sum(left_counts)), float(np.sum(right_counts))
    return (nl * gini(left_counts) + nr * gini(right_counts)) / (nl + nr)


@dataclass
class _Node:
    label: int
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self):
        return self.left is None


class DecisionTreeClassifier:
    """Binary axis-aligned CART tree with Gini impurity.

    Candidate thresholds are midpoints between consecutive distinct values.
    A node becomes a leaf when pure, at ``max_depth``, when it holds fewer
    than ``min_samples_split`` rows, or when no feature varies. The best split
    is taken even if it does not lower impurity, so consistent training data
    is always fit exactly within the depth cap.
    """

    def __init__(self, max_depth=20, min_samples_split=2, criterion="gini"):
        if criterion != "gini":
            raise ValueError("only the gini criterion is supported")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        self.classes_, codes = np.unique(np.asarray(y), return_inverse=True)
        self.n_classes_ = len(self.classes_)
        self.root_ = self._grow(X, codes, 0)
        return self

    def _grow(self, X, codes, depth):
        counts = np.bincount(codes, minlength=self.n_classes_)
        node = _Node(int(np.argmax(counts)))
        if (counts.max() == len(codes) or depth >= self.max_depth
                or len(codes) < self.min_samples_split):
            return node
        best = self._best_split(X, codes)
        if best is None:
            return node
        node.feature, node.threshold = best
        go_left = X[:, node.feature] <= node.threshold
        node.left = self._grow(X[go_left], codes[go_left], depth + 1)
        node.right = self._grow(X[~go_left], codes[~go_left], depth + 1)
        return node

    def _best_split(self, X, codes):
        n = len(codes)
        best, best_imp = None, np.inf
        one_hot = np.eye(self.n_classes_)[codes]
        for f in range(X.shape[1]):
            order = np.argsort(X[:, f], kind="stable")
            xs = X[order, f]
            cut = np.nonzero(xs[:-1] != xs[1:])[0]
            if not len(cut):
                continue
            cum = np.cumsum(one_hot[order], axis=0)
            left = cum[cut]
            right = cum[-1] - left
            nl = (cut + 1).astype(np.float64)
            nr = n - nl
            gl = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
            gr = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
            imp = (nl * gl + nr * gr) / n
            k = int(np.argmin(imp))
            if imp[k] < best_imp:
                best_imp = imp[k]
                lo, hi = xs[cut[k]], xs[cut[k] + 1]
                mid = 0.5 * (lo + hi)
                # adjacent floats: the midpoint can round up onto hi
                best = (f, mid if mid < hi else lo)
        return best

    def depth(self, node=None):
        node = node or self.root_
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty(len(X), dtype=np.int64)
        for r, x in enumerate(X):
            node = self.root_
            while not node.is_leaf:
                node = node.left if x[node.feature] <= node.threshold else node.right
            out[r] = node.label
        return self.classes_[out]
