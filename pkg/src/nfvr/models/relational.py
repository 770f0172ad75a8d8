"""Neighbour-vote baselines that predict from labelled neighbours directly."""
import numpy as np

from ..graph import AttributedGraph


def nns_matrix(g: AttributedGraph, target: int) -> np.ndarray:
    """One-hot rows of every node's own non-target attribute values."""
    blocks = [np.eye(a.n_levels)[g.columns[j]] for j, a in enumerate(g.attributes) if j != target]
    return np.concatenate(blocks, axis=1) if blocks else np.zeros((g.n, 0))


def similarity(x, y):
    return 1.0 / (1.0 + float(np.linalg.norm(np.asarray(x) - np.asarray(y))))


class _NeighborVote:
    weighted = False

    def __init__(self, g: AttributedGraph, target: int):
        self.g = g
        self.target = target
        self.n_levels = g.attributes[target].n_levels

    def fit(self, train_ids, labels):
        """``labels[k]`` is the target level index of ``train_ids[k]``."""
        train_ids = np.asarray(train_ids, dtype=np.int64)
        self.known_ = np.full(self.g.n, -1, dtype=np.int64)
        self.known_[train_ids] = labels
        counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=self.n_levels)
        self.majority_ = int(np.argmax(counts))
        self.features_ = nns_matrix(self.g, self.target) if self.weighted else None
        return self

    def weight(self, v, u):
        return 1.0

    def scores(self, v):
        scores = np.zeros(self.n_levels)
        for u in self.g.neighbors(v):
            lab = self.known_[u]
            if lab >= 0:
                scores[lab] += self.weight(v, u)
        return scores

    def predict_one(self, v):
        s = self.scores(v)
        if not s.any():
            return self.majority_
        return int(np.argmax(s))

    def predict(self, nodes):
        return np.array([self.predict_one(int(v)) for v in nodes], dtype=np.int64)


class WVRN(_NeighborVote):
    """Similarity-weighted vote of labelled neighbours.

    A neighbour's weight is ``1 / (1 + d)`` with ``d`` the Euclidean distance
    between the two nodes' one-hot own-attribute vectors.
    """

    weighted = True

    def weight(self, v, u):
        return similarity(self.features_[v], self.features_[u])


class Majority(_NeighborVote):
    """Most frequent label among labelled neighbours; lower level wins ties."""
