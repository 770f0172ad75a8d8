import numpy as np


class KNNClassifier:
    """Euclidean k-nearest-neighbour majority vote.

    Distance ties go to the lower node id; vote ties go to the tied class
    seen first in distance order, i.e. the label of the nearest tied neighbour.
    """

    def __init__(self, k=10, max_block=2 ** 22):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.max_block = max_block

    def fit(self, X, y, ids=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if len(X) == 0:
            raise ValueError("KNN needs at least one training row")
        ids = np.arange(len(X)) if ids is None else np.asarray(ids)
        order = np.argsort(ids, kind="stable")
        self.X_, self.y_, self.ids_ = X[order], y[order], ids[order]
        self.classes_, self.codes_ = np.unique(self.y_, return_inverse=True)
        return self

    def kneighbors(self, Q):
        """Indices (into the id-sorted training set) of the k nearest rows per query."""
        Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
        k = min(self.k, len(self.X_))
        step = max(1, self.max_block // max(1, self.X_.size))
        out = []
        for s in range(0, len(Q), step):
            diff = Q[s:s + step, None, :] - self.X_[None, :, :]
            d2 = np.einsum("qnd,qnd->qn", diff, diff)
            # stable sort over id-sorted rows breaks distance ties by lower id
            out.append(np.argsort(d2, axis=1, kind="stable")[:, :k])
        return np.concatenate(out) if out else np.empty((0, k), dtype=np.int64)

    def predict(self, Q):
        nbrs = self.kneighbors(Q)
        n_cls = len(self.classes_)
        pred = np.empty(len(nbrs), dtype=np.int64)
        for r, row in enumerate(nbrs):
            codes = self.codes_[row]
            votes = np.bincount(codes, minlength=n_cls)
            tied = votes == votes.max()
            pred[r] = next(c for c in codes if tied[c])
        return self.classes_[pred]
