import numpy as np


def hinge_objective(w, X, y, lam):
    """``lam/2 |w|^2 + mean(max(0, 1 - y * Xw))`` for labels in {-1, +1}."""
    margins = 1.0 - y * (X @ w)
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(margins, 0.0)))


def augment(X):
    """Append the constant bias column (the bias is regularized with the weights)."""
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((len(X), 1))])


def pegasos(X, y, lam, epochs, rng):
    """Stochastic subgradient descent on the hinge loss, step ``1/(lam*t)``.

    Each epoch visits every row once in a fresh random order. ``w`` is kept as
    ``scale * v`` so the shrink step costs O(1).
    """
    n, d = X.shape
    v = np.zeros(d)
    scale = 1.0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            viol = y[i] * scale * (X[i] @ v) < 1.0
            if t == 1:
                # shrink factor is 0 at t=1: restart from w = 0
                v[:] = 0.0
                scale = 1.0
            else:
                scale *= 1.0 - 1.0 / t
            if viol:
                v += (eta * y[i] / scale) * X[i]
            if scale < 1e-9:
                v *= scale
                scale = 1.0
    return scale * v


class LinearSVM:
    """Linear C-SVM, one-vs-rest for more than two classes.

    Trained by stochastic subgradient descent with regularization
    ``1 / (C * n_train)`` for a fixed number of epochs; fully determined by
    ``seed``. Two-class problems use a single classifier whose positive class
    is ``classes_[1]``.
    """

    def __init__(self, C=1.0, epochs=200, seed=0):
        if C <= 0:
            raise ValueError("C must be positive")
        self.C = C
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        Xa = augment(X)
        y = np.asarray(y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        self.lam_ = 1.0 / (self.C * len(Xa))
        k = len(self.classes_)
        if k == 1:
            self.coef_ = np.zeros((0, Xa.shape[1]))
            return self
        targets = [1] if k == 2 else range(k)
        ws = []
        for c in targets:
            yc = np.where(codes == c, 1.0, -1.0)
            rng = np.random.default_rng([self.seed, c])
            ws.append(pegasos(Xa, yc, self.lam_, self.epochs, rng))
        self.coef_ = np.array(ws)
        return self

    def decision_function(self, X):
        d = augment(np.atleast_2d(X)) @ self.coef_.T
        return d[:, 0] if len(self.classes_) == 2 else d

    def predict(self, X):
        X = np.atleast_2d(X)
        if len(self.classes_) == 1:
            return np.full(len(X), self.classes_[0])
        d = self.decision_function(X)
        if len(self.classes_) == 2:
            return self.classes_[(d > 0).astype(np.int64)]
        return self.classes_[np.argmax(d, axis=1)]
