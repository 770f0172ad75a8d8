import numpy as np

VAR_FLOOR = 1e-9


class GaussianNB:
    """Gaussian class-conditional naive Bayes with empirical class priors.

    ``smoothing`` is added to every per-class variance, which is then floored
    at ``VAR_FLOOR`` so zero-variance features stay finite.
    """

    def __init__(self, smoothing=0.0):
        self.smoothing = smoothing

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        n_cls = len(self.classes_)
        counts = np.bincount(codes, minlength=n_cls)
        self.class_log_prior_ = np.log(counts / counts.sum())
        self.theta_ = np.zeros((n_cls, X.shape[1]))
        self.var_ = np.zeros((n_cls, X.shape[1]))
        for c in range(n_cls):
            rows = X[codes == c]
            self.theta_[c] = rows.mean(axis=0)
            self.var_[c] = rows.var(axis=0)
        self.var_ = np.maximum(self.var_ + self.smoothing, VAR_FLOOR)
        return self

    def joint_log_likelihood(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        norm = -0.5 * np.log(2.0 * np.pi * self.var_).sum(axis=1)
        sq = ((X[:, None, :] - self.theta_[None]) ** 2 / self.var_[None]).sum(axis=2)
        return self.class_log_prior_ + norm - 0.5 * sq

    def predict_proba(self, X):
        jll = self.joint_log_likelihood(X)
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self.joint_log_likelihood(X), axis=1)]
