"""Least squares via Householder QR with column pivoting."""
import numpy as np


def householder_qr_pivoted(A, tol=None):
    """Factor ``A[:, perm] = Q R`` with Householder reflections and column pivoting.

    Returns ``(V, R, perm, rank)`` where ``V`` holds the unit reflector
    vectors (``V[k]`` acts on rows ``k:``), ``R`` is upper trapezoidal and
    ``rank`` counts diagonal entries above ``tol * |R[0, 0]|``.
    """
    R = np.array(A, dtype=np.float64)
    m, n = R.shape
    perm = np.arange(n)
    V = []
    steps = min(m, n)
    for k in range(steps):
        norms = np.einsum("ij,ij->j", R[k:, k:], R[k:, k:])
        p = k + int(np.argmax(norms))
        if p != k:
            R[:, [k, p]] = R[:, [p, k]]
            perm[[k, p]] = perm[[p, k]]
        x = R[k:, k]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            V.append(None)
            continue
        v = x.copy()
        v[0] += normx if x[0] >= 0 else -normx
        v /= np.linalg.norm(v)
        R[k:, k:] -= 2.0 * np.outer(v, v @ R[k:, k:])
        R[k + 1:, k] = 0.0
        V.append(v)
    if tol is None:
        tol = max(m, n) * np.finfo(np.float64).eps
    diag = np.abs(np.diag(R)[:steps])
    rank = int(np.sum(diag > tol * diag[0])) if steps and diag[0] > 0 else 0
    return V, R, perm, rank


def apply_qt(V, b):
    """Compute ``Q^T b`` from stored reflectors."""
    b = np.array(b, dtype=np.float64)
    for k, v in enumerate(V):
        if v is not None:
            b[k:] -= 2.0 * v * (v @ b[k:])
    return b


def lstsq_qr(A, b, tol=None):
    """Basic least-squares solution; columns beyond the numerical rank get 0."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] < 1:
        raise ValueError("least squares needs at least one row")
    V, R, perm, rank = householder_qr_pivoted(A, tol)
    qtb = apply_qt(V, b)
    z = np.zeros(A.shape[1])
    for i in range(rank - 1, -1, -1):
        z[i] = (qtb[i] - R[i, i + 1:rank] @ z[i + 1:rank]) / R[i, i]
    x = np.zeros(A.shape[1])
    x[perm] = z
    return x


class LinearRegression:
    """Ordinary least squares with an intercept, solved by pivoted QR."""

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or len(X) < 1:
            raise ValueError("linear regression needs at least one training row")
        design = np.hstack([X, np.ones((len(X), 1))])
        beta = lstsq_qr(design, y)
        self.coef_, self.intercept_ = beta[:-1], float(beta[-1])
        return self

    def predict(self, X):
        return np.atleast_2d(np.asarray(X, dtype=np.float64)) @ self.coef_ + self.intercept_
