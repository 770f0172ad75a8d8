"""Classification and regression metrics."""
import numpy as np


def _pair(pred, actual, min_len):
    pred, actual = np.asarray(pred), np.asarray(actual)
    if pred.shape != actual.shape:
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(actual)} targets")
    if len(pred) < min_len:
        raise ValueError(f"need at least {min_len} predictions")
    return pred, actual


def accuracy(pred, actual) -> float:
    pred, actual = _pair(pred, actual, 1)
    return float(np.mean(pred == actual))


def f1_macro(pred, actual) -> float:
    """Unweighted mean of one-vs-rest F1 over every class seen in either input.

    A class with precision + recall = 0 contributes 0.
    """
    pred, actual = _pair(pred, actual, 1)
    scores = []
    for c in np.union1d(pred, actual):
        tp = np.sum((pred == c) & (actual == c))
        fp = np.sum((pred == c) & (actual != c))
        fn = np.sum((pred != c) & (actual == c))
        denom = 2 * tp + fp + fn
        scores.append(2.0 * tp / denom if tp else 0.0)
    return float(np.mean(scores))


def classification_metrics(pred, actual) -> dict:
    return {"accuracy": accuracy(pred, actual), "f1_macro": f1_macro(pred, actual)}


def regression_metrics(pred, actual) -> dict:
    """MAE, MSE, RMSE and R^2; R^2 is 1 for a perfect fit of a constant target."""
    pred, actual = _pair(pred, actual, 2)
    pred = pred.astype(np.float64)
    actual = actual.astype(np.float64)
    err = pred - actual
    mse = float(np.mean(err ** 2))
    ss_res = float(np.sum(err ** 2))
    ss_tot = float(np.sum((actual - actual.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else float("-inf")
    else:
        r2 = 1.0 - ss_res / ss_tot
    return {"mae": float(np.mean(np.abs(err))), "mse": mse, "rmse": float(np.sqrt(mse)), "r2": r2}
