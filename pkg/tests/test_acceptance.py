"""Acceptance suite: one PASS/FAIL line per criterion (also repeated in the pytest summary)."""
import json
import os
import statistics
import time
from pathlib import Path

import numpy as np
import pytest

from nfvr.cli import main
from nfvr.experiment import ExperimentConfig, build_features, run_experiment, split
from nfvr.featurize import FeatureConfig, Mode, featurize_all, nfvr_vector
from nfvr.graph import MISSING, Attribute, Kind, from_edge_array, load_graph
from nfvr.metrics import regression_metrics
from nfvr.models import (DecisionTreeClassifier, GaussianNB, KNNClassifier, LinearRegression,
                         LinearSVM, ModelSpec, lstsq_qr)
from nfvr.models.svm import augment, hinge_objective
from nfvr.proclivity import GenerativeFunction, divergence, mixing_matrix, prone, prone_matrix
from nfvr.synth import planted_partition

from conftest import dense_adjacency, floyd_warshall, gnp_edges, random_attributed_graph, record
from test_featurize import mp_rho_row, straight_line_nfvr
from test_models import brute_knn, dual_pg_objective, gaussian_logpdf, separable_2d
from test_proclivity import mp_divergence

pytestmark = pytest.mark.acceptance

ALL_F = list(GenerativeFunction)


def test_shell_oracle():
    t0 = time.perf_counter()
    mismatches = 0
    rng = np.random.default_rng(20240)
    for k in range(100):
        n = int(rng.integers(2, 51))
        p = (0.05, 0.1, 0.3)[k % 3]
        g = from_edge_array(n, gnp_edges(n, p, rng))
        D = floyd_warshall(dense_adjacency(g))
        for v in range(n):
            for h in range(4):
                if set(g.hop_shell(v, h).tolist()) != set(np.nonzero(D[v] == h)[0].tolist()):
                    mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 10.0
    assert record("shell oracle", ok, f"100 graphs, {mismatches} mismatches, {elapsed:.2f}s (< 10s)")


def test_divergence_closed_forms():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 7))
        diag = rng.integers(1, 100, size=k)
        perm = rng.permutation(k)
        M = np.zeros((k, k))
        M[np.arange(k), perm] = diag
        r, c = rng.integers(1, 30, size=k), rng.integers(1, 30, size=int(rng.integers(2, 7)))
        c = c / c.sum() * r.sum()
        indep = np.outer(r, c) / r.sum()
        for f in ALL_F:
            worst = max(worst, abs(prone(M, f) - 1.0), abs(prone(indep, f)))
            if f is not GenerativeFunction.SQUARE:
                worst = max(worst, abs(divergence(M, f) - float(mp_divergence(M, f))),
                            abs(divergence(indep, f) - float(mp_divergence(indep, f))))
    assert record("divergence closed forms", worst <= 1e-9,
                  f"permutation -> 1, independence -> 0, all f; max error {worst:.1e} (<= 1e-9)")


def test_mixing_matrix_oracle():
    bad = 0
    for seed in range(50):
        g = random_attributed_graph(25 + seed % 10, 0.15, seed=seed, levels=(2, 3))
        A = dense_adjacency(g)
        for i in range(2):
            for j in range(2):
                oracle = np.zeros((g.attributes[i].n_levels, g.attributes[j].n_levels), dtype=np.int64)
                for u in range(g.n):
                    for v in range(g.n):
                        if A[u, v]:
                            oracle[g.columns[i][u], g.columns[j][v]] += 1
                bad += not np.array_equal(mixing_matrix(g, i, j).counts, oracle)
    assert record("mixing-matrix oracle", bad == 0, f"50 graphs, {bad} mismatching matrices (exact)")


def test_featurization_oracle():
    worst = 0.0
    rng = np.random.default_rng(3)
    for seed in range(20):
        levels = tuple(int(x) for x in rng.integers(1, 5, size=int(rng.integers(1, 4))))
        g = random_attributed_graph(30, 0.1, seed=100 + seed, levels=levels)
        target = seed % g.t
        h = 1 + seed % 3
        cfg = FeatureConfig(target, h)
        expect = straight_line_nfvr(g, target, h, cfg.hop_weights, mp_rho_row(g, target))
        cfg = cfg.resolve(g)
        for v in range(g.n):
            worst = max(worst, float(np.max(np.abs(nfvr_vector(g, v, cfg) - expect[v]))))
    dims_ok = 0
    for seed in range(100):
        levels = tuple(int(x) for x in rng.integers(1, 6, size=int(rng.integers(1, 6))))
        g = random_attributed_graph(10, 0.3, seed=seed, levels=levels)
        target = int(rng.integers(0, g.t))
        n = [a.n_levels for a in g.attributes]
        d = {m: featurize_all(g, FeatureConfig(target, mode=m)).dim for m in Mode}
        dims_ok += (d[Mode.NFVR] == sum(n) and d[Mode.NNS] == sum(n) - n[target]
                    and d[Mode.NNFVR] == d[Mode.NNS] + d[Mode.NFVR])
    ok = worst <= 1e-12 and dims_ok == 100
    assert record("featurization oracle", ok,
                  f"20 graphs max |diff| {worst:.1e} (<= 1e-12); dimension identities {dims_ok}/100")


def test_learner_oracles():
    rng = np.random.default_rng(4)
    # KNN
    X = rng.integers(0, 4, size=(500, 3)).astype(float)
    y = rng.integers(0, 4, size=500)
    Q = rng.integers(0, 4, size=(50, 3)).astype(float)
    knn_ok = list(KNNClassifier(10).fit(X, y).predict(Q)) == [
        brute_knn(X.tolist(), y.tolist(), q.tolist(), 10) for q in Q]
    # QR: noiseless recovery and normal-equations residual
    A = rng.normal(size=(50, 4))
    beta = np.array([1.5, -2.0, 0.25, 3.0])
    m = LinearRegression().fit(A, A @ beta + 0.75)
    coef_err = max(float(np.max(np.abs(m.coef_ - beta))), abs(m.intercept_ - 0.75))
    A = rng.normal(size=(80, 6))
    b = rng.normal(size=80)
    r = np.linalg.norm(A @ lstsq_qr(A, b) - b)
    r_ne = np.linalg.norm(A @ np.linalg.solve(A.T @ A, A.T @ b) - b)
    res_err = abs(r - r_ne) / r_ne
    # NB hand posterior
    Xn = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0], [6.0, 5.0], [7.0, 8.0]])
    yn = np.array([0, 0, 0, 1, 1])
    q = [4.0, 4.0]
    logs = []
    for c in (0, 1):
        rows = Xn[yn == c]
        mu, var = rows.mean(0), rows.var(0)
        logs.append(np.log(len(rows) / 5) + sum(gaussian_logpdf(q[f], mu[f], var[f]) for f in range(2)))
    post = np.exp(np.array(logs) - max(logs))
    post /= post.sum()
    nb_err = float(np.max(np.abs(GaussianNB().fit(Xn, yn).predict_proba([q])[0] - post)))
    # DT on consistent data
    Xd = np.unique(rng.integers(0, 5, size=(200, 3)), axis=0).astype(float)
    yd = rng.integers(0, 3, size=len(Xd))
    dt_acc = float(np.mean(DecisionTreeClassifier().fit(Xd, yd).predict(Xd) == yd))
    # SVM vs long-run dual oracle
    Xs, ys = separable_2d(0, n=90)
    svm = LinearSVM(C=1.0).fit(Xs, ys)
    got = hinge_objective(svm.coef_[0], augment(Xs), np.where(ys == 1, 1.0, -1.0), svm.lam_)
    want = dual_pg_objective(Xs, ys, 1.0)
    svm_gap = abs(got - want) / want
    ok = (knn_ok and coef_err <= 1e-10 and res_err <= 1e-8 and nb_err <= 1e-9 and dt_acc == 1.0
          and svm_gap <= 0.01)
    assert record("learner oracles", ok,
                  f"knn exact={knn_ok}, qr coef {coef_err:.1e} (<= 1e-10), qr residual {res_err:.1e} "
                  f"(<= 1e-8), nb {nb_err:.1e} (<= 1e-9), dt train acc {dt_acc:.3f}, "
                  f"svm gap {100 * svm_gap:.3f}% (<= 1%)")


def test_metric_identities():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        a, p = rng.normal(size=20) * 10, rng.normal(size=20) * 10
        m = regression_metrics(p, a)
        worst = max(worst, abs(m["rmse"] ** 2 - m["mse"]) / max(1.0, m["mse"]))
    y = rng.normal(size=30)
    perfect = regression_metrics(y.copy(), y)
    row = (perfect["mae"], perfect["rmse"], perfect["r2"], perfect["mse"])
    ok = worst <= 1e-12 and row == (0.0, 0.0, 1.0, 0.0)
    assert record("metric identities", ok,
                  f"max |rmse^2 - mse| {worst:.1e} (<= 1e-12); perfect fit (MAE, RMSE, R2, MSE) = {row}")


def test_end_to_end_synthetic(tmp_path, capsys):
    t0 = time.perf_counter()
    prefix = tmp_path / "syn"
    assert main(["synth", "--nodes", "500", "--blocks", "2", "--p-in", "0.10", "--p-out", "0.01",
                 "--noise-attrs", "1", "--seed", "42", "--out-prefix", str(prefix)]) == 0
    accs = {}
    for mode in ("nfvr", "nns"):
        out = tmp_path / f"{mode}.json"
        assert main(["train-eval", "--edges", f"{prefix}.edges", "--attributes", f"{prefix}.attrs.csv",
                     "--target", "block", "--mode", mode, "--model", "knn", "--k", "10", "--h", "1",
                     "--train-fraction", "0.7", "--repetitions", "10", "--seed", "42",
                     "--out", str(out)]) == 0
        accs[mode] = json.loads(out.read_text())["metrics"]["accuracy"]
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    ok = accs["nfvr"] >= 0.90 and 0.40 <= accs["nns"] <= 0.60 and elapsed < 30.0
    assert record("end-to-end synthetic homophily", ok,
                  f"NFVR+KNN {accs['nfvr']:.3f} (>= 0.90), NNS+KNN {accs['nns']:.3f} (in [0.40, 0.60]), "
                  f"{elapsed:.1f}s (< 30s)")


def test_leakage():
    g = planted_partition(300, 3, 0.1, 0.01, noise_attrs=2, seed=9)
    target = 0
    changed = 0
    for seed in range(5):
        cfg = ExperimentConfig(target="block", mode="nnfvr", h=2, seed=seed)
        train, test = split(g, target, 0.7, seed)
        masked = build_features(g, cfg, test)
        unmasked = build_features(g, cfg, [])
        nns = masked.block_slice("nns")
        changed += int(np.sum(masked.values[train][:, nns] != unmasked.values[train][:, nns]))
        # the full pipeline rows do not move when test labels are rewritten
        col = np.array(g.columns[target])
        col[test] = np.random.default_rng(seed).integers(0, 4, size=len(test))
        other = g.with_column(target, g.attributes[target], col)
        changed += int(np.sum(build_features(other, cfg, test).values[train] != masked.values[train]))
    assert record("leakage", changed == 0,
                  f"{changed} train-row feature entries differ across 5 splits (exact)")


def _scaling_graph(n, seed=0, degree=10):
    rng = np.random.default_rng(seed)
    edges = rng.integers(0, n, size=(n * degree // 2, 2))
    levels = (2, 5, 8)
    attrs = [Attribute(f"a{q}", Kind.NOMINAL, tuple(f"v{r}" for r in range(k)) + (MISSING,), k)
             for q, k in enumerate(levels)]
    return from_edge_array(n, edges, attrs, [rng.integers(0, k + 1, size=n) for k in levels])


def test_scaling():
    sizes = (50_000, 100_000, 200_000)
    graphs = [_scaling_graph(n) for n in sizes]
    cfgs = [FeatureConfig(0, 1, proclivity=prone_matrix(g)) for g in graphs]
    runs = [[] for _ in sizes]
    for g, cfg in zip(graphs, cfgs):
        featurize_all(g, cfg)  # warm-up
    # round-robin over sizes so drift in machine load hits every size alike
    for _ in range(5):
        for i, (g, cfg) in enumerate(zip(graphs, cfgs)):
            t0 = time.perf_counter()
            featurize_all(g, cfg)
            runs[i].append(time.perf_counter() - t0)
    medians = [(g.m, statistics.median(r)) for g, r in zip(graphs, runs)]
    ratios = [medians[i + 1][1] / medians[i][1] for i in range(2)]
    ok = max(ratios) <= 2.5
    detail = ", ".join(f"m={m} {t * 1e3:.1f}ms" for m, t in medians)
    assert record("scaling", ok, f"{detail}; doubling ratios {ratios[0]:.2f}, {ratios[1]:.2f} (<= 2.5)")


def _caltech_files():
    root = Path(os.environ.get("NFVR_CALTECH_DIR", Path(__file__).parent / "data" / "caltech"))
    edges, attrs = root / "caltech.edges", root / "caltech.attrs.csv"
    return (edges, attrs) if edges.exists() and attrs.exists() else None


@pytest.mark.slow
def test_caltech_reproduction():
    files = _caltech_files()
    if files is None:
        record("caltech reproduction (optional)", True, "SKIPPED: data not supplied")
        pytest.skip("Caltech graph not supplied (set NFVR_CALTECH_DIR)")
    g = load_graph(*files, schema_options=ExperimentConfig(all_nominal=True).schema_options())
    results = {}
    for target, ref in (("dormitory", 88.88), ("year", 80.20)):
        cfg = ExperimentConfig(target=target, mode="nfvr", h=1, hop_weights=[1.0],
                               model=ModelSpec("knn", knn_k=10), train_fraction=0.7,
                               repetitions=10, all_nominal=True)
        acc = 100 * run_experiment(cfg, g).metrics["accuracy"]
        results[target] = (acc, ref)
    ok = all(abs(acc - ref) <= 5.0 for acc, ref in results.values())
    assert record("caltech reproduction (optional)", ok,
                  ", ".join(f"{t} {a:.2f} vs {r:.2f} (+/- 5)" for t, (a, r) in results.items()))
