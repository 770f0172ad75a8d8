import numpy as np
import pytest

from nfvr.graph import MISSING, Attribute, Kind, from_edge_array


def gnp_edges(n, p, rng):
    """Erdos-Renyi edge list from a dense coin-flip upper triangle."""
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return np.column_stack([iu[keep], ju[keep]])


def random_attributed_graph(n, p, seed, levels=(3,), missing_rate=0.1):
    """G(n, p) with nominal attributes of the given level counts (missing level added)."""
    rng = np.random.default_rng(seed)
    e = gnp_edges(n, p, rng)
    attrs, cols = [], []
    for q, k in enumerate(levels):
        attrs.append(Attribute(f"a{q}", Kind.NOMINAL, tuple(f"v{r}" for r in range(k)) + (MISSING,), k))
        col = rng.integers(0, k, size=n)
        col[rng.random(n) < missing_rate] = k
        cols.append(col)
    return from_edge_array(n, e, attrs, cols)


def dense_adjacency(g):
    A = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges():
        A[u, v] = A[v, u] = 1
    return A


def floyd_warshall(A):
    """All-pairs hop distances; inf where unreachable."""
    n = len(A)
    D = np.where(A > 0, 1.0, np.inf)
    np.fill_diagonal(D, 0.0)
    for k in range(n):
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    return D


@pytest.fixture
def path3():
    attrs = [Attribute("gender", Kind.NOMINAL, ("M", "F", MISSING), 2)]
    return from_edge_array(3, [(0, 1), (1, 2)], attrs, [np.array([0, 1, 2])])


# acceptance verdicts, echoed in the terminal summary so they show up without -s
ACCEPTANCE: list[str] = []


def record(criterion, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
