"""Shared test helpers: random graph/model factories and the acceptance
log that is echoed at the end of the pytest run."""

from __future__ import annotations

import numpy as np

from phylomst import GTR, GeoGraph

ACCEPTANCE_LOG: list[str] = []


def record(ok: bool, label: str, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {label}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LOG.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


def random_mixing_graph(rng: np.random.Generator, n_nodes: int) -> GeoGraph:
    """Random connected non-bipartite weighted graph: a random spanning
    tree, a few extra edges, and one self-loop to kill bipartiteness."""
    edges: list[tuple[int, int, float]] = []
    order = rng.permutation(n_nodes)
    for i in range(1, n_nodes):
        u = int(order[rng.integers(0, i)])
        v = int(order[i])
        edges.append((u, v, float(rng.uniform(0.5, 2.0))))
    extra = int(rng.integers(0, n_nodes))
    for _ in range(extra):
        u, v = rng.integers(0, n_nodes, size=2)
        if u != v:
            edges.append((int(u), int(v), float(rng.uniform(0.5, 2.0))))
    loop = int(rng.integers(0, n_nodes))
    edges.append((loop, loop, float(rng.uniform(0.2, 1.0))))
    return GeoGraph.from_edges(edges, num_nodes=n_nodes)


def random_gtr(rng: np.random.Generator, m: int = 4) -> GTR:
    pi = rng.uniform(0.5, 2.0, size=m)
    pi /= pi.sum()
    S = np.zeros((m, m))
    iu = np.triu_indices(m, 1)
    S[iu] = rng.uniform(0.5, 2.0, size=len(iu[0]))
    S = S + S.T
    return GTR(pi=pi, exchange=S)


def random_sequences(rng: np.random.Generator, model, count: int, n: int) -> list[str]:
    pi = model.stationary()
    out = []
    for _ in range(count):
        idx = rng.choice(model.size, size=n, p=pi)
        out.append("".join(model.alphabet[i] for i in idx))
    return out
