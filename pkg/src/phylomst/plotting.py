"""Report figures: the inferred tree and the spanning-weight heatmap.

Rendered to files next to the delimited outputs; matplotlib is imported
lazily with the Agg backend so headless runs work.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .cost_oracle import CostMatrix
from .steiner_mst import PhyloTree


def _layout(tree: PhyloTree) -> dict[str, tuple[float, float]]:
    """x = depth from root, y = leaf rank / mean of children."""
    children: dict[str, list[str]] = {}
    for u, v in tree.edges:
        children.setdefault(u, []).append(v)
    depth = {tree.root: 0}
    for u, v in tree.edges:  # edges are emitted parent-before-child
        depth[v] = depth[u] + 1

    ys: dict[str, float] = {}
    next_leaf = [0.0]

    def place(node: str) -> float:
        kids = sorted(children.get(node, []))
        if not kids:
            ys[node] = next_leaf[0]
            next_leaf[0] += 1.0
        else:
            ys[node] = float(np.mean([place(c) for c in kids]))
        return ys[node]

    place(tree.root)
    return {n: (float(depth[n]), ys[n]) for n in depth}


def save_tree_figure(tree: PhyloTree, path: str | Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pos = _layout(tree)
    fig, ax = plt.subplots(figsize=(6, max(3, 0.4 * len(pos))))
    for u, v in tree.edges:
        (x0, y0), (x1, y1) = pos[u], pos[v]
        ax.plot([x0, x1], [y0, y1], color="0.4", lw=1.2, zorder=1)
    for name, (x, y) in pos.items():
        ax.scatter([x], [y], s=18, color="tab:blue", zorder=2)
        ax.annotate(name, (x, y), xytext=(4, 3), textcoords="offset points", fontsize=8)
    ax.set_xlabel("depth from root")
    ax.set_yticks([])
    ax.set_title(f"inferred tree (root = {tree.root})")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_weight_figure(costs: CostMatrix, path: str | Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    k = len(costs)
    W = costs.weight.copy()
    np.fill_diagonal(W, np.nan)
    fig, ax = plt.subplots(figsize=(max(4, 0.45 * k), max(3.5, 0.4 * k)))
    im = ax.imshow(W, cmap="viridis")
    fig.colorbar(im, ax=ax, label="w(u, v)  [nats]")
    ax.set_xticks(range(k), costs.ids, rotation=90, fontsize=7)
    ax.set_yticks(range(k), costs.ids, fontsize=7)
    ax.set_title("spanning-tree edge weights")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_figures(tree: PhyloTree, costs: CostMatrix, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        save_tree_figure(tree, out_dir / "tree.png"),
        save_weight_figure(costs, out_dir / "weights.png"),
    ]
