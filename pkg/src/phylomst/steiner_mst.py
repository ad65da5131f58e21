"""Minimum spanning tree over the complete terminal graph, rooting, and
tree-cost evaluation in both the directed and the symmetric form."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .cost_oracle import CostMatrix
from .errors import ModelError


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class PhyloTree:
    """Rooted tree whose nodes are exactly the input samples."""

    root: str
    parent: dict[str, str | None]
    edges: tuple[tuple[str, str], ...]  # (parent, child)

    @property
    def nodes(self) -> list[str]:
        return list(self.parent)


def kruskal_mst(costs: CostMatrix) -> list[tuple[str, str]]:
    """Deterministic Kruskal on the complete graph: ties broken by the
    lexicographically smallest id pair.  Returns undirected edges as
    id pairs sorted within each pair."""
    ids = costs.ids
    k = len(ids)
    if k < 2:
        raise ModelError("need at least 2 samples for a spanning tree")
    candidates = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = sorted((ids[i], ids[j]))
            candidates.append((float(costs.weight[i, j]), a, b))
    candidates.sort()
    uf = UnionFind(ids)
    chosen: list[tuple[str, str]] = []
    for w, a, b in candidates:
        if uf.union(a, b):
            chosen.append((a, b))
            if len(chosen) == k - 1:
                break
    return chosen


def root_tree(
    nodes: list[str], edges: list[tuple[str, str]], root: str | None = None
) -> PhyloTree:
    """Orient an undirected spanning tree away from ``root`` (default:
    lexicographically smallest id); children are visited in sorted order."""
    nodes = sorted(set(nodes))
    if root is None:
        root = nodes[0]
    elif root not in nodes:
        raise ModelError(f"unknown root id {root!r}")
    adj: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        if a not in adj or b not in adj:
            raise ModelError(f"edge ({a!r}, {b!r}) references an unknown node")
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[str, str | None] = {root: None}
    directed: list[tuple[str, str]] = []
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in parent:
                parent[v] = u
                directed.append((u, v))
                queue.append(v)
    if len(parent) != len(nodes):
        raise ModelError("edges do not form a spanning tree")
    if len(edges) != len(nodes) - 1:
        raise ModelError(f"a spanning tree on {len(nodes)} nodes needs {len(nodes) - 1} edges")
    return PhyloTree(root=root, parent=parent, edges=tuple(directed))


def tree_cost_directed(tree: PhyloTree, costs: CostMatrix) -> float:
    """phi(root) + sum of directed edge costs phi(parent, child)."""
    total = costs.phi_node(tree.root)
    for u, v in tree.edges:
        total += costs.phi_edge(u, v)
    return total


def tree_cost_symmetric(tree: PhyloTree, costs: CostMatrix) -> float:
    """Sum of symmetric edge weights w' plus all node costs phi(v)."""
    total = sum(costs.phi_node(v) for v in tree.parent)
    for u, v in tree.edges:
        total += costs.sym_weight(u, v)
    return total


def tree_total_weight(tree: PhyloTree, costs: CostMatrix) -> float:
    """Sum of spanning-tree weights w over the tree edges."""
    return sum(costs.w(u, v) for u, v in tree.edges)


def spider_quotient(
    center: str,
    terminals: list[str],
    costs: CostMatrix,
    center_is_terminal: bool = False,
) -> float:
    """Quotient cost of the spider centered at ``center`` reaching every
    terminal: (c(center) + sum of cheapest center-terminal paths) / |S|.

    Path costs use symmetric edge weights w' plus the node costs of
    interior vertices; terminal node costs count as zero, matching the
    contracted form of the spider-shrinking argument.  Pass
    ``center_is_terminal=True`` to zero the center cost when the center is
    a terminal of the instance without listing it in ``terminals``.
    """
    terms = sorted(set(terminals))
    if len(terms) < 2:
        raise ModelError("spider quotient needs at least 2 terminals")
    allowed = set(terms) | {center}
    c = 0.0 if (center in terms or center_is_terminal) else costs.phi_node(center)
    total = c
    for u in terms:
        if u == center:
            continue
        total += _min_path_cost(costs, center, u, allowed)
    return total / len(terms)


def _min_path_cost(costs: CostMatrix, src: str, dst: str, allowed: set[str]) -> float:
    """Cheapest simple path src -> dst through ``allowed``; interior nodes
    contribute their phi(v).  Exhaustive (weights may be negative)."""
    best = costs.sym_weight(src, dst)
    interior = [n for n in allowed if n not in (src, dst)]

    def extend(cur: str, used: set[str], acc: float) -> None:
        nonlocal best
        for nxt in interior:
            if nxt in used:
                continue
            step = acc + costs.sym_weight(cur, nxt) + costs.phi_node(nxt)
            close = step + costs.sym_weight(nxt, dst)
            if close < best:
                best = close
            extend(nxt, used | {nxt}, step)

    extend(src, {src}, 0.0)
    return best
