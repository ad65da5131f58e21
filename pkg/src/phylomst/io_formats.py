"""File formats: FASTA sequences, sample-location TSV, geo-graph TSV,
GTR model files, Newick output, and the edge table."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .cost_oracle import CostMatrix, Sample
from .errors import ParseError
from .geo_rw import GeoGraph
from .steiner_mst import PhyloTree
from .substitution import GTR


def parse_fasta(path: str | Path, alphabet: str | None = None) -> list[Sample]:
    """Read a FASTA file into samples (no locations); sequences are
    uppercased, lengths must agree, ids must be unique."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc

    samples: list[Sample] = []
    seen: dict[str, int] = {}
    current_id: str | None = None
    chunks: list[str] = []
    header_line = 0

    def flush() -> None:
        nonlocal current_id, chunks
        if current_id is None:
            return
        seq = "".join(chunks).upper()
        if not seq:
            raise ParseError(f"{path}:{header_line}: record {current_id!r} has no sequence")
        samples.append(Sample(id=current_id, sequence=seq))
        current_id, chunks = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            name = line[1:].split()[0] if line[1:].split() else ""
            if not name:
                raise ParseError(f"{path}:{lineno}: empty FASTA header")
            if name in seen:
                raise ParseError(
                    f"{path}:{lineno}: duplicate id {name!r} (first seen on line {seen[name]})"
                )
            seen[name] = lineno
            current_id = name
            header_line = lineno
        else:
            if current_id is None:
                raise ParseError(f"{path}:{lineno}: sequence data before any header")
            chunks.append(line)
    flush()

    if not samples:
        raise ParseError(f"{path}: no FASTA records found")
    lengths = {len(s.sequence) for s in samples}
    if len(lengths) != 1:
        detail = ", ".join(f"{s.id}={len(s.sequence)}" for s in samples)
        raise ParseError(f"{path}: ragged sequence lengths ({detail})")
    if alphabet is not None:
        allowed = set(alphabet)
        for s in samples:
            bad = sorted(set(s.sequence) - allowed)
            if bad:
                raise ParseError(
                    f"{path}: record {s.id!r} contains symbols {bad} outside alphabet {alphabet!r}"
                )
    return samples


def parse_locations(path: str | Path) -> dict[str, int]:
    """TSV 'sample_id<TAB>node' -> id-to-node map."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    mapping: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'id<TAB>node', got {raw!r}")
        sample_id, node_txt = parts
        try:
            node = int(node_txt)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: node id {node_txt!r} is not an integer") from None
        if node < 0:
            raise ParseError(f"{path}:{lineno}: node id must be nonnegative")
        if sample_id in mapping:
            raise ParseError(f"{path}:{lineno}: duplicate sample id {sample_id!r}")
        mapping[sample_id] = node
    if not mapping:
        raise ParseError(f"{path}: no location records found")
    return mapping


def parse_geo_graph(path: str | Path) -> GeoGraph:
    """TSV 'u<TAB>v<TAB>weight'; duplicate edges are summed."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'u<TAB>v<TAB>weight', got {raw!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: malformed edge {raw!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"{path}:{lineno}: node ids must be nonnegative")
        if not (math.isfinite(w) and w > 0):
            raise ParseError(f"{path}:{lineno}: edge weight must be positive, got {w}")
        edges.append((u, v, w))
    if not edges:
        raise ParseError(f"{path}: no edges found")
    return GeoGraph.from_edges(edges)


def parse_gtr_file(path: str | Path) -> GTR:
    """Plain-text GTR model: line 1 'gtr m', line 2 the stationary vector,
    then the upper triangle of the exchangeability matrix."""
    path = Path(path)
    try:
        lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ParseError(f"{path}: empty GTR model file")
    head = lines[0].split()
    if len(head) != 2 or head[0].lower() != "gtr":
        raise ParseError(f"{path}:1: expected header 'gtr m', got {lines[0]!r}")
    try:
        m = int(head[1])
    except ValueError:
        raise ParseError(f"{path}:1: alphabet size {head[1]!r} is not an integer") from None
    if m < 2:
        raise ParseError(f"{path}:1: alphabet size must be >= 2")
    if len(lines) < 2:
        raise ParseError(f"{path}: missing stationary vector line")
    try:
        pi = [float(x) for x in lines[1].split()]
    except ValueError:
        raise ParseError(f"{path}:2: malformed stationary vector") from None
    if len(pi) != m:
        raise ParseError(f"{path}:2: expected {m} stationary values, got {len(pi)}")
    tokens: list[float] = []
    for lineno, line in enumerate(lines[2:], start=3):
        try:
            tokens.extend(float(x) for x in line.split())
        except ValueError:
            raise ParseError(f"{path}:{lineno}: malformed exchangeability value") from None
    need = m * (m - 1) // 2
    if len(tokens) != need:
        raise ParseError(
            f"{path}: expected {need} upper-triangle exchangeability values, got {len(tokens)}"
        )
    S = np.zeros((m, m))
    pos = 0
    for i in range(m):
        for j in range(i + 1, m):
            S[i, j] = S[j, i] = tokens[pos]
            pos += 1
    return GTR(pi=pi, exchange=S)


def newick_string(tree: PhyloTree) -> str:
    """Newick with every node labeled by its sample id; children in sorted
    order so output is reproducible."""
    children: dict[str, list[str]] = {}
    for u, v in tree.edges:
        children.setdefault(u, []).append(v)

    def render(node: str) -> str:
        label = _newick_label(node)
        kids = sorted(children.get(node, []))
        if not kids:
            return label
        return "(" + ",".join(render(c) for c in kids) + ")" + label

    return render(tree.root) + ";"


def _newick_label(name: str) -> str:
    specials = set("();,:[]' \t")
    if any(c in specials for c in name):
        return "'" + name.replace("'", "''") + "'"
    return name


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.10g}"


def edges_tsv(tree: PhyloTree, costs: CostMatrix) -> str:
    """Edge table: parent, child, spanning weight w, directed cost phi(u,v),
    and the optimizing duration t_star."""
    lines = ["parent\tchild\tw\tphi_uv\tt_star"]
    for u, v in tree.edges:
        i, j = costs.index(u), costs.index(v)
        lines.append(
            "\t".join(
                [u, v, _fmt(float(costs.weight[i, j])), _fmt(float(costs.phi[i, j])), _fmt(float(costs.t_star[i, j]))]
            )
        )
    return "\n".join(lines) + "\n"


def write_fasta(samples: list[Sample], path: str | Path, width: int = 70) -> None:
    out = []
    for s in samples:
        out.append(f">{s.id}")
        for i in range(0, len(s.sequence), width):
            out.append(s.sequence[i : i + width])
    Path(path).write_text("\n".join(out) + "\n")


def write_locations(samples: list[Sample], path: str | Path) -> None:
    lines = [f"{s.id}\t{s.location}" for s in samples]
    Path(path).write_text("\n".join(lines) + "\n")
