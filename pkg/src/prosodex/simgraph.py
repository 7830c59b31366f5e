"""Document-similarity network: cosine weights, thresholding, layout, export.

Each document becomes a node; edge weights are cosine similarities between
standardized feature vectors, and edges below a threshold are dropped.  The
layout is a seeded Fruchterman-Reingold embedding suitable for SVG output.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .corpus import POETRY, PROSE
from .errors import ConfigError, DomainError
from .features import apply_standardizer, fit_standardizer


@dataclass(frozen=True)
class GraphNode:
    doc_id: str
    label: str


@dataclass(frozen=True)
class GraphEdge:
    """Undirected edge between node indices, stored with source < target."""

    source: int
    target: int
    weight: float


@dataclass(frozen=True)
class SimilarityGraph:
    nodes: tuple
    edges: tuple
    threshold: float


@dataclass(frozen=True)
class Layout:
    """Node coordinates inside a square frame of the given side length."""

    positions: tuple
    frame: float


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(
            f"vector lengths differ: {a.shape} vs {b.shape}")
    sq_a = float(a @ a)
    sq_b = float(b @ b)
    if sq_a == 0.0 or sq_b == 0.0:
        return 0.0
    # One rooted product keeps identical and negated inputs at exactly +-1.
    denominator = math.sqrt(sq_a * sq_b)
    if not math.isfinite(denominator):
        denominator = math.sqrt(sq_a) * math.sqrt(sq_b)
    value = float(a @ b) / denominator
    # Rounding can push |value| past 1; the invariant wins.
    return max(-1.0, min(1.0, value))


def build_graph(vectors, selected=None, threshold: float = 0.5) -> SimilarityGraph:
    """Pairwise-similarity graph over feature vectors.

    Columns are standardized over the whole collection before similarity is
    measured; `selected` restricts the comparison to those column indices
    (None keeps all).  An edge survives iff its weight >= threshold.
    """
    if len(vectors) < 2:
        raise DomainError("need at least two documents to build a graph")
    matrix = np.array([v.values for v in vectors], dtype=float)
    z = apply_standardizer(fit_standardizer(matrix), matrix)
    if selected is not None:
        z = z[:, list(selected)]
    nodes = tuple(GraphNode(doc_id=v.doc_id, label=v.label) for v in vectors)
    edges = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            weight = cosine_similarity(z[i], z[j])
            if weight >= threshold:
                edges.append(GraphEdge(source=i, target=j, weight=weight))
    return SimilarityGraph(nodes=nodes, edges=tuple(edges),
                           threshold=threshold)


def class_edge_density(graph: SimilarityGraph, label: str) -> float:
    """Fraction of same-label node pairs that are connected."""
    members = [i for i, node in enumerate(graph.nodes) if node.label == label]
    possible = len(members) * (len(members) - 1) // 2
    if possible == 0:
        raise DomainError(f"need two or more {label!r} nodes for a density")
    inside = set(members)
    present = sum(1 for e in graph.edges
                  if e.source in inside and e.target in inside)
    return present / possible


def layout_fr(graph: SimilarityGraph, iterations: int = 500,
              area: float = 1.0, seed: int = 0) -> Layout:
    """Fruchterman-Reingold embedding of the graph in a square frame.

    Repulsion k^2/d acts between all node pairs and attraction d^2/k along
    edges, scaled by edge weight; displacement per step is capped by a
    temperature cooling linearly from 0.1*sqrt(area).  Deterministic in
    (graph, iterations, area, seed).
    """
    count = len(graph.nodes)
    if count == 0:
        raise DomainError("cannot lay out an empty graph")
    if iterations < 1 or area <= 0.0:
        raise DomainError("iterations must be >= 1 and area positive")
    side = math.sqrt(area)
    if count == 1:
        return Layout(positions=((side / 2.0, side / 2.0),), frame=side)

    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, side, size=(count, 2))
    k = math.sqrt(area / count)
    start_temp = 0.1 * side
    src = np.array([e.source for e in graph.edges], dtype=int)
    dst = np.array([e.target for e in graph.edges], dtype=int)
    pull_scale = np.array([e.weight / k for e in graph.edges], dtype=float)

    for step in range(iterations):
        temp = start_temp * (1.0 - step / iterations)
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(delta[..., 0], delta[..., 1])
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-9)
        disp = (delta / (dist * dist)[..., None]).sum(axis=1) * (k * k)
        if len(src):
            span = pos[src] - pos[dst]
            gap = np.maximum(np.hypot(span[:, 0], span[:, 1]), 1e-9)
            # d^2/k along the unit vector collapses to d * dist / k.
            pull = span * (gap * pull_scale)[:, None]
            np.subtract.at(disp, src, pull)
            np.add.at(disp, dst, pull)
        length = np.maximum(np.hypot(disp[:, 0], disp[:, 1]), 1e-9)
        pos += disp / length[:, None] * np.minimum(length, temp)[:, None]
        np.clip(pos, 0.0, side, out=pos)

    return Layout(positions=tuple((float(x), float(y)) for x, y in pos),
                  frame=side)


NODE_COLORS = {POETRY: "#d62728", PROSE: "#1f77b4"}
FALLBACK_COLOR = "#7f7f7f"

_SVG_SIZE = 640
_SVG_MARGIN = 24
_NODE_RADIUS = 6


def _graph_payload(graph: SimilarityGraph, layout: Layout) -> dict:
    nodes = [{"id": node.doc_id, "label": node.label,
              "x": layout.positions[i][0], "y": layout.positions[i][1]}
             for i, node in enumerate(graph.nodes)]
    edges = [{"source": graph.nodes[e.source].doc_id,
              "target": graph.nodes[e.target].doc_id,
              "weight": e.weight} for e in graph.edges]
    return {"threshold": graph.threshold, "nodes": nodes, "edges": edges}


def _export_json(graph: SimilarityGraph, layout: Layout) -> bytes:
    text = json.dumps(_graph_payload(graph, layout), indent=2)
    return (text + "\n").encode("utf-8")


def _export_dot(graph: SimilarityGraph, layout: Layout) -> bytes:
    lines = ["graph similarity {"]
    for node in graph.nodes:
        lines.append(f'  "{node.doc_id}" [label="{node.label}"];')
    for e in graph.edges:
        lines.append(f'  "{graph.nodes[e.source].doc_id}" -- '
                     f'"{graph.nodes[e.target].doc_id}" '
                     f'[weight={e.weight!r}];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _to_pixels(point, frame: float):
    scale = (_SVG_SIZE - 2 * _SVG_MARGIN) / frame
    x = _SVG_MARGIN + point[0] * scale
    # SVG's y axis points down; flip so the frame keeps its orientation.
    y = _SVG_SIZE - _SVG_MARGIN - point[1] * scale
    return x, y


def _export_svg(graph: SimilarityGraph, layout: Layout) -> bytes:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_SIZE}" '
        f'height="{_SVG_SIZE}" viewBox="0 0 {_SVG_SIZE} {_SVG_SIZE}">',
        f'  <rect width="{_SVG_SIZE}" height="{_SVG_SIZE}" fill="#ffffff"/>',
        '  <g stroke="#9a9a9a" stroke-opacity="0.6">',
    ]
    for e in graph.edges:
        x1, y1 = _to_pixels(layout.positions[e.source], layout.frame)
        x2, y2 = _to_pixels(layout.positions[e.target], layout.frame)
        width = 0.5 + e.weight if e.weight > 0.0 else 0.5
        parts.append(f'    <line x1="{x1:.2f}" y1="{y1:.2f}" '
                     f'x2="{x2:.2f}" y2="{y2:.2f}" '
                     f'stroke-width="{width:.2f}"/>')
    parts.append("  </g>")
    parts.append("  <g>")
    for i, node in enumerate(graph.nodes):
        x, y = _to_pixels(layout.positions[i], layout.frame)
        color = NODE_COLORS.get(node.label, FALLBACK_COLOR)
        parts.append(f'    <circle cx="{x:.2f}" cy="{y:.2f}" '
                     f'r="{_NODE_RADIUS}" fill="{color}">'
                     f'<title>{node.doc_id}</title></circle>')
    parts.append("  </g>")
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


_EXPORTERS = {"json": _export_json, "dot": _export_dot, "svg": _export_svg}


def export_graph(graph: SimilarityGraph, layout: Layout,
                 format: str = "svg") -> bytes:
    try:
        exporter = _EXPORTERS[format]
    except KeyError:
        raise ConfigError(
            f"unknown export format {format!r}; "
            f"pick one of {sorted(_EXPORTERS)}") from None
    return exporter(graph, layout)
