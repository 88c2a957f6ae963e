"""Weighted clique complexes with canonical simplex indexing.

A complex is built from a weighted graph: an i-simplex is an (i+1)-clique,
stored once as its sorted vertex tuple (the canonical orientation
representative).  Orientation is carried by permutation signs, weights are
stored per canonical representative, and every degree gets a dense,
lexicographically ordered index so matrix layouts are reproducible.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

__all__ = [
    "WeightedGraph",
    "Simplex",
    "WeightedComplex",
    "canonical_sign",
    "build_clique_complex",
    "weighted_degree",
    "induced_subcomplex",
    "drop_simplices",
    "complex_to_json",
    "complex_from_json",
]

Vertex = Hashable
WeightRule = Callable[[tuple], float]


def canonical_sign(vertices: Sequence[Vertex]) -> tuple[tuple, int]:
    """Sorted representative of an oriented vertex tuple and the sort parity.

    Returns ``(sorted_tuple, sign)`` with ``sign`` the signature of the
    permutation that sorts the input.  Duplicate vertices are degenerate and
    raise ``ValueError``.
    """
    t = tuple(vertices)
    if len(set(t)) != len(t):
        raise ValueError(f"degenerate simplex (repeated vertex): {t!r}")
    # parity by inversion count; tuples are tiny so O(k^2) is fine
    inversions = 0
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if t[i] > t[j]:
                inversions += 1
    sign = -1 if inversions % 2 else 1
    return tuple(sorted(t)), sign


class Simplex(NamedTuple):
    """Canonical simplex: geometric degree, sorted vertices, dense index."""

    degree: int
    vertices: tuple
    index: int


class WeightedGraph:
    """Locally finite weighted graph (V, m0, m1).

    ``m0`` maps each vertex to a positive weight; ``m1`` is a symmetric edge
    weight, and an edge exists exactly where ``m1 > 0``.  Loops are rejected
    unless ``allow_loops`` is set.
    """

    def __init__(self, m0: Mapping[Vertex, float], m1: Mapping[tuple, float], allow_loops: bool = False):
        self.vertices = sorted(m0)
        self.m0 = {}
        for v, w in m0.items():
            w = float(w)
            if w <= 0:
                raise ValueError(f"m0({v!r}) = {w} must be positive")
            self.m0[v] = w
        self.m1: dict[tuple, float] = {}
        self.adjacency: dict[Vertex, set] = {v: set() for v in self.vertices}
        for (u, v), w in m1.items():
            w = float(w)
            if w < 0:
                raise ValueError(f"m1({u!r},{v!r}) = {w} must be nonnegative")
            if u == v:
                if not allow_loops:
                    raise ValueError(f"loop at {u!r} not allowed")
                continue
            if u not in self.m0 or v not in self.m0:
                raise ValueError(f"edge ({u!r},{v!r}) references unknown vertex")
            key = (u, v) if u < v else (v, u)
            prev = self.m1.get(key)
            if prev is not None and prev != w:
                raise ValueError(f"asymmetric weight for edge {key!r}")
            if w > 0:
                self.m1[key] = w
                self.adjacency[key[0]].add(key[1])
                self.adjacency[key[1]].add(key[0])

    def edge_weight(self, u: Vertex, v: Vertex) -> float:
        key = (u, v) if u < v else (v, u)
        return self.m1.get(key, 0.0)

    def neighbors(self, v: Vertex) -> set:
        return self.adjacency[v]

    def common_neighbors(self, vertices: Iterable[Vertex]) -> set:
        vs = list(vertices)
        if not vs:
            return set()
        out = set(self.adjacency[vs[0]])
        for v in vs[1:]:
            out &= self.adjacency[v]
        return out

    def distances_from(self, roots: Iterable[Vertex]) -> dict:
        """Graph distance to a root set by BFS; unreachable vertices absent."""
        dist = {r: 0 for r in roots}
        frontier = list(dist)
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in self.adjacency[v]:
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        return dist


@dataclass
class WeightedComplex:
    """Finite weighted clique complex with per-degree canonical tables.

    ``simplices[i]`` lists degree-i simplices as sorted vertex tuples in
    lexicographic order; ``weights[i]`` is the aligned positive weight vector.
    ``extensions[i][j]`` lists ``(x, t)`` pairs: vertex ``x`` extends simplex
    ``j`` of degree ``i`` to the stored degree-(i+1) simplex with index ``t``.
    ``faces[i][j]`` lists ``(l, s)``: omitting position ``l`` of simplex ``j``
    gives the degree-(i-1) simplex with index ``s``.  Immutable after
    construction.
    """

    graph: WeightedGraph
    max_degree: int
    simplices: list[list[tuple]]
    weights: list[np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index: list[dict] = [
            {s: j for j, s in enumerate(table)} for table in self.simplices
        ]
        self.faces: list[list[list[tuple[int, int]]]] = [[]]
        for i in range(1, self.max_degree + 1):
            lower = self.index[i - 1]
            level = []
            for s in self.simplices[i]:
                row = []
                for l in range(len(s)):
                    face = s[:l] + s[l + 1:]
                    row.append((l, lower[face]))
                level.append(row)
            self.faces.append(level)
        self.extensions: list[list[list[tuple[Vertex, int]]]] = [
            [[] for _ in table] for table in self.simplices
        ]
        for i in range(1, self.max_degree + 1):
            for t, s in enumerate(self.simplices[i]):
                for l, j in self.faces[i][t]:
                    self.extensions[i - 1][j].append((s[l], t))

    def counts(self) -> tuple[int, ...]:
        return tuple(len(table) for table in self.simplices)

    def num_simplices(self) -> int:
        return sum(self.counts())

    def size(self, degree: int) -> int:
        return len(self.simplices[degree])

    def simplex(self, degree: int, index: int) -> Simplex:
        return Simplex(degree, self.simplices[degree][index], index)

    def index_of(self, degree: int, vertices: Sequence[Vertex]) -> int:
        key = tuple(vertices)
        idx = self.index[degree].get(key)
        if idx is None:
            raise KeyError(f"degree-{degree} simplex {key!r} not in complex")
        return idx

    def canonical_simplex(self, vertices: Sequence[Vertex]) -> tuple[Simplex, int]:
        """Canonical simplex and orientation sign for an ordered tuple."""
        key, sign = canonical_sign(vertices)
        degree = len(key) - 1
        return self.simplex(degree, self.index_of(degree, key)), sign

    def weight(self, degree: int, index: int) -> float:
        return float(self.weights[degree][index])

    def contains(self, vertices: Sequence[Vertex]) -> bool:
        key, _ = canonical_sign(vertices)
        return key in self.index[len(key) - 1] if len(key) - 1 <= self.max_degree else False

    def simplex_neighbors(self, degree: int, index: int) -> list[int]:
        """Same-degree simplices sharing all but one vertex (exposed query)."""
        out: set[int] = set()
        if degree == 0:
            s = self.simplices[0][index][0]
            return sorted(self.index[0][(w,)] for w in self.graph.neighbors(s))
        for _, face_idx in self.faces[degree][index]:
            for _, t in self.extensions[degree - 1][face_idx]:
                if t != index:
                    out.add(t)
        return sorted(out)

    def verify_face_closure(self) -> None:
        """Exhaustive check that every face of a stored simplex is stored."""
        for i in range(1, self.max_degree + 1):
            for s in self.simplices[i]:
                for face in itertools.combinations(s, i):
                    if face not in self.index[i - 1]:
                        raise AssertionError(f"missing face {face!r} of {s!r}")

    def verify_clique_soundness(self) -> None:
        """Every vertex pair of every stored simplex must be a positive edge."""
        for i in range(1, self.max_degree + 1):
            for s in self.simplices[i]:
                for u, v in itertools.combinations(s, 2):
                    if self.graph.edge_weight(u, v) <= 0:
                        raise AssertionError(f"simplex {s!r} has non-edge ({u!r},{v!r})")


def _resolve_weight(rule, vertices: tuple) -> float:
    if rule is None:
        return 1.0
    if callable(rule):
        w = float(rule(vertices))
    else:
        w = float(rule[len(vertices) - 1][vertices])
    if w <= 0:
        raise ValueError(f"weight rule gave nonpositive weight {w} on {vertices!r}")
    return w


def build_clique_complex(graph: WeightedGraph, n: int, weight_rule=None) -> WeightedComplex:
    """Enumerate all cliques of up to n+1 vertices as the degree <= n simplices.

    ``weight_rule`` assigns weights to simplices of degree >= 2 (degrees 0 and
    1 always carry the graph's m0/m1); it may be None (constant 1), a callable
    on the sorted vertex tuple, or a per-degree mapping ``{degree: {tuple: w}}``.
    """
    if n < 1:
        raise ValueError("max degree n must be >= 1")
    tables: list[list[tuple]] = [[(v,) for v in graph.vertices]]
    weights: list[np.ndarray] = [np.array([graph.m0[v] for v in graph.vertices], dtype=float)]

    edges = sorted(graph.m1)
    tables.append(list(edges))
    weights.append(np.array([graph.m1[e] for e in edges], dtype=float))

    level = edges
    level_cn = [
        sorted(x for x in graph.common_neighbors(e) if x > e[-1]) for e in edges
    ]
    for degree in range(2, n + 1):
        nxt: list[tuple] = []
        nxt_cn: list[list] = []
        for s, cn in zip(level, level_cn):
            adj_last = graph.adjacency
            for x in cn:
                t = s + (x,)
                nxt.append(t)
                nxt_cn.append([y for y in cn if y > x and y in adj_last[x]])
        order = sorted(range(len(nxt)), key=nxt.__getitem__)
        level = [nxt[k] for k in order]
        level_cn = [nxt_cn[k] for k in order]
        tables.append(level)
        weights.append(np.array([_resolve_weight(weight_rule, s) for s in level], dtype=float))

    return WeightedComplex(graph=graph, max_degree=n, simplices=tables, weights=weights)


def weighted_degree(cx: WeightedComplex, degree: int, index: int) -> float:
    """Weight-normalized count of cofaces: (1/m(s)) * sum of coface weights.

    Top-degree simplices have no stored cofaces and return 0.
    """
    if degree == cx.max_degree:
        return 0.0
    m_up = cx.weights[degree + 1]
    total = sum(m_up[t] for _, t in cx.extensions[degree][index])
    return float(total / cx.weights[degree][index])


def induced_subcomplex(cx: WeightedComplex, region: Iterable[Vertex]) -> WeightedComplex:
    """Keep exactly the simplices with all vertices inside ``region``."""
    region = set(region)
    if not region:
        raise ValueError("empty region")
    m0 = {v: cx.graph.m0[v] for v in cx.graph.vertices if v in region}
    m1 = {e: w for e, w in cx.graph.m1.items() if e[0] in region and e[1] in region}
    sub = WeightedGraph(m0, m1)
    tables, weights = [], []
    for i in range(cx.max_degree + 1):
        keep = [(s, w) for s, w in zip(cx.simplices[i], cx.weights[i]) if all(v in region for v in s)]
        tables.append([s for s, _ in keep])
        weights.append(np.array([w for _, w in keep], dtype=float))
    return WeightedComplex(graph=sub, max_degree=cx.max_degree, simplices=tables,
                           weights=weights, meta=dict(cx.meta, region_size=len(region)))


def drop_simplices(cx: WeightedComplex, degree: int, keep: Callable[[tuple], bool]) -> WeightedComplex:
    """New complex without the degree-``degree`` simplices failing ``keep``.

    Cofaces of dropped simplices are dropped as well, preserving face closure.
    """
    dropped = {s for s in cx.simplices[degree] if not keep(s)}
    tables, weights = [], []
    for i in range(cx.max_degree + 1):
        if i < degree:
            tables.append(list(cx.simplices[i]))
            weights.append(cx.weights[i].copy())
            continue
        pairs = [
            (s, w) for s, w in zip(cx.simplices[i], cx.weights[i])
            if not any(set(d) <= set(s) for d in dropped)
        ] if i > degree else [
            (s, w) for s, w in zip(cx.simplices[i], cx.weights[i]) if s not in dropped
        ]
        tables.append([s for s, _ in pairs])
        weights.append(np.array([w for _, w in pairs], dtype=float))
    return WeightedComplex(graph=cx.graph, max_degree=cx.max_degree,
                           simplices=tables, weights=weights, meta=dict(cx.meta))


def reweighted(cx: WeightedComplex, weight_fn: Callable[[int, tuple], float],
               meta: dict | None = None) -> WeightedComplex:
    """Same simplex tables with every weight replaced by ``weight_fn(degree, s)``."""
    m0 = {v: weight_fn(0, (v,)) for v in cx.graph.vertices}
    m1 = {e: weight_fn(1, e) for e in cx.graph.m1}
    graph = WeightedGraph(m0, m1)
    tables = [list(t) for t in cx.simplices]
    weights = [
        np.array([weight_fn(i, s) for s in cx.simplices[i]], dtype=float)
        for i in range(cx.max_degree + 1)
    ]
    new_meta = dict(cx.meta)
    new_meta.update(meta or {})
    return WeightedComplex(graph=graph, max_degree=cx.max_degree,
                           simplices=tables, weights=weights, meta=new_meta)


# --- description JSON -------------------------------------------------------

def _encode_vertex(v):
    return list(v) if isinstance(v, tuple) else v


def _decode_vertex(v):
    return tuple(_decode_vertex(x) for x in v) if isinstance(v, list) else v


def complex_to_json(cx: WeightedComplex) -> dict:
    """Complex description document (vertices/edges/max_degree/weights)."""
    doc = {
        "vertices": [{"id": _encode_vertex(v), "m0": cx.graph.m0[v]} for v in cx.graph.vertices],
        "edges": [
            {"u": _encode_vertex(u), "v": _encode_vertex(v), "m1": w}
            for (u, v), w in sorted(cx.graph.m1.items())
        ],
        "max_degree": cx.max_degree,
        "weights": {
            str(i): [
                {"simplex": [_encode_vertex(v) for v in s], "m": float(w)}
                for s, w in zip(cx.simplices[i], cx.weights[i])
            ]
            for i in range(2, cx.max_degree + 1)
        },
    }
    if cx.meta:
        doc["meta"] = {k: cx.meta[k] for k in sorted(cx.meta) if _json_safe(cx.meta[k])}
    return doc


def _json_safe(x) -> bool:
    try:
        json.dumps(x)
        return True
    except TypeError:
        return False


def complex_from_json(doc: dict) -> WeightedComplex:
    """Rebuild a complex from its description document.

    Explicit per-degree weight lists define that degree's simplices exactly;
    degrees without a list default to weight 1 on every clique whose faces
    are present.
    """
    m0 = {_decode_vertex(item["id"]): float(item["m0"]) for item in doc["vertices"]}
    m1 = {
        (_decode_vertex(item["u"]), _decode_vertex(item["v"])): float(item["m1"])
        for item in doc["edges"]
    }
    graph = WeightedGraph(m0, m1)
    n = int(doc["max_degree"])
    rule_doc = doc.get("weight_rule")
    explicit = {
        int(k): {tuple(_decode_vertex(v) for v in item["simplex"]): float(item["m"]) for item in lst}
        for k, lst in (doc.get("weights") or {}).items()
    }

    if rule_doc and rule_doc.get("kind") == "radial":
        from .generators import radial_weighting  # deferred; generators imports this module

        cx = build_clique_complex(graph, n)
        base = {_decode_vertex(v) for v in rule_doc["base"]}
        return radial_weighting(cx, base, float(rule_doc["alpha"]))

    cx = build_clique_complex(graph, n)
    if not explicit:
        return cx
    for degree in sorted(explicit):
        table = explicit[degree]
        unknown = set(table) - set(cx.simplices[degree])
        if unknown:
            raise ValueError(f"degree-{degree} weights reference non-cliques: {sorted(unknown)[:3]!r}")
        cx = drop_simplices(cx, degree, lambda s, t=table: s in t)
        w = cx.weights[degree]
        for j, s in enumerate(cx.simplices[degree]):
            w[j] = table[s]
    return cx
