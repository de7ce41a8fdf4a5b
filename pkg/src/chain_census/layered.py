"""Layered distance configurations and exact counting.

A configuration is k+1 point layers plus k squared distances; the objects
counted are walks (consecutive distances match, repeats allowed), chains
(additionally all points pairwise distinct) and embeddings of a
distance-labeled tree.  All counts are exact Python integers.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass
from itertools import product

from .geometry import (
    CertificationError,
    DistanceSpec,
    Point,
    matches_distance,
    squared_distance,
)


@dataclass(frozen=True)
class Layer:
    points: tuple[Point, ...]
    label: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def coord_set(self) -> set:
        return {p.coords for p in self.points}

    def validate(self) -> None:
        ids = [p.id for p in self.points]
        if len(set(ids)) != len(ids):
            raise ValueError(f"layer {self.label}: point ids are not unique")
        coords = [p.coords for p in self.points]
        if len(set(coords)) != len(coords):
            raise ValueError(f"layer {self.label}: duplicate point coordinates")


def make_layer(points, label: int = 0) -> Layer:
    pts = tuple(
        p if isinstance(p, Point) else Point(tuple(p), i) for i, p in enumerate(points)
    )
    # re-id when the caller gave raw tuples or ids collide
    if len({p.id for p in pts}) != len(pts):
        pts = tuple(Point(p.coords, i) for i, p in enumerate(pts))
    return Layer(pts, label)


@dataclass(frozen=True)
class LayeredConfig:
    layers: tuple[Layer, ...]
    spec: DistanceSpec

    @property
    def k(self) -> int:
        return len(self.layers) - 1

    @property
    def dim(self) -> int:
        for layer in self.layers:
            if layer.points:
                return layer.points[0].dim
        return 0

    def validate(self) -> None:
        if len(self.layers) != self.spec.k + 1:
            raise ValueError(
                f"{len(self.layers)} layers but {self.spec.k} squared distances"
            )
        dim = None
        for layer in self.layers:
            layer.validate()
            for p in layer.points:
                if dim is None:
                    dim = p.dim
                elif p.dim != dim:
                    raise ValueError("layers mix dimensions")
                exact = p.is_exact()
                if self.spec.exact and not exact:
                    raise ValueError("exact spec requires rational coordinates")
                if not self.spec.exact and exact:
                    raise ValueError("tolerant spec requires float coordinates")

    def reversed(self) -> "LayeredConfig":
        return LayeredConfig(
            tuple(reversed(self.layers)),
            DistanceSpec(tuple(reversed(self.spec.delta2)), self.spec.eps),
        )


def make_config(layers, delta2, eps: float | None = None) -> LayeredConfig:
    lys = tuple(
        ly if isinstance(ly, Layer) else make_layer(ly, i + 1) for i, ly in enumerate(layers)
    )
    lys = tuple(Layer(ly.points, i + 1) for i, ly in enumerate(lys))
    cfg = LayeredConfig(lys, DistanceSpec(tuple(delta2), eps))
    cfg.validate()
    return cfg


@dataclass(frozen=True)
class BipartiteAdjacency:
    """Per consecutive layer pair: neighbors[i][p] lists the indices (into
    layer i+1) of points at the i-th squared distance from point p."""

    neighbors: tuple[tuple[tuple[int, ...], ...], ...]

    def edge_count(self, i: int) -> int:
        return sum(len(nb) for nb in self.neighbors[i])

    def total_edges(self) -> int:
        return sum(self.edge_count(i) for i in range(len(self.neighbors)))


def _grid_candidates(points_a, points_b, radius: float):
    """Candidate index pairs within `radius` via uniform grid hashing.

    Yields (i, j) supersets of all pairs at distance <= radius; exactness is
    left to the caller's distance predicate.
    """
    if not points_a or not points_b:
        return
    cell = radius * (1.0 + 1e-9)
    if cell <= 0.0:
        cell = 1.0
    dim = points_a[0].dim
    buckets: dict[tuple, list[int]] = defaultdict(list)
    for j, q in enumerate(points_b):
        key = tuple(math.floor(float(c) / cell) for c in q.coords)
        buckets[key].append(j)
    offsets = list(product((-1, 0, 1), repeat=dim))
    for i, p in enumerate(points_a):
        base = tuple(math.floor(float(c) / cell) for c in p.coords)
        for off in offsets:
            bucket = buckets.get(tuple(b + o for b, o in zip(base, off)))
            if bucket:
                for j in bucket:
                    yield i, j


def build_adjacency(
    config: LayeredConfig, strategy: str = "auto", certify: bool | None = None
) -> BipartiteAdjacency:
    """Adjacency lists for every consecutive layer pair.

    Strategies "brute" and "grid" must agree exactly; "auto" picks grid for
    large pairs.  In tolerant mode the guard-band certificate runs alongside
    (disable with certify=False); failures raise CertificationError.
    """
    if certify is None:
        certify = not config.spec.exact
    eps = config.spec.eps
    levels = []
    offenders = []
    for i in range(config.k):
        pa = config.layers[i].points
        pb = config.layers[i + 1].points
        d2 = config.spec.delta2[i]
        use_grid = strategy == "grid" or (
            strategy == "auto" and len(pa) * len(pb) > 4096
        )
        lists: list[list[int]] = [[] for _ in pa]
        if use_grid:
            reach2 = float(d2) + (100.0 * eps if certify and eps else (eps or 0.0))
            seen_pairs = _grid_candidates(pa, pb, math.sqrt(max(reach2, 0.0)))
            for a, b in seen_pairs:
                p, q = pa[a], pb[b]
                if matches_distance(p, q, d2, config.spec):
                    lists[a].append(b)
                elif certify and eps:
                    gap = abs(float(squared_distance(p.as_float(), q.as_float())) - float(d2))
                    if eps < gap <= 100.0 * eps:
                        offenders.append((p, q, gap))
        else:
            for a, p in enumerate(pa):
                for b, q in enumerate(pb):
                    if matches_distance(p, q, d2, config.spec):
                        lists[a].append(b)
                    elif certify and eps:
                        gap = abs(
                            float(squared_distance(p.as_float(), q.as_float())) - float(d2)
                        )
                        if eps < gap <= 100.0 * eps:
                            offenders.append((p, q, gap))
        levels.append(tuple(tuple(sorted(nb)) for nb in lists))
    if offenders:
        raise CertificationError(offenders)
    return BipartiteAdjacency(tuple(levels))


def certify_config(config: LayeredConfig) -> None:
    """Raise CertificationError if any consecutive pair sits in the guard band."""
    build_adjacency(config, strategy="auto", certify=True)


def _coord_classes(config: LayeredConfig):
    """Map coordinates to dense integer classes shared across layers."""
    ids: dict[tuple, int] = {}
    per_layer = []
    for layer in config.layers:
        row = []
        for p in layer.points:
            c = ids.setdefault(p.coords, len(ids))
            row.append(c)
        per_layer.append(row)
    return per_layer, len(ids)


def count_walks(
    config: LayeredConfig,
    adjacency: BipartiteAdjacency | None = None,
    threads: int = 1,
) -> int:
    """Tuples with matching consecutive distances, repetitions allowed.

    Layer-by-layer dynamic programming; the distinct-free upper surrogate
    for count_chains.  The first layer may be partitioned across workers;
    the summed result is identical for every partitioning.
    """
    if config.k == 0:
        return len(config.layers[0])
    adj = adjacency or build_adjacency(config)

    def push(start_indices) -> int:
        counts = [0] * len(config.layers[0])
        for p in start_indices:
            counts[p] = 1
        for i in range(config.k):
            nxt = [0] * len(config.layers[i + 1])
            level = adj.neighbors[i]
            for p, c in enumerate(counts):
                if c:
                    for q in level[p]:
                        nxt[q] += c
            counts = nxt
        return sum(counts)

    roots = range(len(config.layers[0]))
    if threads <= 1 or len(config.layers[0]) <= 1:
        return push(roots)
    from concurrent.futures import ThreadPoolExecutor

    chunks = [list(roots)[j::threads] for j in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(push, chunks))


def count_chains(
    config: LayeredConfig,
    adjacency: BipartiteAdjacency | None = None,
    threads: int = 1,
) -> int:
    """Tuples with matching consecutive distances and all points distinct.

    Depth-first backtracking over the adjacency with a visited set keyed by
    coordinates; identical results regardless of root partitioning.
    """
    classes, n_classes = _coord_classes(config)
    if config.k == 0:
        return len(set(classes[0]))
    adj = adjacency or build_adjacency(config)
    neighbors = adj.neighbors
    k = config.k

    def count_from_roots(roots) -> int:
        visited = bytearray(n_classes)

        def rec(i: int, p: int) -> int:
            if i == k:
                return 1
            total = 0
            nxt_classes = classes[i + 1]
            for q in neighbors[i][p]:
                c = nxt_classes[q]
                if not visited[c]:
                    visited[c] = 1
                    total += rec(i + 1, q)
                    visited[c] = 0
            return total

        total = 0
        cls0 = classes[0]
        for p in roots:
            c = cls0[p]
            visited[c] = 1
            total += rec(0, p)
            visited[c] = 0
        return total

    roots = range(len(config.layers[0]))
    if threads <= 1 or len(config.layers[0]) <= 1:
        return count_from_roots(roots)
    from concurrent.futures import ThreadPoolExecutor

    chunks = [list(roots)[j::threads] for j in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(count_from_roots, chunks))


def count_incidences(P: Layer, Q: Layer, d2, spec: DistanceSpec, strategy: str = "auto") -> int:
    """Ordered pairs (p, q) in P x Q realizing squared distance d2."""
    cfg = LayeredConfig((Layer(P.points, 1), Layer(Q.points, 2)), DistanceSpec((d2,), spec.eps))
    adj = build_adjacency(cfg, strategy=strategy, certify=False)
    return adj.edge_count(0)


@dataclass(frozen=True)
class LabeledTree:
    """A tree on vertices 0..vertex_count-1 with a squared distance per edge."""

    vertex_count: int
    edges: tuple[tuple[int, int, object], ...]

    def validate(self) -> None:
        if len(self.edges) != self.vertex_count - 1:
            raise ValueError("edge list is not a tree (wrong edge count)")
        seen = {0}
        adj = defaultdict(list)
        for a, b, d2 in self.edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise ValueError(f"edge ({a},{b}) out of vertex range")
            if not d2 > 0:
                raise ValueError("edge squared distances must be positive")
            adj[a].append(b)
            adj[b].append(a)
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != self.vertex_count:
            raise ValueError("edge list is disconnected or cyclic")

    def traversal(self):
        """(vertex, parent, d2) in BFS order from vertex 0; root has parent None."""
        adj = defaultdict(list)
        for a, b, d2 in self.edges:
            adj[a].append((b, d2))
            adj[b].append((a, d2))
        order = [(0, None, None)]
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w, d2 in adj[v]:
                if w not in seen:
                    seen.add(w)
                    order.append((w, v, d2))
                    queue.append(w)
        return order


def path_tree(delta2) -> LabeledTree:
    edges = tuple((i, i + 1, d2) for i, d2 in enumerate(delta2))
    return LabeledTree(len(edges) + 1, edges)


def count_tree_embeddings(layers, tree: LabeledTree, spec: DistanceSpec) -> int:
    """Tuples of distinct points realizing every labeled tree edge.

    `layers` is one Layer per tree vertex, or a single Layer replicated.
    Backtracks in root-to-leaf order; for a path this equals count_chains.
    """
    tree.validate()
    if isinstance(layers, Layer):
        layers = [layers] * tree.vertex_count
    layers = list(layers)
    if len(layers) != tree.vertex_count:
        raise ValueError("need one layer per tree vertex")
    ids: dict[tuple, int] = {}
    classes = []
    for layer in layers:
        classes.append([ids.setdefault(p.coords, len(ids)) for p in layer.points])
    order = tree.traversal()
    visited = bytearray(len(ids))

    def rec(step: int, placed: dict) -> int:
        if step == len(order):
            return 1
        v, parent, d2 = order[step]
        layer = layers[v]
        cls = classes[v]
        total = 0
        pp = placed[parent]
        for idx, p in enumerate(layer.points):
            c = cls[idx]
            if visited[c]:
                continue
            if matches_distance(p, pp, d2, spec):
                visited[c] = 1
                placed[v] = p
                total += rec(step + 1, placed)
                del placed[v]
                visited[c] = 0
        return total

    root_layer = layers[order[0][0]]
    root_cls = classes[order[0][0]]
    total = 0
    placed: dict = {}
    for idx, p in enumerate(root_layer.points):
        c = root_cls[idx]
        if visited[c]:
            continue
        visited[c] = 1
        placed[order[0][0]] = p
        total += rec(1, placed)
        placed.clear()
        visited[c] = 0
    return total


def _pair_tables(config: LayeredConfig):
    """Per consecutive layer pair: a boolean matrix of the distance predicate.

    Memoizes the (at most) |P_i|*|P_{i+1}| evaluations so the exhaustive
    oracles below stay usable at 10^5-tuple scale.
    """
    spec = config.spec
    tables = []
    for i in range(config.k):
        pa = config.layers[i].points
        pb = config.layers[i + 1].points
        d2 = spec.delta2[i]
        tables.append(
            [[matches_distance(p, q, d2, spec) for q in pb] for p in pa]
        )
    return tables


def enumerate_chains(config: LayeredConfig) -> set[tuple]:
    """Brute-force set of chain tuples (as coordinate tuples).

    Exhaustive product enumeration over all index tuples; the independent
    oracle for the counters at desk scale.
    """
    tables = _pair_tables(config)
    ranges = [range(len(layer.points)) for layer in config.layers]
    layers = [layer.points for layer in config.layers]
    out = set()
    for tup in product(*ranges):
        if all(tables[i][tup[i]][tup[i + 1]] for i in range(config.k)):
            coords = tuple(layers[i][j].coords for i, j in enumerate(tup))
            if len(set(coords)) == len(coords):
                out.add(coords)
    return out


def enumerate_walks_count(config: LayeredConfig) -> int:
    """Brute-force walk count by full product enumeration."""
    tables = _pair_tables(config)
    ranges = [range(len(layer.points)) for layer in config.layers]
    total = 0
    for tup in product(*ranges):
        if all(tables[i][tup[i]][tup[i + 1]] for i in range(config.k)):
            total += 1
    return total
