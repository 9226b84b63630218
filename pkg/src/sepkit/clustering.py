"""Edge-disjoint clusterings: weak and refined r-clusterings, the nested
hierarchy down to single-edge leaves, and the dynamic active-vertex layer.

A clustering partitions the edge set into connected subgraphs ("clusters");
a vertex shared by two clusters is a boundary vertex of both.  The weak
r-clustering is built by recursive separator splits with a large ell (big
separators found fast), refinement re-splits boundary-heavy clusters under
boundary-uniform weights, and the nested hierarchy re-splits every cluster
under two weightings (vertex-uniform, then boundary-uniform where needed)
so that both cluster sizes and boundary counts decay geometrically.

Children of a cluster are materialized lazily: each cluster carries its own
split seed, so the hierarchy is identical no matter in which order children
are demanded.  materialize_all() forces the whole tree (tests, CLI dumps).

The dynamic layer (ActiveState) maintains, under passive<->active vertex
flips, the antichain C_X in which every active vertex is a boundary vertex,
the per-cluster partitions into X-clusters (components of C minus its active
boundary, retaining a passive boundary vertex), their exact weights, and the
compact decomposition of G minus X into unions of X-clusters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

import numpy as np

from . import debugcheck
from .certificates import MinorWitness, SepOrMinor, Separator
from .graph import Graph, VertexSet
from .shallow import ln_ceil, separator_coeff, shallow_separator, shallow_separator_balanced

DEFAULT_C_R = 4.0          # lower end of the admissible r range: C_r * h^2 * ln n
REFINE_COEFF = 2.0         # c_b in the per-cluster boundary bound c_b * h * sqrt(r * ln n)
SMALL_SPLIT_CUTOFF = 48    # clusters at most this large use the direct splitter
CHILD_BOUNDARY_FRACTION = (3, 4)   # re-split a child under w2 above this share of |dC|


class ClusteringError(ValueError):
    pass


@dataclass
class Cluster:
    """Connected subgraph in an edge-disjoint clustering."""

    id: int
    level: int
    vertices: np.ndarray     # sorted global vertex ids
    boundary: np.ndarray     # sorted global ids; vertices shared with other clusters
    edges: np.ndarray        # indices into the host graph's canonical edge list
    parent: Optional[int] = None
    children: Optional[list[int]] = None   # None = not yet materialized
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_leaf(self) -> bool:
        return self.m <= 1


@dataclass
class Clustering:
    """Flat (level-1) clustering of a host graph."""

    g: Graph
    clusters: list[Cluster]
    r: int
    h: int
    eps: float

    def total_boundary(self) -> int:
        return sum(len(c.boundary) for c in self.clusters)


def _child_seed(seed: int, index: int) -> int:
    return (seed * 1000003 + index * 7919 + 1) % (2**63)


def _subgraph_from_edges(g: Graph, verts: np.ndarray, eids: np.ndarray,
                         weights: Optional[np.ndarray] = None) -> tuple[Graph, np.ndarray]:
    """Graph on `verts` with exactly the edges `eids`; returns (graph, verts)."""
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    eu = local[g.edge_u[eids]]
    ev = local[g.edge_v[eids]]
    if weights is None:
        w = np.ones(len(verts), dtype=np.int64)
    else:
        w = weights
    sub = Graph(len(verts), np.stack([eu, ev], axis=1) if len(eids) else [],
                vertex_weight=w.tolist())
    return sub, verts


def _verts_of_edges(g: Graph, eids: np.ndarray) -> np.ndarray:
    return np.unique(np.concatenate([g.edge_u[eids], g.edge_v[eids]]))


def _split_pieces_from_cut(g: Graph, verts: np.ndarray, eids: np.ndarray,
                           cut_local: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Partition the cluster's edges around a local vertex cut.

    Every edge with an endpoint in some component of C - cut goes to that
    component's piece; cut-internal edges form their own connected pieces.
    Piece vertex sets are the endpoints of their edges.
    """
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    incut = np.zeros(len(verts), dtype=bool)
    incut[cut_local] = True
    lu = local[g.edge_u[eids]]
    lv = local[g.edge_v[eids]]
    # components of C - cut via union-find over non-cut edges
    parent = np.arange(len(verts), dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    both_out = ~incut[lu] & ~incut[lv]
    for a, b in zip(lu[both_out].tolist(), lv[both_out].tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    piece_of_edge = np.full(len(eids), -1, dtype=np.int64)
    comp_key = {}
    for i, (a, b) in enumerate(zip(lu.tolist(), lv.tolist())):
        anchor = None
        if not incut[a]:
            anchor = find(a)
        elif not incut[b]:
            anchor = find(b)
        if anchor is not None:
            piece_of_edge[i] = comp_key.setdefault(anchor, len(comp_key))
    pieces: list[tuple[np.ndarray, np.ndarray]] = []
    for key in range(len(comp_key)):
        pe = eids[piece_of_edge == key]
        pieces.append((_verts_of_edges(g, pe), pe))
    # cut-internal edges: connected groups become their own pieces
    leftover = eids[piece_of_edge == -1]
    if len(leftover):
        parent2 = np.arange(len(verts), dtype=np.int64)

        def find2(x: int) -> int:
            while parent2[x] != x:
                parent2[x] = parent2[parent2[x]]
                x = parent2[x]
            return x

        llu = local[g.edge_u[leftover]]
        llv = local[g.edge_v[leftover]]
        for a, b in zip(llu.tolist(), llv.tolist()):
            ra, rb = find2(a), find2(b)
            if ra != rb:
                parent2[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for i, a in enumerate(llu.tolist()):
            groups.setdefault(find2(a), []).append(i)
        for key in sorted(groups):
            pe = leftover[np.asarray(groups[key], dtype=np.int64)]
            pieces.append((_verts_of_edges(g, pe), pe))
    return [p for p in pieces if len(p[1])]


def _direct_split(g: Graph, verts: np.ndarray, eids: np.ndarray,
                  weights: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic splitter for small clusters; every piece loses a vertex.

    Prefers a BFS layer cut balanced under `weights`; on diameter <= 1
    (clique-like) falls back to excluding the lowest vertex and splitting its
    star if it touches everything.
    """
    nn = len(verts)
    local = {int(v): i for i, v in enumerate(verts)}
    lu = [local[int(x)] for x in g.edge_u[eids]]
    lv = [local[int(x)] for x in g.edge_v[eids]]
    adj: list[list[int]] = [[] for _ in range(nn)]
    for a, b in zip(lu, lv):
        adj[a].append(b)
        adj[b].append(a)

    def bfs(src: int) -> list[int]:
        dist = [-1] * nn
        dist[src] = 0
        q = [src]
        for u in q:
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    d0 = bfs(0)
    far = max(range(nn), key=lambda i: (d0[i], -i))
    dist = bfs(far)
    maxd = max(dist)
    if maxd >= 2:
        wl = weights.tolist()
        wa_pref = [0] * (maxd + 2)   # weight at layers < t
        cnt = [0] * (maxd + 1)
        for i, d in enumerate(dist):
            if d >= 0:
                cnt[d] += 1
                wa_pref[d + 1] += wl[i]
        for t in range(1, maxd + 2):
            wa_pref[t] += wa_pref[t - 1]
        total = wa_pref[maxd + 1]
        best = None
        for t in range(1, maxd):
            wa = wa_pref[t]
            wb = total - wa_pref[t + 1]
            key = (max(wa, wb), cnt[t], t)
            if best is None or key < best[0]:
                best = (key, t)
        cut = np.asarray([i for i, d in enumerate(dist) if d == best[1]], dtype=np.int64)
        return _split_pieces_from_cut(g, verts, eids, cut)
    # diameter <= 1: exclude the lowest-id vertex; split its star if needed
    x = 0
    star_mask = np.asarray([a == x or b == x for a, b in zip(lu, lv)], dtype=bool)
    rest = eids[~star_mask]
    pieces: list[tuple[np.ndarray, np.ndarray]] = []
    if len(rest):
        pieces.extend(_connected_edge_groups(g, rest))
    star_e = eids[star_mask]
    deg = len(star_e)
    if deg:
        covers_all = len(_verts_of_edges(g, star_e)) == nn
        if covers_all and deg >= 2:
            half = (deg + 1) // 2
            pieces.append((_verts_of_edges(g, star_e[:half]), star_e[:half]))
            pieces.append((_verts_of_edges(g, star_e[half:]), star_e[half:]))
        else:
            pieces.append((_verts_of_edges(g, star_e), star_e))
    return pieces


def _connected_edge_groups(g: Graph, eids: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    verts = _verts_of_edges(g, eids)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    parent = np.arange(len(verts), dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    lu, lv = local[g.edge_u[eids]], local[g.edge_v[eids]]
    for a, b in zip(lu.tolist(), lv.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i, a in enumerate(lu.tolist()):
        groups.setdefault(find(a), []).append(i)
    out = []
    for key in sorted(groups):
        pe = eids[np.asarray(groups[key], dtype=np.int64)]
        out.append((_verts_of_edges(g, pe), pe))
    return out


class MinorFound(Exception):
    """Internal: a separator call returned the minor side; carries the result."""

    def __init__(self, result: SepOrMinor):
        self.result = result


def _lift_minor(result: SepOrMinor, verts: np.ndarray) -> SepOrMinor:
    """Translate a sub-run's minor-side result into host-graph vertex ids."""
    if isinstance(result, MinorWitness):
        back = verts
        return MinorWitness(
            branch_sets=[VertexSet(back[np.asarray(bs.ids(), dtype=np.int64)].tolist())
                         for bs in result.branch_sets],
            depth_bound=result.depth_bound,
            connecting_edges={k: (int(back[a]), int(back[b]))
                              for k, (a, b) in result.connecting_edges.items()},
            params=result.params)
    return result


def _separator_split(g: Graph, verts: np.ndarray, eids: np.ndarray,
                     weights: np.ndarray, h: int, eps: float, seed: int,
                     ell: Optional[int] = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a cluster with a separator run under the given weights.

    Falls back to the direct splitter when the separator makes no progress.
    Raises MinorFound if the run returns the minor side.
    """
    if len(eids) <= 1:
        return [(verts, eids)]
    if len(verts) <= SMALL_SPLIT_CUTOFF:
        return _direct_split(g, verts, eids, weights)
    sub, _ = _subgraph_from_edges(g, verts, eids, weights)
    if ell is None:
        out = shallow_separator_balanced(sub, h, eps, seed, complete_witness=False)
    else:
        out = shallow_separator(sub, h, ell, eps, seed, complete_witness=False)
    if not isinstance(out, Separator):
        raise MinorFound(_lift_minor(out, verts))
    cut_local = np.asarray(out.C.ids(), dtype=np.int64)
    pieces = _split_pieces_from_cut(g, verts, eids, cut_local)
    if any(len(pv) >= len(verts) for pv, _ in pieces) or len(pieces) <= 1:
        return _direct_split(g, verts, eids, weights)
    return pieces


# -- weak r-clustering -------------------------------------------------------


def weak_clustering_ell(nhat: int, r: int, h: int, eps3: float) -> int:
    """Per-level ell for the weak clustering recursion."""
    val = nhat ** (1.0 - eps3) / (h * r ** (0.5 - eps3) * math.sqrt(ln_ceil(nhat)))
    return max(1, min(int(round(val)), max(1, nhat // 2)))


def weak_r_clustering(g: Graph, r: int, h: int, eps: float, seed: int = 0,
                      c_r: float = DEFAULT_C_R) -> Union[Clustering, SepOrMinor]:
    """Clusters of at most r vertices with O~(h n / sqrt r) total boundary.

    Splits recursively with the shallow separator at a large per-level ell;
    a minor-side outcome of any split is forwarded.
    """
    n = g.n
    if r <= c_r * h * h * ln_ceil(n):
        raise ClusteringError(f"r={r} not above C_r h^2 ln n = {c_r * h * h * ln_ceil(n):.1f}")
    from .graph import sparsity_guard

    for policy in ("mader-proven", "thomason-soft"):
        cert = sparsity_guard(g, h, policy)
        if cert is not None:
            from .shallow import _density_result

            return _density_result(g, h, cert, {"h": h, "r": r, "eps": eps})
    eps3 = eps / 3.0
    all_eids = np.arange(g.m, dtype=np.int64)
    stack: list[tuple[np.ndarray, np.ndarray]] = []
    for vs, es in _connected_edge_groups(g, all_eids) if g.m else []:
        stack.append((vs, es))
    done: list[tuple[np.ndarray, np.ndarray]] = []
    step = 0
    while stack:
        verts, eids = stack.pop()
        if len(verts) <= r or len(eids) <= 1:
            done.append((verts, eids))
            continue
        step += 1
        ell = weak_clustering_ell(len(verts), r, h, eps3)
        unit = np.ones(len(verts), dtype=np.int64)
        try:
            pieces = _separator_split(g, verts, eids, unit, h, eps3, _child_seed(seed, step),
                                      ell=ell)
        except MinorFound as mf:
            return mf.result
        stack.extend(pieces)
    done.sort(key=lambda p: int(p[0][0]))
    clusters = []
    mult = np.zeros(n, dtype=np.int64)
    for verts, _ in done:
        mult[verts] += 1
    for i, (verts, eids) in enumerate(done):
        boundary = verts[mult[verts] > 1]
        clusters.append(Cluster(id=i, level=1, vertices=verts, boundary=boundary,
                                edges=eids, seed=_child_seed(seed, 10_000_019 + i)))
    return Clustering(g=g, clusters=clusters, r=r, h=h, eps=eps)


def refine_to_r_clustering(weak: Clustering, h: int, eps: float, seed: int = 0,
                           boundary_bound: Optional[int] = None) -> Union[Clustering, SepOrMinor]:
    """Re-split boundary-heavy clusters under boundary-uniform weights until
    every cluster has at most c_b * h * sqrt(r ln n) boundary vertices."""
    g = weak.g
    n = g.n
    if boundary_bound is None:
        boundary_bound = math.ceil(REFINE_COEFF * h * math.sqrt(weak.r * ln_ceil(n)))
    work = [(c.vertices, c.edges, c.boundary) for c in weak.clusters]
    out: list[tuple[np.ndarray, np.ndarray]] = []
    step = 0
    while work:
        verts, eids, bnd = work.pop()
        if len(bnd) <= boundary_bound or len(eids) <= 1:
            out.append((verts, eids))
            continue
        step += 1
        w2 = np.zeros(len(verts), dtype=np.int64)
        local = np.full(g.n, -1, dtype=np.int64)
        local[verts] = np.arange(len(verts))
        w2[local[bnd]] = 1
        try:
            pieces = _separator_split(g, verts, eids, w2, h, eps / 2.0,
                                      _child_seed(seed, 20_000_003 + step))
        except MinorFound as mf:
            return mf.result
        bmask = np.zeros(g.n, dtype=bool)
        bmask[bnd] = True
        pieceverts = [pv for pv, _ in pieces]
        mult = np.zeros(g.n, dtype=np.int64)
        for pv in pieceverts:
            mult[pv] += 1
        for pv, pe in pieces:
            newb = pv[bmask[pv] | (mult[pv] > 1)]
            work.append((pv, pe, newb))
    out.sort(key=lambda p: int(p[0][0]))
    mult = np.zeros(n, dtype=np.int64)
    for verts, _ in out:
        mult[verts] += 1
    clusters = []
    for i, (verts, eids) in enumerate(out):
        boundary = verts[mult[verts] > 1]
        clusters.append(Cluster(id=i, level=1, vertices=verts, boundary=boundary,
                                edges=eids, seed=_child_seed(seed, 30_000_001 + i)))
    refined = Clustering(g=g, clusters=clusters, r=weak.r, h=h, eps=eps)
    debugcheck.check("clustering.refined-bound",
                     all(len(c.boundary) <= boundary_bound for c in clusters),
                     "a refined cluster still exceeds the boundary bound")
    return refined


# -- nested clustering --------------------------------------------------------


class NestedClustering:
    """Hierarchy of clusters down to single-edge leaves (lazily materialized)."""

    def __init__(self, g: Graph, level1: list[Cluster], r: int, h: int, eps: float):
        self.g = g
        self.r = r
        self.h = h
        self.eps = eps
        self.clusters: list[Cluster] = list(level1)
        self.level1 = [c.id for c in level1]

    def cluster(self, cid: int) -> Cluster:
        return self.clusters[cid]

    def children_of(self, cid: int) -> list[int]:
        """Child ids of a cluster, splitting on first demand."""
        c = self.clusters[cid]
        if c.children is not None:
            return c.children
        if c.is_leaf:
            c.children = []
            return c.children
        pieces = split_cluster_two_weights(self.g, c, self.h, self.eps, c.seed)
        kids = []
        mult = np.zeros(self.g.n, dtype=np.int64)
        for pv, _ in pieces:
            mult[pv] += 1
        bmask = np.zeros(self.g.n, dtype=bool)
        bmask[c.boundary] = True
        for j, (pv, pe) in enumerate(pieces):
            newb = pv[bmask[pv] | (mult[pv] > 1)]
            kid = Cluster(id=len(self.clusters), level=c.level + 1, vertices=pv,
                          boundary=newb, edges=pe, parent=cid,
                          seed=_child_seed(c.seed, j))
            self.clusters.append(kid)
            kids.append(kid.id)
        c.children = kids
        self._check_decay(c, kids)
        return kids

    def _check_decay(self, c: Cluster, kids: list[int]) -> None:
        if not debugcheck.enabled():
            return
        lnc = ln_ceil(c.n)
        k_split = 2 * math.ceil(4.0 / self.eps) - 1
        additive = (4 * separator_coeff(k_split) + 4) * self.h * math.sqrt(c.n * lnc) + 2
        num, den = CHILD_BOUNDARY_FRACTION
        for kid_id in kids:
            kid = self.clusters[kid_id]
            debugcheck.check("clustering.decay-size", kid.n < c.n,
                             f"child {kid_id} of {c.id} does not shrink: {kid.n} vs {c.n}")
            debugcheck.check(
                "clustering.decay-boundary",
                len(kid.boundary) <= (num * len(c.boundary)) // den + 1 + additive,
                f"child {kid_id} boundary {len(kid.boundary)} vs parent {len(c.boundary)}")

    def materialize_all(self) -> None:
        queue = list(self.level1)
        while queue:
            cid = queue.pop()
            queue.extend(self.children_of(cid))

    def leaf_count(self) -> int:
        return sum(1 for c in self.clusters if c.is_leaf)

    def to_doc(self) -> dict:
        return {
            "r": self.r, "h": self.h, "eps": self.eps,
            "level1": self.level1,
            "clusters": [
                {"id": c.id, "level": c.level, "parent": c.parent,
                 "children": c.children,
                 "vertices": c.vertices.tolist(), "boundary": c.boundary.tolist(),
                 "edges": c.edges.tolist()}
                for c in self.clusters
            ],
        }


def split_cluster_two_weights(g: Graph, c: Cluster, h: int, eps: float,
                              seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a cluster so children shrink in size and in boundary count.

    First splits under vertex-uniform weights; any child inheriting more than
    3/4 of the parent boundary is re-split under boundary-uniform weights.
    Single-edge clusters are leaves and must not be split.
    """
    if c.m <= 1:
        raise ClusteringError("single-edge clusters are leaves and are never split")
    unit = np.ones(c.n, dtype=np.int64)
    pieces = _separator_split(g, c.vertices, c.edges, unit, h, eps / 2.0,
                              _child_seed(seed, 1))
    bmask = np.zeros(g.n, dtype=bool)
    bmask[c.boundary] = True
    num, den = CHILD_BOUNDARY_FRACTION
    limit = (num * len(c.boundary)) // den + 1
    final: list[tuple[np.ndarray, np.ndarray]] = []
    for j, (pv, pe) in enumerate(pieces):
        inherited = pv[bmask[pv]]
        if len(inherited) > limit and len(pe) > 1:
            local = np.full(g.n, -1, dtype=np.int64)
            local[pv] = np.arange(len(pv))
            w2 = np.zeros(len(pv), dtype=np.int64)
            w2[local[inherited]] = 1
            final.extend(_separator_split(g, pv, pe, w2, h, eps / 2.0,
                                          _child_seed(seed, 100 + j)))
        else:
            final.append((pv, pe))
    final.sort(key=lambda p: (int(p[0][0]), len(p[1])))
    return final


def nested_r_clustering(g: Graph, r: int, h: int, eps: float, seed: int = 0,
                        c_r: float = DEFAULT_C_R) -> Union[NestedClustering, SepOrMinor]:
    """Refined r-clustering plus recursive two-weight splitting to edge leaves."""
    if g.m == 0:
        return NestedClustering(g, [], r, h, eps)
    if r >= g.n:
        groups = _connected_edge_groups(g, np.arange(g.m, dtype=np.int64))
        level1 = [Cluster(id=i, level=1, vertices=vs, boundary=np.empty(0, np.int64),
                          edges=es, seed=_child_seed(seed, i))
                  for i, (vs, es) in enumerate(groups)]
        return NestedClustering(g, level1, r, h, eps)
    weak = weak_r_clustering(g, r, h, eps, seed, c_r=c_r)
    if not isinstance(weak, Clustering):
        return weak
    refined = refine_to_r_clustering(weak, h, eps, _child_seed(seed, 2))
    if not isinstance(refined, Clustering):
        return refined
    return NestedClustering(g, refined.clusters, r, h, eps)


# -- dynamic layer ------------------------------------------------------------


def compute_C_X(nc: NestedClustering, xs: VertexSet) -> set[int]:
    """Expand the level-1 roster until every X vertex is a boundary vertex."""
    xmask = xs.to_mask(nc.g.n)
    roster: set[int] = set(nc.level1)
    changed = True
    while changed:
        changed = False
        for cid in sorted(roster):
            c = nc.cluster(cid)
            if c.is_leaf or not (len(c.vertices) and xmask[c.vertices].any()):
                continue
            bmask = np.zeros(nc.g.n, dtype=bool)
            bmask[c.boundary] = True
            interior_x = c.vertices[xmask[c.vertices] & ~bmask[c.vertices]]
            if len(interior_x):
                roster.discard(cid)
                roster.update(nc.children_of(cid))
                changed = True
                break
    if debugcheck.enabled():
        _check_cx_postconditions(nc, roster, xmask)
    return roster


def _check_cx_postconditions(nc: NestedClustering, roster: set[int], xmask: np.ndarray) -> None:
    mult = np.zeros(nc.g.n, dtype=np.int64)
    bmult = np.zeros(nc.g.n, dtype=np.int64)
    leafint = np.zeros(nc.g.n, dtype=bool)
    for cid in roster:
        c = nc.cluster(cid)
        mult[c.vertices] += 1
        bmult[c.boundary] += 1
        if c.is_leaf:
            leafint[c.vertices] = True
    shared = mult > 1
    debugcheck.check("cx.boundary-sharing", bool(np.all(bmult[shared] == mult[shared])),
                     "clusters of C_X share a non-boundary vertex")
    covered = mult > 0
    # degree-1 vertices can stay interior to an unexpandable single-edge leaf
    bad = xmask & covered & (bmult == 0) & ~leafint
    debugcheck.check("cx.x-on-boundary", not bad.any(),
                     "an X vertex is interior to an expandable C_X cluster")


@dataclass
class XCluster:
    """Component of a cluster minus its active boundary, with cached totals."""

    host: int                 # cluster id
    index: int                # index within the host's partition
    vertices: np.ndarray
    weight: int
    count: int
    passive_boundary: np.ndarray


class _ClusterDyn:
    """Per-cluster dynamic state: local csr and the current X-cluster partition."""

    __slots__ = ("cid", "verts", "local", "indptr", "indices", "bnd_local",
                 "xcl_of", "xclusters")

    def __init__(self, g: Graph, c: Cluster):
        self.cid = c.id
        self.verts = c.vertices
        self.local = {int(v): i for i, v in enumerate(c.vertices)}
        lu = np.asarray([self.local[int(u)] for u in g.edge_u[c.edges]], dtype=np.int64)
        lv = np.asarray([self.local[int(v)] for v in g.edge_v[c.edges]], dtype=np.int64)
        nn = len(c.vertices)
        order = np.argsort(np.concatenate([lu, lv]) * nn + np.concatenate([lv, lu]))
        allu = np.concatenate([lu, lv])[order]
        allv = np.concatenate([lv, lu])[order]
        self.indptr = np.zeros(nn + 1, dtype=np.int64)
        np.add.at(self.indptr, allu + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = allv
        self.bnd_local = np.asarray([self.local[int(b)] for b in c.boundary], dtype=np.int64)
        self.xcl_of: Optional[np.ndarray] = None
        self.xclusters: list[XCluster] = []

    def recompute(self, g: Graph, active: np.ndarray) -> None:
        """Partition into components of C minus its active vertices; O(|C| + |E(C)|).

        After C_X expansion active vertices are boundary vertices, except for
        degree-1 vertices stuck inside single-edge leaves; blocking every
        active vertex covers both cases.
        """
        nn = len(self.verts)
        blocked = active[self.verts]
        xcl = np.full(nn, -1, dtype=np.int64)
        order_bnd = np.zeros(nn, dtype=bool)
        order_bnd[self.bnd_local] = True
        nxt = 0
        parts: list[XCluster] = []
        for s in range(nn):
            if blocked[s] or xcl[s] >= 0:
                continue
            stack = [s]
            xcl[s] = nxt
            members = [s]
            while stack:
                u = stack.pop()
                for w in self.indices[self.indptr[u]:self.indptr[u + 1]].tolist():
                    if not blocked[w] and xcl[w] < 0:
                        xcl[w] = nxt
                        members.append(w)
                        stack.append(w)
            marr = np.asarray(members, dtype=np.int64)
            gverts = self.verts[marr]
            pb = marr[order_bnd[marr]]
            parts.append(XCluster(host=self.cid, index=nxt, vertices=np.sort(gverts),
                                  weight=int(g.vertex_weight[gverts].sum()),
                                  count=len(gverts),
                                  passive_boundary=np.sort(self.verts[pb])))
            nxt += 1
        self.xcl_of = xcl
        self.xclusters = parts

    def xcluster_of_vertex(self, v: int) -> Optional[int]:
        li = self.local.get(int(v))
        if li is None or self.xcl_of is None:
            return None
        x = int(self.xcl_of[li])
        return x if x >= 0 else None


class ActiveState:
    """Active-vertex bookkeeping over a nested clustering.

    Each vertex flips passive->active and active->passive at most once; the
    active-set size never exceeds x_cap when one is given.  Cluster-local
    recomputation and C_X expansion run on every flip; listeners registered
    by downstream layers are notified with the affected cluster ids.
    """

    def __init__(self, nc: NestedClustering, x_cap: Optional[int] = None):
        self.nc = nc
        g = nc.g
        self.active = np.zeros(g.n, dtype=bool)
        self.up_used = np.zeros(g.n, dtype=bool)
        self.down_used = np.zeros(g.n, dtype=bool)
        self.x_cap = x_cap
        self.cx: set[int] = set(nc.level1)
        self.dyn: dict[int, _ClusterDyn] = {}
        self.interior_of = np.full(g.n, -1, dtype=np.int64)
        self.boundary_clusters: dict[int, set[int]] = {}
        self.listeners: list[Callable[[Iterable[int]], None]] = []
        for cid in nc.level1:
            self._enter(cid)

    # -- cluster roster maintenance ------------------------------------------

    def _enter(self, cid: int) -> None:
        c = self.nc.cluster(cid)
        bset = set(c.boundary.tolist())
        for v in c.vertices.tolist():
            if v in bset:
                self.boundary_clusters.setdefault(v, set()).add(cid)
            else:
                self.interior_of[v] = cid
        dyn = _ClusterDyn(self.nc.g, c)
        dyn.recompute(self.nc.g, self.active)
        self.dyn[cid] = dyn

    def _leave(self, cid: int) -> None:
        c = self.nc.cluster(cid)
        bset = set(c.boundary.tolist())
        for v in c.vertices.tolist():
            if v in bset:
                s = self.boundary_clusters.get(v)
                if s is not None:
                    s.discard(cid)
            elif self.interior_of[v] == cid:
                self.interior_of[v] = -1
        self.dyn.pop(cid, None)

    def _expand(self, cid: int) -> list[int]:
        kids = self.nc.children_of(cid)
        self.cx.discard(cid)
        self._leave(cid)
        self.cx.update(kids)
        for k in kids:
            self._enter(k)
        return kids

    # -- flips -----------------------------------------------------------------

    def _flip(self, v: int, to: str) -> set[int]:
        """Apply one flip; returns the cluster ids whose partitions changed."""
        if to == "active":
            if self.active[v]:
                return set()
            if self.up_used[v]:
                raise ValueError(f"vertex {v} already used its passive->active flip")
            if self.x_cap is not None and int(self.active.sum()) + 1 > self.x_cap:
                raise ValueError("active-set cap exceeded")
            self.up_used[v] = True
            self.active[v] = True
            # expand until v is a boundary vertex wherever it appears; a
            # degree-1 vertex stays interior to its single-edge leaf, which
            # is unexpandable (the partition blocks it regardless)
            while self.interior_of[v] >= 0:
                cid = int(self.interior_of[v])
                if self.nc.cluster(cid).is_leaf:
                    break
                self._expand(cid)
        elif to == "passive":
            if not self.active[v]:
                return set()
            if self.down_used[v]:
                raise ValueError(f"vertex {v} already used its active->passive flip")
            self.down_used[v] = True
            self.active[v] = False
        else:
            raise ValueError(f"unknown state {to!r}")
        return set(self.boundary_clusters.get(v, ()))

    def set_vertex_state(self, v: int, to: str) -> None:
        touched = self._flip(v, to) & set(self.dyn)
        for cid in sorted(touched):
            self.dyn[cid].recompute(self.nc.g, self.active)
        for fn in self.listeners:
            fn(sorted(touched))

    def set_many(self, vs: Iterable[int], to: str) -> None:
        """Batch flips: each affected cluster is recomputed once at the end."""
        touched: set[int] = set()
        for v in vs:
            touched |= self._flip(int(v), to)
        touched &= set(self.dyn)  # expanded-away clusters no longer exist
        for cid in sorted(touched):
            self.dyn[cid].recompute(self.nc.g, self.active)
        for fn in self.listeners:
            fn(sorted(touched))

    def activate_many(self, vs: Iterable[int]) -> None:
        self.set_many(vs, "active")

    # -- queries ----------------------------------------------------------------

    def x_set(self) -> VertexSet:
        return VertexSet.from_mask(self.active)

    def passive_boundary_multiplicity(self) -> dict[int, int]:
        mult: dict[int, int] = {}
        for cid in self.cx:
            c = self.nc.cluster(cid)
            for b in c.boundary.tolist():
                if not self.active[b]:
                    mult[b] = mult.get(b, 0) + 1
        return mult


def decompose_active_complement(st: ActiveState, nc: Optional[NestedClustering] = None
                                ) -> list[tuple[list[tuple[int, int]], int, int]]:
    """Components of G - X that contain a passive boundary vertex of C_X.

    Returns one entry per component: (X-cluster ids as (cluster, index) pairs,
    exact weight, exact vertex count), deterministically ordered.  Weights
    correct for vertices shared by several X-clusters.
    """
    nc = nc or st.nc
    g = nc.g
    node_ids: dict[tuple[int, int], int] = {}
    nodes: list[XCluster] = []
    for cid in sorted(st.cx):
        dyn = st.dyn[cid]
        for xc in dyn.xclusters:
            if len(xc.passive_boundary):
                node_ids[(cid, xc.index)] = len(nodes)
                nodes.append(xc)
    parent = list(range(len(nodes)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    incident: dict[int, list[int]] = {}
    for key, nid in node_ids.items():
        for b in nodes[nid].passive_boundary.tolist():
            incident.setdefault(b, []).append(nid)
    for b, nids in incident.items():
        for other in nids[1:]:
            ra, rb = find(nids[0]), find(other)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comp_nodes: dict[int, list[int]] = {}
    for nid in range(len(nodes)):
        comp_nodes.setdefault(find(nid), []).append(nid)
    out = []
    keys = sorted(node_ids)
    id_to_key = {v: k for k, v in node_ids.items()}
    for root in sorted(comp_nodes):
        nids = comp_nodes[root]
        weight = sum(nodes[i].weight for i in nids)
        count = sum(nodes[i].count for i in nids)
        seen: dict[int, int] = {}
        for i in nids:
            for b in nodes[i].passive_boundary.tolist():
                seen[b] = seen.get(b, 0) + 1
        for b, c in seen.items():
            if c > 1:
                weight -= (c - 1) * int(g.vertex_weight[b])
                count -= (c - 1)
        members = sorted(id_to_key[i] for i in nids)
        out.append((members, weight, count))
    out.sort(key=lambda t: t[0][0])
    return out
