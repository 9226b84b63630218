"""Exact witnesses for K3 and K4 minors at any instance size.

K3: any cycle, split into three arcs.  K4: a graph has a K4 minor iff the
series-parallel reduction (delete degree <= 1, suppress degree 2, drop loops
and parallel duplicates) leaves a nonempty graph.  To extract branch sets,
the surviving graph is shrunk one edge at a time, preferring contractions and
falling back to deletions, re-reducing after each step; since the only
minor-minimal graph containing a K4 minor is K4 itself, the process always
reaches an exact K4.  Contractions and suppressions carry their underlying
paths so the final branch sets and connecting edges refer to original
vertices.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .certificates import MinorWitness
from .graph import Graph, VertexSet


def find_k3_witness(g: Graph) -> Optional[MinorWitness]:
    """Cycle-based K3 witness (three consecutive arcs), or None on forests."""
    uf = list(range(g.n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist()):
        ru, rv = find(u), find(v)
        if ru == rv:
            # this edge closes a cycle; recover it as path + closing edge
            cyc = _cycle_through_edge(g, u, v)
            if cyc is not None and len(cyc) >= 3:
                return _k3_from_cycle(g, cyc)
        else:
            uf[max(ru, rv)] = min(ru, rv)
    return None


def _cycle_through_edge(g: Graph, u: int, v: int) -> Optional[list[int]]:
    """Shortest u-v path avoiding the edge (u, v), closed into a cycle."""
    prev = {u: None}
    dq = deque([u])
    while dq:
        x = dq.popleft()
        for w in g.neighbors(x).tolist():
            if x == u and w == v:
                continue
            if w not in prev:
                prev[w] = x
                if w == v:
                    path = [v]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path
                dq.append(w)
    return None


def _k3_from_cycle(g: Graph, cyc: list[int]) -> MinorWitness:
    a, b, rest = [cyc[0]], [cyc[1]], cyc[2:]
    sets = [VertexSet(a), VertexSet(b), VertexSet(rest)]
    edges = {(0, 1): (cyc[0], cyc[1]), (1, 2): (cyc[1], cyc[2]),
             (0, 2): (cyc[0], cyc[-1])}
    return MinorWitness(branch_sets=sets, connecting_edges=edges)


class _SPGraph:
    """Mutable simple graph with branch-set payloads for minor extraction."""

    def __init__(self, g: Graph):
        self.g = g
        self.adj: dict[int, dict[int, int]] = {v: {} for v in range(g.n)}
        self.edges: dict[int, tuple[int, int, list[int]]] = {}
        self.sets: dict[int, list[int]] = {v: [v] for v in range(g.n)}
        self._next_eid = 0
        for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist()):
            self._add_edge(u, v, [u, v])

    def _add_edge(self, u: int, v: int, path: list[int]) -> None:
        if u == v or v in self.adj[u]:
            return
        eid = self._next_eid
        self._next_eid += 1
        self.edges[eid] = (u, v, path)
        self.adj[u][v] = eid
        self.adj[v][u] = eid

    def _remove_edge(self, eid: int) -> None:
        u, v, _ = self.edges.pop(eid)
        self.adj[u].pop(v, None)
        self.adj[v].pop(u, None)

    def _oriented_path(self, eid: int, frm: int) -> list[int]:
        u, v, path = self.edges[eid]
        return list(path) if frm == u else list(reversed(path))

    def _route_inside(self, vid: int, a: int, b: int) -> list[int]:
        """Path from a to b within the induced subgraph of vid's payload set."""
        if a == b:
            return [a]
        members = set(self.sets[vid])
        prev = {a: None}
        dq = deque([a])
        while dq:
            x = dq.popleft()
            for w in self.g.neighbors(x).tolist():
                if w in members and w not in prev:
                    prev[w] = x
                    if w == b:
                        out = [b]
                        while prev[out[-1]] is not None:
                            out.append(prev[out[-1]])
                        return list(reversed(out))
                    dq.append(w)
        raise RuntimeError("payload set lost connectivity")

    def reduce(self) -> None:
        """Exhaustively delete degree <= 1 and suppress degree-2 vertices."""
        queue = deque(v for v in self.adj if len(self.adj[v]) <= 2)
        while queue:
            v = queue.popleft()
            if v not in self.adj:
                continue
            deg = len(self.adj[v])
            if deg > 2:
                continue
            if deg <= 1:
                for w, eid in list(self.adj[v].items()):
                    self._remove_edge(eid)
                    if len(self.adj[w]) <= 2:
                        queue.append(w)
                self.adj.pop(v)
                self.sets.pop(v, None)
                continue
            (a, ea), (b, eb) = sorted(self.adj[v].items())
            pa = self._oriented_path(ea, a)      # a .. into set(v)
            pb = self._oriented_path(eb, v)      # from set(v) .. b
            inner = self._route_inside(v, pa[-1], pb[0])
            path = pa + inner[1:] + pb[1:] if inner else pa + pb
            # absorb v's payload interior into the composite path lazily: only
            # the traversed route is carried; unused payload vertices drop out
            self._remove_edge(ea)
            self._remove_edge(eb)
            self.adj.pop(v)
            self.sets.pop(v, None)
            before = b in self.adj[a]
            self._add_edge(a, b, path)
            if before or a == b:
                # duplicate or loop: composite discarded; degrees dropped
                for w in (a, b):
                    if w in self.adj and len(self.adj[w]) <= 2:
                        queue.append(w)
            # suppression can expose new low-degree vertices
            for w in (a, b):
                if w in self.adj and len(self.adj[w]) <= 2:
                    queue.append(w)

    def contract(self, eid: int) -> None:
        u, v, path = self.edges[eid]
        self._remove_edge(eid)
        self.sets[u] = self.sets[u] + path[1:-1] + self.sets[v]
        for w, e2 in list(self.adj[v].items()):
            a, b, p2 = self.edges[e2]
            self._remove_edge(e2)
            p2o = p2 if a == v else list(reversed(p2))
            other = b if a == v else a
            self._add_edge(u, other, p2o)  # path endpoint stays in old set(v) area
        self.adj.pop(v)
        self.sets.pop(v, None)

    def snapshot_adj(self) -> dict[int, set[int]]:
        return {v: set(nb) for v, nb in self.adj.items()}


def _reduces_to_empty(adj: dict[int, set[int]]) -> bool:
    adj = {v: set(nb) for v, nb in adj.items()}
    queue = deque(v for v in adj if len(adj[v]) <= 2)
    while queue:
        v = queue.popleft()
        if v not in adj:
            continue
        deg = len(adj[v])
        if deg > 2:
            continue
        nbrs = sorted(adj[v])
        for w in nbrs:
            adj[w].discard(v)
        adj.pop(v)
        if deg == 2:
            a, b = nbrs
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
        for w in nbrs:
            if w in adj and len(adj[w]) <= 2:
                queue.append(w)
    return not adj


def _contracted(adj: dict[int, set[int]], u: int, v: int) -> dict[int, set[int]]:
    out = {x: set(nb) for x, nb in adj.items() if x != v}
    for w in adj[v]:
        if w == v:
            continue
        if w != u:
            out[u].add(w)
            out[w].discard(v)
            out[w].add(u)
        else:
            out[u].discard(v)
    out[u].discard(v)
    out[u].discard(u)
    for w in list(out):
        out[w].discard(v)
    return out


def _deleted(adj: dict[int, set[int]], u: int, v: int) -> dict[int, set[int]]:
    out = {x: set(nb) for x, nb in adj.items()}
    out[u].discard(v)
    out[v].discard(u)
    return out


def find_k4_witness(g: Graph) -> Optional[MinorWitness]:
    """Exact K4-minor witness via series-parallel reduction, or None."""
    sp = _SPGraph(g)
    sp.reduce()
    if not sp.adj:
        return None
    guard = 0
    while len(sp.adj) > 4 or any(len(nb) != 3 for nb in sp.adj.values()):
        guard += 1
        if guard > 4 * g.n + 4 * g.m + 64:
            raise RuntimeError("K4 extraction failed to converge; this is a bug")
        snap = sp.snapshot_adj()
        progressed = False
        for eid in sorted(sp.edges):
            u, v, _ = sp.edges[eid]
            if not _reduces_to_empty(_contracted(snap, u, v)):
                sp.contract(eid)
                sp.reduce()
                progressed = True
                break
            if not _reduces_to_empty(_deleted(snap, u, v)):
                sp._remove_edge(eid)
                sp.reduce()
                progressed = True
                break
        if not progressed:
            # every edge critical: the survivor is exactly K4
            break
    verts = sorted(sp.adj)
    if len(verts) != 4:
        raise RuntimeError("series-parallel extraction did not end at K4")
    sets = {v: list(sp.sets[v]) for v in verts}
    conn: dict[tuple[int, int], tuple[int, int]] = {}
    for eid in sorted(sp.edges):
        u, v, path = sp.edges[eid]
        i, j = verts.index(u), verts.index(v)
        if i > j:
            i, j = j, i
            path = list(reversed(path))
            u, v = v, u
        # absorb the path interior into u's branch set
        sets[u].extend(path[1:-1])
        conn[(i, j)] = (path[-2], path[-1])
    branch_sets = [VertexSet(sets[v]) for v in verts]
    return MinorWitness(branch_sets=branch_sets, connecting_edges=conn)
