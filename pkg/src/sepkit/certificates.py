"""Certificates for algorithm outputs, their verifiers, and exact small-case oracles.

Every algorithm in this package returns a SepOrMinor whose payload can be
re-checked against the input graph without trusting the producer:

* Separator      -- (A, B, C) partition with no A-B edge and exact balance.
* MinorWitness   -- h disjoint connected branch sets with all pairwise edges.
* MinorReport    -- existence claim backed by a density certificate only.

The brute-force oracles define ground truth on small instances and are
guarded: exceeding the size guard is a hard error, never a silent truncation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

import numpy as np

from .graph import DensityCertificate, Graph, VertexSet


@dataclass
class Separator:
    """Balanced vertex separator certificate: C splits the rest into A and B."""

    C: VertexSet
    A: VertexSet
    B: VertexSet
    balance_c: Fraction = Fraction(2, 3)
    claimed_bound: Optional[int] = None
    params: dict = field(default_factory=dict)


@dataclass
class MinorWitness:
    """K_h-minor witness: disjoint connected branch sets, pairwise joined."""

    branch_sets: list[VertexSet]
    depth_bound: Optional[int] = None
    connecting_edges: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def h(self) -> int:
        return len(self.branch_sets)


@dataclass
class MinorReport:
    """Existence claim without branch sets, carrying the density certificate."""

    certificate: DensityCertificate
    params: dict = field(default_factory=dict)


SepOrMinor = Union[Separator, MinorWitness, MinorReport, DensityCertificate]


@dataclass
class VerifyReport:
    ok: bool
    violations: list[tuple[str, str]] = field(default_factory=list)

    @staticmethod
    def from_violations(violations: list[tuple[str, str]]) -> "VerifyReport":
        return VerifyReport(ok=not violations, violations=violations)


class OracleGuardError(ValueError):
    """An oracle was invoked outside its guarded instance-size range."""


# -- separator verification --------------------------------------------------


def verify_separator(g: Graph, s: Separator) -> VerifyReport:
    """Check the Separator invariants plus |C| <= claimed_bound.  Pure."""
    v: list[tuple[str, str]] = []
    n = g.n
    counts = np.zeros(n, dtype=np.int64)
    for part in (s.A, s.B, s.C):
        for x in part:
            if x < 0 or x >= n:
                v.append(("sep.range", f"vertex {x} outside 0..{n - 1}"))
            else:
                counts[x] += 1
    if np.any(counts != 1):
        bad = np.flatnonzero(counts != 1)[:5].tolist()
        v.append(("sep.partition", f"A,B,C do not partition V (e.g. vertices {bad})"))
    amask = s.A.to_mask(n)
    bmask = s.B.to_mask(n)
    cross = amask[g.edge_u] & bmask[g.edge_v] | bmask[g.edge_u] & amask[g.edge_v]
    if np.any(cross):
        i = int(np.flatnonzero(cross)[0])
        v.append(("sep.crossing-edge", f"edge ({int(g.edge_u[i])},{int(g.edge_v[i])}) joins A and B"))
    wv = int(g.total_vertex_weight)
    num, den = s.balance_c.numerator, s.balance_c.denominator
    for name, part in (("A", s.A), ("B", s.B)):
        wpart = int(g.vertex_weight[list(part)].sum()) if len(part) else 0
        if wpart * den > num * wv:
            v.append(("sep.balance", f"w({name})={wpart} exceeds {s.balance_c} of w(V)={wv}"))
    if s.claimed_bound is not None and len(s.C) > s.claimed_bound:
        v.append(("sep.bound", f"|C|={len(s.C)} exceeds claimed bound {s.claimed_bound}"))
    return VerifyReport.from_violations(v)


def verify_minor_witness(g: Graph, wtn: MinorWitness, h: Optional[int] = None) -> VerifyReport:
    """Check disjointness, connectivity, pairwise edges, optional diameter bound."""
    v: list[tuple[str, str]] = []
    if h is not None and wtn.h != h:
        v.append(("minor.count", f"witness has {wtn.h} branch sets, expected {h}"))
    seen: set[int] = set()
    for i, bs in enumerate(wtn.branch_sets):
        if len(bs) == 0:
            v.append(("minor.empty", f"branch set {i} is empty"))
            continue
        overlap = seen.intersection(bs.ids())
        if overlap:
            v.append(("minor.disjoint", f"branch set {i} reuses vertices {sorted(overlap)[:5]}"))
        seen.update(bs.ids())
        for x in bs:
            if x < 0 or x >= g.n:
                v.append(("minor.range", f"vertex {x} outside graph"))
                return VerifyReport.from_violations(v)
        diam = _bfs_diameter_within(g, bs)
        if diam is None:
            v.append(("minor.connected", f"branch set {i} is not connected"))
        elif wtn.depth_bound is not None and diam > wtn.depth_bound:
            v.append(("minor.depth", f"branch set {i} has diameter {diam} > bound {wtn.depth_bound}"))
    for i, j in combinations(range(wtn.h), 2):
        edge = wtn.connecting_edges.get((i, j)) or wtn.connecting_edges.get((j, i))
        if edge is None:
            if not _some_edge_between(g, wtn.branch_sets[i], wtn.branch_sets[j]):
                v.append(("minor.pair", f"no edge joins branch sets {i} and {j}"))
            continue
        a, b = edge
        if not g.has_edge(a, b):
            v.append(("minor.pair-edge", f"recorded edge ({a},{b}) for pair ({i},{j}) not in G"))
            continue
        ends = {a in wtn.branch_sets[i], b in wtn.branch_sets[i],
                a in wtn.branch_sets[j], b in wtn.branch_sets[j]}
        if not ((a in wtn.branch_sets[i] and b in wtn.branch_sets[j])
                or (b in wtn.branch_sets[i] and a in wtn.branch_sets[j])):
            v.append(("minor.pair-edge", f"edge ({a},{b}) does not join branch sets {i} and {j}"))
    return VerifyReport.from_violations(v)


def verify_minor_report(g: Graph, rep: MinorReport) -> VerifyReport:
    """Re-check the density certificate arithmetic against the graph it names."""
    v: list[tuple[str, str]] = []
    cert = rep.certificate
    if not cert.recheck():
        v.append(("report.threshold", "certificate threshold does not recompute"))
    # The certificate may describe a derived graph (e.g. a contraction), so n/m
    # are checked for internal consistency rather than against g directly.
    if cert.n == g.n and cert.m != g.m:
        v.append(("report.m", f"certificate m={cert.m} but graph has m={g.m}"))
    return VerifyReport.from_violations(v)


def verify_output(g: Graph, result: SepOrMinor) -> VerifyReport:
    """Dispatch to the matching verifier for any SepOrMinor variant."""
    if isinstance(result, Separator):
        return verify_separator(g, result)
    if isinstance(result, MinorWitness):
        return verify_minor_witness(g, result)
    if isinstance(result, MinorReport):
        return verify_minor_report(g, result)
    if isinstance(result, DensityCertificate):
        ok = result.recheck()
        return VerifyReport(ok, [] if ok else [("density.threshold", "threshold mismatch")])
    raise TypeError(f"not a SepOrMinor: {result!r}")


def _bfs_diameter_within(g: Graph, bs: VertexSet) -> Optional[int]:
    """Hop diameter of G[bs]; None if disconnected.  Plain BFS per source."""
    ids = list(bs.ids())
    if len(ids) == 1:
        return 0
    inside = set(ids)
    best = 0
    for src in ids:
        dist = {src: 0}
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                for w in g.neighbors(u).tolist():
                    if w in inside and w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        if len(dist) != len(ids):
            return None
        best = max(best, max(dist.values()))
    return best


def _some_edge_between(g: Graph, a: VertexSet, b: VertexSet) -> bool:
    small, other = (a, b) if len(a) <= len(b) else (b, a)
    for u in small:
        nb = g.neighbors(u)
        for w in nb.tolist():
            if w in other:
                return True
    return False


def find_connecting_edge(g: Graph, a: VertexSet, b: VertexSet) -> Optional[tuple[int, int]]:
    small, other = (a, b) if len(a) <= len(b) else (b, a)
    for u in small:
        for w in g.neighbors(u).tolist():
            if w in other:
                return (u, w) if small is a else (w, u)
    return None


# -- A/B packing -------------------------------------------------------------


def pack_components(g: Graph, cmask: np.ndarray,
                    balance_c: Fraction = Fraction(2, 3)) -> tuple[VertexSet, VertexSet]:
    """Partition the components of G - C into sides A, B with exact balance.

    Greedy largest-first packing; succeeds whenever every component weighs at
    most balance_c * w(V), which the calling algorithms guarantee.
    """
    n = g.n
    rest = ~cmask
    sub_ids = np.flatnonzero(rest)
    if len(sub_ids) == 0:
        return VertexSet(), VertexSet()
    keep = rest[g.edge_u] & rest[g.edge_v]
    from scipy.sparse import csr_matrix
    from scipy.sparse import csgraph as _cs

    local = np.full(n, -1, dtype=np.int64)
    local[sub_ids] = np.arange(len(sub_ids))
    eu = local[g.edge_u[keep]]
    ev = local[g.edge_v[keep]]
    nn = len(sub_ids)
    mat = csr_matrix((np.ones(len(eu) * 2, dtype=np.int8),
                      (np.concatenate([eu, ev]), np.concatenate([ev, eu]))), shape=(nn, nn))
    ncomp, labels = _cs.connected_components(mat, directed=False)
    wloc = g.vertex_weight[sub_ids]
    comp_w = np.zeros(ncomp, dtype=np.int64)
    np.add.at(comp_w, labels, wloc)
    order = np.argsort(-comp_w, kind="stable")
    wv = int(g.total_vertex_weight)
    num, den = balance_c.numerator, balance_c.denominator
    side = np.zeros(ncomp, dtype=np.int8)
    wa = wb = 0
    for c in order.tolist():
        if wa <= wb:
            side[c] = 0
            wa += int(comp_w[c])
        else:
            side[c] = 1
            wb += int(comp_w[c])
    if wa * den > num * wv or wb * den > num * wv:
        raise ValueError("component packing failed: a residual component is too heavy")
    amask = np.zeros(n, dtype=bool)
    bmask = np.zeros(n, dtype=bool)
    asel = side[labels] == 0
    amask[sub_ids[asel]] = True
    bmask[sub_ids[~asel]] = True
    return VertexSet.from_mask(amask), VertexSet.from_mask(bmask)


def trim_separator_mask(g: Graph, cmask: np.ndarray, amask: np.ndarray, bmask: np.ndarray,
                        balance_c: Fraction = Fraction(2, 3)):
    """Greedily move separator vertices into a side they exclusively touch.

    A vertex of C with no neighbor in B may join A (and symmetrically) when
    the exact balance budget allows; repeated passes run to a fixpoint.  The
    result is a valid separator with the same or smaller C.
    """
    num, den = balance_c.numerator, balance_c.denominator
    wv = int(g.total_vertex_weight)
    wa = int(g.vertex_weight[amask].sum())
    wb = int(g.vertex_weight[bmask].sum())
    cmask = cmask.copy()
    amask = amask.copy()
    bmask = bmask.copy()
    changed = True
    while changed:
        changed = False
        for v in np.flatnonzero(cmask).tolist():
            nb = g.neighbors(v)
            touches_a = bool(amask[nb].any())
            touches_b = bool(bmask[nb].any())
            w = int(g.vertex_weight[v])
            if not touches_b and (wa + w) * den <= num * wv:
                cmask[v] = False
                amask[v] = True
                wa += w
                changed = True
            elif not touches_a and (wb + w) * den <= num * wv:
                cmask[v] = False
                bmask[v] = True
                wb += w
                changed = True
    return cmask, amask, bmask


def separator_from_cut_mask(g: Graph, cmask: np.ndarray, claimed_bound: Optional[int] = None,
                            balance_c: Fraction = Fraction(2, 3), params: Optional[dict] = None,
                            trim: bool = True) -> Separator:
    a, b = pack_components(g, cmask, balance_c)
    if trim:
        cmask, am, bm = trim_separator_mask(g, cmask, a.to_mask(g.n), b.to_mask(g.n),
                                            balance_c)
        a, b = VertexSet.from_mask(am), VertexSet.from_mask(bm)
    return Separator(C=VertexSet.from_mask(cmask), A=a, B=b, balance_c=balance_c,
                     claimed_bound=claimed_bound, params=params or {})


# -- brute-force oracles ------------------------------------------------------


def brute_force_min_separator(g: Graph, balance_c: Fraction = Fraction(2, 3)) -> Optional[Separator]:
    """Exact minimum balanced separator by subset enumeration (n <= 16)."""
    n = g.n
    if n > 16:
        raise OracleGuardError(f"brute_force_min_separator guarded to n <= 16, got {n}")
    if n == 0:
        return Separator(VertexSet(), VertexSet(), VertexSet(), balance_c, 0)
    wv = int(g.total_vertex_weight)
    num, den = balance_c.numerator, balance_c.denominator
    verts = list(range(n))
    adj = [set(g.neighbors(v).tolist()) for v in verts]
    wt = g.vertex_weight.tolist()

    def try_cut(cset: tuple[int, ...]) -> Optional[Separator]:
        inc = [v for v in verts if v not in cset]
        comp_of = {}
        comps: list[list[int]] = []
        for v in inc:
            if v in comp_of:
                continue
            comp = [v]
            comp_of[v] = len(comps)
            stack = [v]
            while stack:
                u = stack.pop()
                for x in adj[u]:
                    if x not in cset and x not in comp_of:
                        comp_of[x] = len(comps)
                        comp.append(x)
                        stack.append(x)
            comps.append(comp)
        weights = [sum(wt[v] for v in c) for c in comps]
        if any(w * den > num * wv for w in weights):
            return None
        # pack: try all 2^k splits (k <= n), smallest-first keeps it quick
        k = len(comps)
        order = sorted(range(k), key=lambda i: -weights[i])
        assign = [0] * k

        def place(i: int, wa: int, wb: int) -> bool:
            if i == k:
                return True
            c = order[i]
            for s, w_side in ((0, wa), (1, wb)):
                neww = w_side + weights[c]
                if neww * den <= num * wv:
                    assign[c] = s
                    if place(i + 1, neww if s == 0 else wa, neww if s == 1 else wb):
                        return True
            return False

        if not place(0, 0, 0):
            return None
        a = [v for v in inc if assign[comp_of[v]] == 0]
        b = [v for v in inc if assign[comp_of[v]] == 1]
        return Separator(VertexSet(cset), VertexSet(a), VertexSet(b), balance_c, len(cset))

    for size in range(0, n + 1):
        for cset in combinations(verts, size):
            sep = try_cut(cset)
            if sep is not None:
                return sep
    return None


def _connected_masks(adj_mask: list[int], n: int) -> list[int]:
    """All vertex subsets (as bitmasks) inducing a connected subgraph."""
    out = []
    for m in range(1, 1 << n):
        low = m & -m
        seen = low
        frontier = low
        while frontier:
            nxt = 0
            mm = frontier
            while mm:
                b = mm & -mm
                mm ^= b
                nxt |= adj_mask[b.bit_length() - 1]
            nxt &= m & ~seen
            seen |= nxt
            frontier = nxt
        if seen == m:
            out.append(m)
    return out


def brute_force_minor_detect(g: Graph, h: int) -> Optional[MinorWitness]:
    """Exhaustive K_h-minor search over connected branch-set candidates.

    Guarded to n <= 10 and h <= 4.  Returns a witness iff one exists.
    """
    n = g.n
    if n > 10 or h > 4:
        raise OracleGuardError(f"brute_force_minor_detect guarded to n <= 10, h <= 4 (got n={n}, h={h})")
    if h < 1 or n == 0:
        return None
    adj_mask = [0] * n
    for u in range(n):
        for v in g.neighbors(u).tolist():
            adj_mask[u] |= 1 << v
    cands = _connected_masks(adj_mask, n)
    nbr_of_mask: dict[int, int] = {}

    def nbrs(m: int) -> int:
        got = nbr_of_mask.get(m)
        if got is None:
            acc = 0
            mm = m
            while mm:
                b = mm & -mm
                mm ^= b
                acc |= adj_mask[b.bit_length() - 1]
            got = acc & ~m
            nbr_of_mask[m] = got
        return got

    chosen: list[int] = []

    def rec(start_idx: int, used: int) -> bool:
        if len(chosen) == h:
            return True
        for idx in range(start_idx, len(cands)):
            m = cands[idx]
            if m & used:
                continue
            if any(not (nbrs(m) & c) for c in chosen):
                continue
            chosen.append(m)
            # canonical form: branch sets enumerated in increasing mask order
            if rec(idx + 1, used | m):
                return True
            chosen.pop()
        return False

    if not rec(0, 0):
        return None
    sets = []
    for m in chosen:
        sets.append(VertexSet([i for i in range(n) if m >> i & 1]))
    wtn = MinorWitness(branch_sets=sets)
    for i, j in combinations(range(h), 2):
        e = find_connecting_edge(g, sets[i], sets[j])
        assert e is not None
        wtn.connecting_edges[(i, j)] = e
    return wtn


# -- serialization -------------------------------------------------------------


def certificate_to_json(result: SepOrMinor) -> str:
    """Canonical JSON for any SepOrMinor (sorted keys, sets as sorted arrays)."""

    def frac(f: Fraction) -> list[int]:
        return [f.numerator, f.denominator]

    if isinstance(result, Separator):
        doc = {
            "kind": "separator",
            "C": list(result.C.ids()),
            "A": list(result.A.ids()),
            "B": list(result.B.ids()),
            "balance_c": frac(result.balance_c),
            "claimed_bound": result.claimed_bound,
            "params": result.params,
        }
    elif isinstance(result, MinorWitness):
        doc = {
            "kind": "minor_witness",
            "h": result.h,
            "branch_sets": [list(bs.ids()) for bs in result.branch_sets],
            "depth_bound": result.depth_bound,
            "connecting_edges": {f"{i},{j}": [a, b] for (i, j), (a, b) in sorted(result.connecting_edges.items())},
            "params": result.params,
        }
    elif isinstance(result, MinorReport):
        doc = {
            "kind": "minor_report",
            "certificate": _density_doc(result.certificate),
            "params": result.params,
        }
    elif isinstance(result, DensityCertificate):
        doc = {"kind": "density", **_density_doc(result)}
    else:
        raise TypeError(f"not a SepOrMinor: {result!r}")
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _density_doc(cert: DensityCertificate) -> dict:
    return {"n": cert.n, "m": cert.m, "h": cert.h, "threshold": cert.threshold, "policy": cert.policy}


def certificate_from_json(text: str) -> SepOrMinor:
    doc = json.loads(text)
    kind = doc["kind"]
    if kind == "separator":
        num, den = doc["balance_c"]
        return Separator(
            C=VertexSet(doc["C"]), A=VertexSet(doc["A"]), B=VertexSet(doc["B"]),
            balance_c=Fraction(num, den), claimed_bound=doc.get("claimed_bound"),
            params=doc.get("params", {}),
        )
    if kind == "minor_witness":
        edges = {}
        for key, (a, b) in doc.get("connecting_edges", {}).items():
            i, j = key.split(",")
            edges[(int(i), int(j))] = (a, b)
        return MinorWitness(
            branch_sets=[VertexSet(bs) for bs in doc["branch_sets"]],
            depth_bound=doc.get("depth_bound"),
            connecting_edges=edges,
            params=doc.get("params", {}),
        )
    if kind == "minor_report":
        c = doc["certificate"]
        return MinorReport(certificate=DensityCertificate(
            n=c["n"], m=c["m"], h=c["h"], threshold=c["threshold"], policy=c["policy"]),
            params=doc.get("params", {}))
    if kind == "density":
        return DensityCertificate(n=doc["n"], m=doc["m"], h=doc["h"],
                                  threshold=doc["threshold"], policy=doc["policy"])
    raise ValueError(f"unknown certificate kind {kind!r}")
