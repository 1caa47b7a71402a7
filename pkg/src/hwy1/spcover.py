"""Shortest-path covers and highway-dimension-1 certification.

For h = 1 a locally sparse cover can be found component by component: any
shortest path of length at most 2r stays inside one component of the
subgraph of edges of length <= 2r, and such a component may hold at most one
hub.  So the hub of a component has to lie on *every* shortest path of
every pair it must cover, which is a plain intersection of mandatory-vertex
sets.  Scales are reduced to the finitely many values L/2 and L over the
distinct path lengths L, where the covered path family can change.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

from .graph import (
    INF,
    DistMatrix,
    Graph,
    all_pairs,
    mandatory_mask,
    metric_preprocess,
    threshold_components,
)


@dataclass(frozen=True)
class PathCover:
    scale: Fraction
    hubs: frozenset[int]


@dataclass(frozen=True)
class Hd1Certificate:
    """Hub-per-component maps at every critical scale."""

    min_weight: int
    scales: tuple[Fraction, ...]
    hubs: tuple[dict[int, int], ...]

    def index_for(self, r) -> int | None:
        i = bisect.bisect_right(self.scales, Fraction(r)) - 1
        return i if i >= 0 else None

    def hubs_at(self, r) -> dict[int, int]:
        """Component-representative -> hub map for the interval containing r."""
        i = self.index_for(r)
        return {} if i is None else self.hubs[i]

    def hub_set(self, r) -> frozenset[int]:
        return frozenset(self.hubs_at(r).values())

    def cover(self, r) -> PathCover:
        return PathCover(Fraction(r), self.hub_set(r))

    def to_json(self) -> dict:
        return {
            "min_weight": str(self.min_weight),
            "scales": [
                {"r": _frac_str(r), "hubs": {str(c): h for c, h in sorted(m.items())}}
                for r, m in zip(self.scales, self.hubs)
            ],
        }


@dataclass(frozen=True)
class Hd1Witness:
    """Covered pairs of one component with no vertex common to all their shortest paths."""

    scale: Fraction
    component: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "r": _frac_str(self.scale),
            "component": list(self.component),
            "pairs": [list(p) for p in self.pairs],
        }


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def critical_scales(d: DistMatrix) -> list[Fraction]:
    out = set()
    for L in d.distinct_lengths():
        out.add(Fraction(L, 2))
        out.add(Fraction(L))
    return sorted(out)


class _PairIndex:
    """Unordered vertex pairs sorted by distance, for range queries."""

    def __init__(self, d: DistMatrix):
        pairs = [
            (d.dist[u][w], u, w)
            for u in range(d.n)
            for w in range(u + 1, d.n)
            if d.dist[u][w] != INF
        ]
        pairs.sort()
        self.lengths = [p[0] for p in pairs]
        self.pairs = [(u, w) for _, u, w in pairs]

    def covered(self, r) -> list[tuple[int, int]]:
        """Pairs whose distance lies in (r, 2r]."""
        lo = bisect.bisect_right(self.lengths, r)
        hi = bisect.bisect_right(self.lengths, 2 * r)
        return self.pairs[lo:hi]


def covered_pairs(d: DistMatrix, r) -> list[tuple[int, int]]:
    return _PairIndex(d).covered(Fraction(r))


def spc1_for_scale(g: Graph, d: DistMatrix, r, _index: _PairIndex | None = None):
    """Hub per component of G_{<=2r}, or an ``Hd1Witness`` if some component has none.

    Components without covered pairs get no entry.
    """
    r = Fraction(r)
    index = _index or _PairIndex(d)
    comp = threshold_components(g, 2 * r)
    by_comp: dict[int, list[tuple[int, int]]] = {}
    for u, w in index.covered(r):
        if comp[u] != comp[w]:  # pragma: no cover - metric graphs never hit this
            raise ValueError("graph must be metric-preprocessed")
        by_comp.setdefault(comp[u], []).append((u, w))
    hubs: dict[int, int] = {}
    for c in sorted(by_comp):
        pairs = by_comp[c]
        common = -1
        for u, w in pairs:
            common &= mandatory_mask(d, u, w)
            if not common:
                break
        if common:
            hubs[c] = (common & -common).bit_length() - 1
        else:
            members = tuple(v for v in range(g.n) if comp[v] == c)
            return Hd1Witness(r, members, _minimal_conflict(d, sorted(pairs)))
    return hubs


def _minimal_conflict(d: DistMatrix, pairs: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    chosen = []
    common = -1
    for p in pairs:
        chosen.append(p)
        common &= mandatory_mask(d, *p)
        if not common:
            break
    # greedy shrink; the result stays conflicting
    i = 0
    while i < len(chosen):
        rest = chosen[:i] + chosen[i + 1:]
        acc = -1
        for p in rest:
            acc &= mandatory_mask(d, *p)
        if rest and acc == 0:
            chosen = rest
        else:
            i += 1
    return tuple(chosen)


def verify_hd1(g: Graph, d: DistMatrix | None = None):
    """Certificate that g has highway dimension 1, or a witness that it does not."""
    if d is None:
        d = all_pairs(g)
    elif not d.connected():
        raise ValueError("graph is disconnected")
    g = metric_preprocess(g, d)
    index = _PairIndex(d)
    scales = critical_scales(d)
    maps = []
    for r in scales:
        res = spc1_for_scale(g, d, r, index)
        if isinstance(res, Hd1Witness):
            return res
        maps.append(res)
    min_w = g.min_weight if g.edges else 0
    return Hd1Certificate(min_w, tuple(scales), tuple(maps))


def hub_free_path_count(g: Graph, d: DistMatrix, u: int, w: int, blocked) -> int:
    """Number of shortest u-w paths that avoid every vertex in ``blocked``."""
    if u in blocked or w in blocked:
        return 0
    du, dw = d.dist[u], d.dist[w]
    total = du[w]
    on = [v for v in range(g.n) if du[v] + dw[v] == total and v not in blocked]
    on.sort(key=lambda v: du[v])
    ways = {u: 1}
    for v in on:
        if v == u:
            continue
        acc = 0
        for x, wt in g.adj[v].items():
            if x in ways and du[x] + wt == du[v]:
                acc += ways[x]
        if acc:
            ways[v] = acc
    return ways.get(w, 0)


def verify_spc(g: Graph, r, hubs, h: int, d: DistMatrix | None = None) -> bool:
    """Check that ``hubs`` hits all shortest paths of length in (r, 2r] and is locally h-sparse."""
    r = Fraction(r)
    hubs = frozenset(hubs)
    if d is None:
        d = all_pairs(g, allow_disconnected=True)
    for u, w in covered_pairs(d, r):
        if hub_free_path_count(g, d, u, w, hubs):
            return False
    for v in range(g.n):
        row = d.dist[v]
        if sum(1 for x in hubs if row[x] <= 2 * r) > h:
            return False
    return True


def check_witness(g: Graph, witness: Hd1Witness, d: DistMatrix | None = None) -> bool:
    """Re-check a witness without the path-count product test.

    Every listed pair must be covered at the witness scale and lie in the
    witness component, and every vertex of the component must be avoided by
    some shortest path of some listed pair.
    """
    if d is None:
        d = all_pairs(g, allow_disconnected=True)
    r = witness.scale
    comp = threshold_components(metric_preprocess(g, d), 2 * r)
    members = set(witness.component)
    if not witness.pairs:
        return False
    for u, w in witness.pairs:
        if not (r < d.dist[u][w] <= 2 * r) or u not in members or w not in members:
            return False
    if {v for v in range(g.n) if comp[v] == comp[witness.component[0]]} != members:
        return False
    for v in sorted(members):
        if not any(hub_free_path_count(g, d, u, w, {v}) for u, w in witness.pairs):
            return False
    return True


__all__ = [
    "PathCover",
    "Hd1Certificate",
    "Hd1Witness",
    "critical_scales",
    "covered_pairs",
    "spc1_for_scale",
    "verify_hd1",
    "verify_spc",
    "check_witness",
    "hub_free_path_count",
]
