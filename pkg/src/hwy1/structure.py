"""Level components, interface points, nets and quotient graphs.

Radii are ``r_i = (w_min / 3) * 2**i`` so that no edge survives at level 0
while the integer weights stay untouched.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import (
    DistMatrix,
    Graph,
    all_pairs,
    aspect_ratio,
    component_groups,
    metric_preprocess,
    threshold_components,
)
from .spcover import Hd1Certificate

MAX_LEVELS = 10**6


class InternalInconsistency(RuntimeError):
    """A structural guarantee failed; points at a certificate or hierarchy bug."""


class NetCoverageWarning(UserWarning):
    pass


def ceil_log2(x: Fraction) -> int:
    """Smallest k >= 0 with 2**k >= x."""
    x = Fraction(x)
    if x <= 1:
        return 0
    p, q = x.numerator, x.denominator
    k = max(0, p.bit_length() - q.bit_length() - 1)
    while (q << k) < p:
        k += 1
    return k


@dataclass
class LevelHierarchy:
    graph: Graph
    dist: DistMatrix
    base_unit: Fraction
    alpha: Fraction
    top: int
    _levels: dict = field(default_factory=dict, repr=False)

    def radius(self, i: int) -> Fraction:
        return self.base_unit * 2**i

    def partition(self, i: int) -> tuple[int, ...]:
        """``comp[v]`` = smallest vertex of v's level-i component."""
        if not 0 <= i <= self.top:
            raise IndexError(f"level {i} outside 0..{self.top}")
        comp = self._levels.get(i)
        if comp is None:
            comp = threshold_components(self.graph, 2 * self.radius(i))
            self._levels[i] = comp
        return comp

    def components(self, i: int) -> dict[int, list[int]]:
        return component_groups(self.partition(i))

    def parent(self, i: int, rep: int) -> int:
        return self.partition(i + 1)[rep]

    def members(self, i: int, rep: int) -> list[int]:
        comp = self.partition(i)
        return [v for v in range(self.graph.n) if comp[v] == rep]

    def to_json(self) -> dict:
        levels = []
        for i in range(self.top + 1):
            levels.append({
                "level": i,
                "radius": _fs(self.radius(i)),
                "components": [
                    {"id": rep, "members": mem} for rep, mem in sorted(self.components(i).items())
                ],
            })
        return {
            "base_unit": _fs(self.base_unit),
            "alpha": _fs(self.alpha),
            "top": self.top,
            "levels": levels,
        }


def _fs(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def build_hierarchy(g: Graph, cert, d: DistMatrix | None = None) -> LevelHierarchy:
    if not isinstance(cert, Hd1Certificate):
        raise ValueError("build_hierarchy needs an Hd1Certificate")
    if d is None:
        d = all_pairs(g)
    g = metric_preprocess(g, d)
    if g.n < 2:
        return LevelHierarchy(g, d, Fraction(1), Fraction(1), 0)
    base = Fraction(g.min_weight, 3)
    alpha = aspect_ratio(d)
    top = 1 + ceil_log2(alpha)
    if top > MAX_LEVELS:
        raise ValueError(f"aspect ratio needs {top} levels, above the cap of {MAX_LEVELS}")
    h = LevelHierarchy(g, d, base, alpha, top)
    if len(set(h.partition(top))) != 1:
        raise InternalInconsistency("top level is not a single component")
    return h


@dataclass(frozen=True)
class InterfaceSet:
    level: int
    component: int
    points: tuple[tuple[int, int, int], ...]  # (level j, hub, dist_C(hub))

    @property
    def hubs(self) -> frozenset[int]:
        return frozenset(p[1] for p in self.points)


def interface_points(h: LevelHierarchy, cert: Hd1Certificate, level: int, rep: int) -> InterfaceSet:
    members = h.members(level, rep)
    dist = h.dist.dist
    points = []
    for j in range(level, h.top + 1):
        limit = 2 * h.radius(j)
        found = []
        for u in sorted(cert.hub_set(h.radius(j))):
            du = dist[u]
            dc = min(du[c] for c in members)
            if dc <= limit:
                found.append((j, u, dc))
        if len(found) > 1:
            raise InternalInconsistency(
                f"component {rep} at level {level} sees {len(found)} hubs of level {j}"
            )
        points.extend(found)
    return InterfaceSet(level, rep, tuple(points))


# --- nets ------------------------------------------------------------------

@dataclass(frozen=True)
class Net:
    radius: Fraction
    points: tuple[int, ...]
    eta: tuple[int, ...]

    def to_json(self) -> dict:
        return {"r": _fs(self.radius), "points": list(self.points), "eta": list(self.eta)}


def net_invariants(g: Graph, net: Net, d: DistMatrix) -> dict[str, bool]:
    r = net.radius
    pts = net.points
    comp = threshold_components(metric_preprocess(g, d), r)
    groups = component_groups(comp)
    return {
        "separated": all(d.dist[a][b] > r for i, a in enumerate(pts) for b in pts[i + 1:]),
        "covering": all(min(d.dist[v][p] for p in pts) <= 3 * r for v in range(g.n)),
        "one_per_component": all(
            sum(1 for p in pts if comp[p] == c) == 1 for c in groups
        ),
        "eta_in_component": all(
            net.eta[v] in pts and comp[net.eta[v]] == comp[v] for v in range(g.n)
        ),
    }


def compute_net(g: Graph, r, d: DistMatrix | None = None, certified: bool = False) -> Net:
    """One representative (smallest id) per component of G_{<=r}."""
    r = Fraction(r)
    if d is None:
        d = all_pairs(g)
    comp = threshold_components(metric_preprocess(g, d), r)
    points = tuple(sorted(set(comp)))
    net = Net(r, points, comp)
    worst = max((d.dist[v][comp[v]] for v in range(g.n)), default=0)
    if worst > 3 * r:
        if certified:
            raise InternalInconsistency(f"net point at distance {worst} > 3r on a certified graph")
        warnings.warn(f"net coverage {worst} exceeds 3r = {3 * r}", NetCoverageWarning, stacklevel=2)
    if certified:
        bad = [k for k, ok in net_invariants(g, net, d).items() if not ok]
        if bad:
            raise InternalInconsistency(f"net invariants failed: {bad}")
    return net


@dataclass(frozen=True)
class Quotient:
    """Graph on net points; ``points[i]`` is the original vertex behind quotient vertex i."""

    graph: Graph
    points: tuple[int, ...]
    eta: tuple[int, ...]  # original vertex -> quotient vertex id


def quotient_graph(g: Graph, net: Net, d: DistMatrix | None = None) -> Quotient:
    if d is None:
        d = all_pairs(g)
    index = {p: i for i, p in enumerate(net.points)}
    eta = tuple(index[net.eta[v]] for v in range(g.n))
    edges = {}
    for u, v, _ in g.edges:
        a, b = eta[u], eta[v]
        if a != b:
            a, b = min(a, b), max(a, b)
            edges[(a, b)] = d.dist[net.points[a]][net.points[b]]
    terms = frozenset(eta[t] for t in g.terminals)
    q = Graph(len(net.points), tuple((a, b, w) for (a, b), w in edges.items()), terms, unit=g.unit)
    return Quotient(q, net.points, eta)
