"""Exact-arithmetic weighted graphs and shortest-path structure.

Edge weights are Python integers, so lengths never round.  Rational inputs are
scaled to a common denominator when parsed; ``Graph.unit`` remembers that
denominator so costs can be reported in the original units.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

INF = math.inf


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with positive integer weights."""

    n: int
    edges: tuple[tuple[int, int, int], ...]
    terminals: frozenset[int] = frozenset()
    labels: tuple[str, ...] | None = None
    unit: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative vertex count")
        norm = []
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not isinstance(w, int) or isinstance(w, bool):
                raise TypeError(f"weight of ({u}, {v}) must be an int, got {type(w).__name__}")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            a, b = (u, v) if u < v else (v, u)
            if (a, b) in seen:
                raise ValueError(f"parallel edge ({a}, {b})")
            seen.add((a, b))
            norm.append((a, b, w))
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        for t in self.terminals:
            if not 0 <= t < self.n:
                raise ValueError(f"terminal {t} out of range")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must name every vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]], terminals=(), **kw) -> "Graph":
        return cls(n, tuple(edges), frozenset(terminals), **kw)

    @cached_property
    def adj(self) -> tuple[dict[int, int], ...]:
        adj: list[dict[int, int]] = [{} for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return tuple(adj)

    def weight(self, u: int, v: int) -> int:
        return self.adj[u][v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def min_weight(self) -> int:
        if not self.edges:
            raise ValueError("graph has no edges")
        return min(w for _, _, w in self.edges)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def with_terminals(self, terminals: Iterable[int]) -> "Graph":
        return Graph(self.n, self.edges, frozenset(terminals), self.labels, self.unit)

    def with_edges(self, edges: Iterable[tuple[int, int, int]]) -> "Graph":
        return Graph(self.n, tuple(edges), self.terminals, self.labels, self.unit)

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``vertices``; returns it with the new-to-old id map."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v], w) for u, v, w in self.edges if u in index and v in index]
        terms = [index[t] for t in self.terminals if t in index]
        labels = tuple(self.labels[v] for v in keep) if self.labels else None
        return Graph(len(keep), tuple(edges), frozenset(terms), labels, self.unit), keep

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(set(threshold_components(self, INF))) == 1


@dataclass(frozen=True)
class DistMatrix:
    """Pairwise distances plus exact shortest-path counts."""

    dist: tuple[tuple[int | float, ...], ...]
    count: tuple[tuple[int, ...], ...]
    _mandatory: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.dist)

    def __getitem__(self, uv: tuple[int, int]):
        u, v = uv
        return self.dist[u][v]

    def connected(self) -> bool:
        return all(d != INF for row in self.dist for d in row)

    def distinct_lengths(self) -> list[int]:
        return sorted({d for row in self.dist for d in row if d != INF and d > 0})

    def ball(self, v: int, radius) -> list[int]:
        row = self.dist[v]
        return [x for x in range(self.n) if row[x] <= radius]


def all_pairs(g: Graph, allow_disconnected: bool = False) -> DistMatrix:
    """Dijkstra from every vertex, counting shortest paths exactly."""
    n = g.n
    adj = g.adj
    dist_rows = []
    count_rows = []
    for s in range(n):
        dist = [INF] * n
        cnt = [0] * n
        dist[s] = 0
        cnt[s] = 1
        done = [False] * n
        heap = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w in adj[u].items():
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    cnt[v] = cnt[u]
                    heapq.heappush(heap, (nd, v))
                elif nd == dist[v]:
                    cnt[v] += cnt[u]
        if not allow_disconnected and not all(done):
            raise ValueError("graph is disconnected")
        dist_rows.append(tuple(dist))
        count_rows.append(tuple(cnt))
    return DistMatrix(tuple(dist_rows), tuple(count_rows))


def metric_preprocess(g: Graph, d: DistMatrix | None = None) -> Graph:
    """Drop every edge that is longer than the distance between its endpoints.

    One pass suffices: removing a non-shortest edge never changes a distance.
    """
    if d is None:
        d = all_pairs(g, allow_disconnected=True)
    kept = tuple((u, v, w) for u, v, w in g.edges if w == d.dist[u][v])
    if len(kept) == len(g.edges):
        return g
    return g.with_edges(kept)


def mandatory_mask(d: DistMatrix, u: int, w: int) -> int:
    """Bitmask of vertices lying on every shortest u-w path."""
    key = (u, w) if u < w else (w, u)
    cached = d._mandatory.get(key)
    if cached is not None:
        return cached
    du, dw = d.dist[u], d.dist[w]
    cu, cw = d.count[u], d.count[w]
    total = du[w]
    if total == INF:
        raise ValueError(f"{u} and {w} are disconnected")
    sigma = cu[w]
    mask = 0
    for v in range(d.n):
        if du[v] + dw[v] == total and cu[v] * cw[v] == sigma:
            mask |= 1 << v
    d._mandatory[key] = mask
    return mask


def mandatory_vertices(d: DistMatrix, u: int, w: int) -> frozenset[int]:
    if u == w:
        raise ValueError("mandatory_vertices needs two distinct endpoints")
    return frozenset(iter_bits(mandatory_mask(d, u, w)))


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def aspect_ratio(d: DistMatrix) -> Fraction:
    if d.n < 2:
        raise ValueError("aspect ratio needs at least two vertices")
    lengths = d.distinct_lengths()
    if not d.connected():
        raise ValueError("aspect ratio of a disconnected graph is undefined")
    return Fraction(lengths[-1], lengths[0])


def threshold_components(g: Graph, t) -> tuple[int, ...]:
    """Components of the subgraph of edges with weight <= t.

    Returns ``comp`` with ``comp[v]`` the smallest vertex id in v's component.
    """
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, w in g.edges:
        if w <= t:
            ru, rv = find(u), find(v)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
    return tuple(find(v) for v in range(g.n))


def component_groups(comp: tuple[int, ...]) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        groups.setdefault(c, []).append(v)
    return groups


def shortest_path(g: Graph, d: DistMatrix, u: int, v: int) -> list[int]:
    """A shortest u-v path; at each step the smallest-id valid successor is taken."""
    if d.dist[u][v] == INF:
        raise ValueError(f"no path between {u} and {v}")
    path = [u]
    x = u
    target = d.dist[v]
    while x != v:
        for y in sorted(g.adj[x]):
            if g.adj[x][y] + target[y] == target[x]:
                x = y
                break
        else:  # pragma: no cover - impossible with consistent distances
            raise RuntimeError("distance table inconsistent with graph")
        path.append(x)
    return path


def mst_edges(n: int, weighted_pairs: Iterable[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """Kruskal; ties broken by (weight, u, v)."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for u, v, w in sorted(weighted_pairs, key=lambda e: (e[2], e[0], e[1])):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
            out.append((u, v, w))
    return out


# --- text format -----------------------------------------------------------

def _parse_weight(tok: str) -> Fraction:
    try:
        value = Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise GraphFormatError(f"bad weight {tok!r}") from exc
    if value <= 0:
        raise GraphFormatError(f"non-positive weight {tok!r}")
    return value


def parse_graph(text: str) -> Graph:
    """Parse the ``p graph`` / ``e`` / ``t`` line format."""
    n = m = None
    raw_edges = []
    terminals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "p":
                if len(parts) != 4 or parts[1] != "graph":
                    raise GraphFormatError("header must be 'p graph <n> <m>'")
                if n is not None:
                    raise GraphFormatError("duplicate header")
                n, m = int(parts[2]), int(parts[3])
            elif tag == "e":
                if len(parts) != 4:
                    raise GraphFormatError("edge line must be 'e <u> <v> <w>'")
                raw_edges.append((int(parts[1]), int(parts[2]), _parse_weight(parts[3])))
            elif tag == "t":
                if len(parts) != 2:
                    raise GraphFormatError("terminal line must be 't <v>'")
                terminals.append(int(parts[1]))
            else:
                raise GraphFormatError(f"unknown record {tag!r}")
        except GraphFormatError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphFormatError("missing 'p graph' header")
    if m != len(raw_edges):
        raise GraphFormatError(f"header declares {m} edges, found {len(raw_edges)}")
    unit = math.lcm(*(w.denominator for _, _, w in raw_edges)) if raw_edges else 1
    edges = tuple((u, v, int(w * unit)) for u, v, w in raw_edges)
    try:
        return Graph(n, edges, frozenset(terminals), unit=unit)
    except (ValueError, TypeError) as exc:
        raise GraphFormatError(str(exc)) from None


def format_graph(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"p graph {g.n} {g.m}")
    for u, v, w in g.edges:
        if g.unit == 1:
            lines.append(f"e {u} {v} {w}")
        else:
            lines.append(f"e {u} {v} {Fraction(w, g.unit)}")
    for t in sorted(g.terminals):
        lines.append(f"t {t}")
    return "\n".join(lines) + "\n"


def cost_str(cost: int, unit: int = 1) -> str:
    """Exact decimal string of cost/unit; falls back to ``p/q`` for non-terminating values."""
    x = Fraction(cost, unit)
    q = x.denominator
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    if q != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = abs(x.numerator) * 10**digits // x.denominator
    sign = "-" if x < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
