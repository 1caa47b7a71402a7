"""Brute-force ground truth for the solvers and the certifier.

Nothing here shares code with ``dpsolvers`` or ``spcover``: distances come
from a private Floyd-Warshall, and tours/trees are rebuilt from its next-hop
table.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import random
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

import numpy as np

from .graph import Graph, INF

DEFAULT_CAPS = {"held_karp": 18, "dreyfus_wagner": 12, "highway_dimension": 12, "sat": 20}


class OracleCapExceeded(ValueError):
    pass


def _cap(name: str) -> int:
    override = os.environ.get("HWY1_MAX_ORACLE_N")
    return int(override) if override else DEFAULT_CAPS[name]


def floyd_warshall(g: Graph):
    """Distances and next-hop table (smallest-id successor among ties)."""
    n = g.n
    dist = [[INF] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = 0
    for u, v, w in g.edges:
        if w < dist[u][v]:
            dist[u][v] = dist[v][u] = w
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            di = dist[i]
            dik = di[k]
            if dik == INF:
                continue
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    nxt = [[-1] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j or dist[i][j] == INF:
                continue
            for y in sorted(g.adj[i]):
                if g.adj[i][y] + dist[y][j] == dist[i][j]:
                    nxt[i][j] = y
                    break
    return dist, nxt


def _path(nxt, a: int, b: int) -> list[int]:
    out = [a]
    while a != b:
        a = nxt[a][b]
        out.append(a)
    return out


@dataclass(frozen=True)
class OracleTour:
    walk: tuple[int, ...]
    cost: int


@dataclass(frozen=True)
class OracleTree:
    edges: tuple[tuple[int, int], ...]
    cost: int


# --- TSP -------------------------------------------------------------------

def held_karp_tsp(g: Graph) -> OracleTour:
    """Exact TSP as a Hamiltonian cycle in the metric closure, expanded to a walk."""
    n = g.n
    if n > _cap("held_karp"):
        raise OracleCapExceeded(f"held_karp_tsp is capped at {_cap('held_karp')} vertices")
    if n == 1:
        return OracleTour((0,), 0)
    dist, nxt = floyd_warshall(g)
    if any(d == INF for row in dist for d in row):
        raise ValueError("graph is disconnected")
    m = n - 1
    full = 1 << m
    biggest = max(max(row) for row in dist)
    big = (n + 2) * biggest + 1
    dtype = np.int64 if 2 * big < 2**62 else object
    cost = np.array([[dist[i + 1][j + 1] for j in range(m)] for i in range(m)], dtype=dtype)
    dp = np.full((full, m), big, dtype=dtype)
    back = np.full((full, m), -1, dtype=np.int16)
    for j in range(m):
        dp[1 << j, j] = dist[0][j + 1]
    masks = np.arange(full, dtype=np.int64)
    pop = np.zeros(full, dtype=np.int64)
    for j in range(m):
        pop += (masks >> j) & 1
    for size in range(2, m + 1):
        layer = masks[pop == size]
        for j in range(m):
            sel = layer[((layer >> j) & 1) == 1]
            prev = sel ^ (1 << j)
            cand = dp[prev] + cost[:, j]
            best = np.argmin(cand, axis=1)
            dp[sel, j] = cand[np.arange(len(sel)), best]
            back[sel, j] = best
    closing = [dp[full - 1, j] + dist[j + 1][0] for j in range(m)]
    last = min(range(m), key=lambda j: (closing[j], j))
    total = int(closing[last])
    order = []
    mask, j = full - 1, last
    while j != -1:
        order.append(j + 1)
        pj = int(back[mask, j])
        mask ^= 1 << j
        j = pj if mask else -1
    order.append(0)
    order.reverse()
    order.append(0)
    walk = [0]
    for a, b in zip(order, order[1:]):
        walk.extend(_path(nxt, a, b)[1:])
    if sum(g.weight(a, b) for a, b in zip(walk, walk[1:])) != total:  # pragma: no cover
        raise RuntimeError("Held-Karp reconstruction mismatch")
    return OracleTour(tuple(walk), total)


def milp_tsp(g: Graph) -> OracleTour:
    """Exact TSP by integer programming over edge multiplicities 0..2 with lazy cut constraints.

    Used above the Held-Karp size cap.  Costs must be exactly representable
    as doubles; the returned cost is recomputed in integers.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    n, edges = g.n, list(g.edges)
    if n == 1:
        return OracleTour((0,), 0)
    if sum(w for *_, w in edges) * 2 >= 2**53:
        raise OracleCapExceeded("edge weights too large for an exact floating-point MILP")
    m = len(edges)
    c = np.array([w for *_, w in edges] + [0] * n, dtype=float)
    integrality = np.ones(m + n)
    lb = np.array([0] * m + [1] * n, dtype=float)
    ub = np.array([2] * m + [n] * n, dtype=float)
    rows = []
    for v in range(n):
        row = np.zeros(m + n)
        for k, (a, b, _) in enumerate(edges):
            if v in (a, b):
                row[k] = 1
        row[m + v] = -2
        rows.append((row, 0.0, 0.0))
    while True:
        A = lil_matrix((len(rows), m + n))
        lo, hi = [], []
        for i, (row, l, h) in enumerate(rows):
            for k in np.nonzero(row)[0]:
                A[i, k] = row[k]
            lo.append(l)
            hi.append(h)
        res = milp(
            c,
            constraints=LinearConstraint(A.tocsr(), lo, hi),
            integrality=integrality,
            bounds=Bounds(lb, ub),
            options={"mip_rel_gap": 0.0},
        )
        if res.status != 0:
            raise RuntimeError(f"MILP failed: {res.message}")
        x = [int(round(v)) for v in res.x[:m]]
        comp = list(range(n))

        def find(a):
            while comp[a] != a:
                comp[a] = comp[comp[a]]
                a = comp[a]
            return a

        for k, (a, b, _) in enumerate(edges):
            if x[k]:
                comp[find(a)] = find(b)
        groups: dict[int, set[int]] = {}
        for v in range(n):
            groups.setdefault(find(v), set()).add(v)
        if len(groups) == 1:
            break
        for part in groups.values():
            row = np.zeros(m + n)
            for k, (a, b, _) in enumerate(edges):
                if (a in part) != (b in part):
                    row[k] = 1
            rows.append((row, 2.0, np.inf))
    multi = {(a, b): x[k] for k, (a, b, _) in enumerate(edges) if x[k]}
    walk = _euler(n, multi)
    total = sum(w * x[k] for k, (*_, w) in enumerate(edges))
    return OracleTour(tuple(walk), total)


def _euler(n: int, multi) -> list[int]:
    adj = [dict() for _ in range(n)]
    for (a, b), k in multi.items():
        adj[a][b] = adj[a].get(b, 0) + k
        adj[b][a] = adj[b].get(a, 0) + k
    stack, out = [0], []
    while stack:
        x = stack[-1]
        if adj[x]:
            y = min(adj[x])
            adj[x][y] -= 1
            adj[y][x] -= 1
            if not adj[x][y]:
                del adj[x][y], adj[y][x]
            stack.append(y)
        else:
            out.append(stack.pop())
    return out[::-1]


def exact_tsp(g: Graph) -> OracleTour:
    """Held-Karp within its cap, integer programming above it."""
    return held_karp_tsp(g) if g.n <= _cap("held_karp") else milp_tsp(g)


# --- Steiner ---------------------------------------------------------------

def dreyfus_wagner_steiner(g: Graph, terminals) -> OracleTree:
    R = sorted(set(terminals))
    if not R:
        raise ValueError("terminal set is empty")
    if len(R) > _cap("dreyfus_wagner"):
        raise OracleCapExceeded(f"dreyfus_wagner_steiner is capped at {_cap('dreyfus_wagner')} terminals")
    dist, nxt = floyd_warshall(g)
    if any(dist[R[0]][t] == INF for t in R):
        raise ValueError("terminals are not connected")
    if len(R) == 1:
        return OracleTree((), 0)
    root, rest = R[-1], R[:-1]
    k, n = len(rest), g.n
    full = (1 << k) - 1
    dp: list[list] = [None] * (full + 1)
    how: list[list] = [None] * (full + 1)
    for i, t in enumerate(rest):
        dp[1 << i] = list(dist[t])
        how[1 << i] = [("leaf", t)] * n
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        best = [INF] * n
        choice = [None] * n
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                a, b = dp[sub], dp[mask ^ sub]
                for v in range(n):
                    s = a[v] + b[v]
                    if s < best[v]:
                        best[v] = s
                        choice[v] = ("split", sub)
            sub = (sub - 1) & mask
        relaxed = list(best)
        rchoice = list(choice)
        for v in range(n):
            dv = dist[v]
            for u in range(n):
                s = best[u] + dv[u]
                if s < relaxed[v]:
                    relaxed[v] = s
                    rchoice[v] = ("move", u)
        dp[mask], how[mask] = relaxed, rchoice
    total = dp[full][root]
    pairs = []
    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        kind, arg = how[mask][v]
        if kind == "leaf":
            pairs.append((arg, v))
        elif kind == "split":
            stack.append((arg, v))
            stack.append((mask ^ arg, v))
        else:
            # the entry at ``arg`` is never itself a move, so this terminates
            pairs.append((arg, v))
            stack.append((mask, arg))
    used = set()
    for a, b in pairs:
        if a != b:
            p = _path(nxt, a, b)
            used.update((min(x, y), max(x, y)) for x, y in zip(p, p[1:]))
    edges = _tree_from(g, used, set(R))
    cost = sum(g.weight(a, b) for a, b in edges)
    if cost != total:  # pragma: no cover
        raise RuntimeError("Dreyfus-Wagner reconstruction mismatch")
    return OracleTree(tuple(edges), total)


def _tree_from(g: Graph, used, terms) -> list[tuple[int, int]]:
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    tree = []
    for a, b in sorted(used, key=lambda e: (g.weight(*e), e)):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.append((a, b))
    changed = True
    while changed:
        changed = False
        deg: dict[int, int] = {}
        for a, b in tree:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        for e in list(tree):
            if any(deg[v] == 1 and v not in terms for v in e):
                tree.remove(e)
                changed = True
                break
    return sorted(tree)


# --- highway dimension -----------------------------------------------------

def _shortest_path_sets(g: Graph, dist, u: int, w: int) -> set[int]:
    """Vertex sets (as bitmasks) of every shortest u-w path."""
    out = set()
    du, dw = dist[u], dist[w]
    total = du[w]

    def walk(x, mask):
        if x == w:
            out.add(mask)
            return
        for y, wt in g.adj[x].items():
            if du[x] + wt == du[y] and du[y] + dw[y] == total:
                walk(y, mask | (1 << y))

    walk(u, 1 << u)
    return out


def _scale_list(dist) -> list[Fraction]:
    lengths = {d for row in dist for d in row if d != INF and d > 0}
    return sorted({Fraction(L, 2) for L in lengths} | {Fraction(L) for L in lengths})


def _min_sparsity(paths: list[int], balls: list[int], n: int, h_max: int) -> int | None:
    """Smallest h admitting a hitting set with at most h hubs per ball; None if above h_max."""
    if not paths:
        return 0
    ordered = sorted(paths, key=lambda p: tuple(v for v in range(n) if p >> v & 1))
    # drop supersets: hitting the smaller set hits the larger
    minimal = [p for p in ordered if not any(q != p and q & p == q for q in ordered)]
    holders = [[x for x in range(n) if balls[x] >> v & 1] for v in range(n)]
    for h in range(1, h_max + 1):
        seen = set()

        def search(hubs: int) -> bool:
            for p in minimal:
                if not p & hubs:
                    break
            else:
                return True
            for v in range(n):
                if not p >> v & 1:
                    continue
                nh = hubs | (1 << v)
                if nh in seen:
                    continue
                seen.add(nh)
                if any(bin(balls[x] & nh).count("1") > h for x in holders[v]):
                    continue
                if search(nh):
                    return True
            return False

        if search(0):
            return h
    return None


def exact_highway_dimension(g: Graph, h_max: int = 4) -> int | None:
    """Smallest h with a locally h-sparse cover at every scale; None when it exceeds ``h_max``."""
    if g.n > _cap("highway_dimension"):
        raise OracleCapExceeded(f"exact_highway_dimension is capped at {_cap('highway_dimension')} vertices")
    dist, _ = floyd_warshall(g)
    n = g.n
    paths_by_pair = {}
    for u in range(n):
        for w in range(u + 1, n):
            if dist[u][w] != INF:
                paths_by_pair[(u, w)] = _shortest_path_sets(g, dist, u, w)
    worst = 0
    for r in _scale_list(dist):
        paths = set()
        for (u, w), sets in paths_by_pair.items():
            if r < dist[u][w] <= 2 * r:
                paths |= sets
        balls = [sum(1 << x for x in range(n) if dist[v][x] <= 2 * r) for v in range(n)]
        h = _min_sparsity(list(paths), balls, n, h_max)
        if h is None:
            return None
        worst = max(worst, h)
    return worst


# --- SAT -------------------------------------------------------------------

def sat_bruteforce(formula) -> tuple[bool, tuple[bool, ...] | None]:
    k = formula.num_vars
    if k > _cap("sat"):
        raise OracleCapExceeded(f"sat_bruteforce is capped at {_cap('sat')} variables")
    for bits in itertools.product((False, True), repeat=k):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in formula.clauses):
            return True, bits
    return False, None


# --- hd-1 instance generator -------------------------------------------------

@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    depth: int = 2
    branching: int = 3
    base_weight: int = 3
    growth: int = 8
    cliques: bool = True
    max_n: int = 40


def _draw(p: GeneratorParams, rng: random.Random) -> Graph:
    edges = []
    count = [0]

    def new() -> int:
        count[0] += 1
        return count[0] - 1

    def build(level: int, top: bool) -> tuple[int, int]:
        if level == 0:
            return new(), 0
        k = p.branching if top else rng.randint(1, p.branching)
        kids = [build(level - 1, False) for _ in range(k)]
        span = max(d for _, d in kids)
        unit = max(p.base_weight, p.growth * span)
        if p.cliques and k >= 2 and rng.random() < 0.4:
            # each portal joins all earlier ones at its own scale; later ones act as hubs
            ports = [q for q, _ in kids]
            for j in range(1, k):
                w = unit * 3**j + rng.randint(0, unit // 2)
                for i in range(j):
                    edges.append((ports[i], ports[j], w))
            return ports[0], 2 * unit * 3 ** (k - 1) + 2 * span
        c = new()
        heavy = 0
        for q, _ in kids:
            w = rng.randint(unit, 2 * unit - 1)
            heavy = max(heavy, w)
            edges.append((c, q, w))
        return c, 2 * heavy + 2 * span

    build(p.depth, True)
    return Graph(count[0], tuple(edges))


def gen_hd1_instance(p: GeneratorParams, retries: int = 50):
    """Random hub-and-spoke graph that ``verify_hd1`` certifies.

    Returns ``(graph, certificate)``.  Certification, not the construction,
    is what makes an output acceptable.
    """
    from .spcover import Hd1Certificate, verify_hd1

    rng = random.Random(p.seed)
    for _ in range(retries):
        g = _draw(p, rng)
        if g.n > p.max_n:
            continue
        cert = verify_hd1(g)
        if isinstance(cert, Hd1Certificate):
            return g, cert
    raise RuntimeError(f"no certified instance after {retries} draws for {p}")


def corpus_params(seed: int, max_n: int = 40) -> GeneratorParams:
    """Deterministic parameter mix for corpus member ``seed``."""
    rng = random.Random(10_007 * seed + 17)
    depth = rng.choice((1, 2, 2, 3, 3))
    branching = {1: rng.randint(2, 8), 2: rng.randint(3, 6), 3: rng.randint(2, 4)}[depth]
    return GeneratorParams(seed=seed, depth=depth, branching=branching, max_n=max_n,
                           base_weight=rng.choice((3, 4, 5)), growth=rng.choice((8, 10)))


def certificate_digest(cert) -> str:
    blob = json.dumps(cert.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def gen_corpus(count: int, seed: int = 0, max_n: int = 40):
    """``count`` certified instances plus a manifest list."""
    from .graph import aspect_ratio, all_pairs

    out, manifest = [], []
    for i in range(count):
        params = corpus_params(seed + i, max_n)
        while True:
            try:
                g, cert = gen_hd1_instance(params)
                break
            except RuntimeError:
                # too big for max_n: shrink branching, then depth
                if params.branching > 2:
                    params = replace(params, branching=params.branching - 1)
                elif params.depth > 1:
                    params = replace(params, depth=params.depth - 1)
                else:
                    raise
        alpha = aspect_ratio(all_pairs(g)) if g.n > 1 else Fraction(1)
        out.append((params, g, cert))
        manifest.append({
            "seed": params.seed,
            "params": asdict(params),
            "n": g.n,
            "alpha": f"{alpha.numerator}/{alpha.denominator}",
            "certificate": certificate_digest(cert),
        })
    return out, manifest
