"""Exact Steiner tree and TSP over tree decompositions, plus 2-approximations.

Both DPs run on a nice decomposition in which one fixed vertex (a terminal
for Steiner, vertex 0 for TSP) has been added to every bag; that vertex is
never forgotten before the root, so partial solutions can never close off
early.  Each graph edge is charged at the forget node of whichever endpoint
leaves the decomposition first, which makes every edge count exactly once
even across join nodes.

Steiner states: per bag vertex, 0 (unused) or a block label of the partial
forest.  TSP states: a block label per bag vertex plus a parity bitmask; the
solution is a connected multigraph using each edge at most twice with all
degrees even, which is exactly a closed walk visiting every vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graph import Graph, all_pairs, metric_preprocess, mst_edges, shortest_path
from .treedecomp import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    NiceTreeDecomposition,
    make_nice,
)

DEFAULT_MAX_BAG = 12


class Infeasible(ValueError):
    pass


class WidthBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SteinerSolution:
    edges: tuple[tuple[int, int], ...]
    cost: int

    def check(self, g: Graph, terminals) -> None:
        """Raise if this is not a tree spanning ``terminals`` whose cost matches."""
        terminals = set(terminals)
        verts = {v for e in self.edges for v in e}
        if not self.edges:
            if len(terminals) > 1 or self.cost != 0:
                raise AssertionError("empty solution only fits a single terminal")
            return
        if not terminals <= verts:
            raise AssertionError("solution misses a terminal")
        if len(set(self.edges)) != len(self.edges):
            raise AssertionError("duplicate edge")
        if len(self.edges) != len(verts) - 1:
            raise AssertionError("edge set is not a tree")
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v in self.edges:
            if not g.has_edge(u, v):
                raise AssertionError(f"({u}, {v}) is not an edge")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise AssertionError("edge set has a cycle")
            parent[ru] = rv
        if len({find(v) for v in verts}) > 1:
            raise AssertionError("edge set is disconnected")
        if sum(g.weight(u, v) for u, v in self.edges) != self.cost:
            raise AssertionError("cost field disagrees with edge weights")


@dataclass(frozen=True)
class TourSolution:
    walk: tuple[int, ...]  # closed: walk[0] == walk[-1] (a single vertex for n = 1)
    cost: int

    def check(self, g: Graph) -> None:
        w = self.walk
        if g.n == 1:
            if w != (0,) or self.cost != 0:
                raise AssertionError("single-vertex tour must be (0,) with cost 0")
            return
        if len(w) < 2 or w[0] != w[-1]:
            raise AssertionError("walk is not closed")
        if set(w) != set(range(g.n)):
            raise AssertionError("walk misses a vertex")
        total = 0
        for a, b in zip(w, w[1:]):
            if not g.has_edge(a, b):
                raise AssertionError(f"({a}, {b}) is not an edge")
            total += g.weight(a, b)
        if total != self.cost:
            raise AssertionError("cost field disagrees with the walk")


def walk_cost(g: Graph, walk) -> int:
    return sum(g.weight(a, b) for a, b in zip(walk, walk[1:]))


def _canon(labels) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    out = []
    for x in labels:
        if x == 0:
            out.append(0)
        else:
            if x not in seen:
                seen[x] = len(seen) + 1
            out.append(seen[x])
    return tuple(out)


def _prepare(td, anchor: int, max_bag: int) -> NiceTreeDecomposition:
    base = td.as_td() if isinstance(td, NiceTreeDecomposition) else td
    nice = make_nice(base.with_vertex(anchor))
    if nice.width + 1 > max_bag:
        raise WidthBudgetExceeded(f"bag of size {nice.width + 1} exceeds the budget of {max_bag}")
    return nice


def _charged_edges(g: Graph, nice: NiceTreeDecomposition, node: int) -> list[tuple[int, int]]:
    """(position in child bag, neighbour) for edges charged at this forget node."""
    u = nice.vertex[node]
    child_bag = sorted(nice.bags[nice.children[node][0]])
    return [(i, x) for i, x in enumerate(child_bag) if x != u and g.has_edge(u, x)]


def _merge(labels: list[int], a: int, b: int) -> bool:
    """Relabel block of position b into block of a; False if they already coincide."""
    la, lb = labels[a], labels[b]
    if la == lb:
        return False
    for i, x in enumerate(labels):
        if x == lb:
            labels[i] = la
    return True


# --- Steiner ---------------------------------------------------------------

def steiner_exact_td(g: Graph, terminals, td, max_bag: int = DEFAULT_MAX_BAG, stats: dict | None = None) -> SteinerSolution:
    """Minimum Steiner tree.  ``stats``, if given, receives node and state counts."""
    R = sorted(set(terminals))
    if not R:
        raise ValueError("terminal set is empty")
    if len(R) == 1:
        return SteinerSolution((), 0)
    term = set(R)
    nice = _prepare(td, R[0], max_bag)
    tables: list[dict] = []
    for node in range(len(nice)):
        kind = nice.kind[node]
        order = sorted(nice.bags[node])
        table: dict = {}
        if kind == LEAF:
            table[()] = (0, None)
        elif kind == INTRODUCE:
            v = nice.vertex[node]
            pos = order.index(v)
            for key, (cost, _) in tables[nice.children[node][0]].items():
                if v not in term:
                    nk = key[:pos] + (0,) + key[pos:]
                    _offer(table, nk, cost, ("i", key))
                fresh = max(key, default=0) + 1
                nk = _canon(key[:pos] + (fresh,) + key[pos:])
                _offer(table, nk, cost, ("i", key))
        elif kind == FORGET:
            child = nice.children[node][0]
            u = nice.vertex[node]
            cpos = sorted(nice.bags[child]).index(u)
            charged = _charged_edges(g, nice, node)
            for key, (cost, _) in tables[child].items():
                if key[cpos] == 0:
                    _offer(table, _canon(key[:cpos] + key[cpos + 1:]), cost, ("f", key, ()))
                    continue
                usable = [(p, x) for p, x in charged if key[p] != 0]
                for k in range(len(usable) + 1):
                    for subset in itertools.combinations(usable, k):
                        labels = list(key)
                        ok = True
                        add = 0
                        for p, x in subset:
                            if not _merge(labels, cpos, p):
                                ok = False
                                break
                            add += g.weight(u, x)
                        if not ok:
                            continue
                        mine = labels[cpos]
                        others = [i for i, x in enumerate(labels) if i != cpos and x != 0]
                        if not any(labels[i] == mine for i in others) and others:
                            continue
                        nk = _canon(labels[:cpos] + labels[cpos + 1:])
                        _offer(table, nk, cost + add, ("f", key, tuple((u, x) for _, x in subset)))
        elif kind == JOIN:
            left, right = nice.children[node]
            by_mask: dict = {}
            for key in tables[right]:
                by_mask.setdefault(tuple(x != 0 for x in key), []).append(key)
            for lk, (lc, _) in tables[left].items():
                mask = tuple(x != 0 for x in lk)
                size = sum(mask)
                lblocks = len({x for x in lk if x})
                for rk in by_mask.get(mask, ()):
                    rc = tables[right][rk][0]
                    labels = list(lk)
                    for i in range(len(labels)):
                        for j in range(i + 1, len(labels)):
                            if rk[i] and rk[i] == rk[j]:
                                _merge(labels, i, j)
                    blocks = len({x for x in labels if x})
                    rblocks = len({x for x in rk if x})
                    if blocks != lblocks + rblocks - size:
                        continue  # union of the two forests has a cycle
                    _offer(table, _canon(labels), lc + rc, ("j", lk, rk))
        tables.append(table)
    _record(stats, nice, tables)
    root = tables[nice.root].get(())
    if root is None:
        raise Infeasible("terminals are not connected")
    edges = sorted(tuple(sorted(e)) for e in _collect_edges(nice, tables, ()))
    return SteinerSolution(tuple(edges), root[0])


def _record(stats, nice, tables) -> None:
    if stats is not None:
        stats["nice_nodes"] = len(nice)
        stats["bag_size"] = nice.width + 1
        stats["dp_states"] = sum(len(t) for t in tables)


def _offer(table: dict, key, cost: int, back) -> None:
    cur = table.get(key)
    if cur is None or cost < cur[0]:
        table[key] = (cost, back)


def _collect_edges(nice: NiceTreeDecomposition, tables: list[dict], root_key) -> list:
    out = []
    stack = [(nice.root, root_key)]
    while stack:
        node, key = stack.pop()
        back = tables[node][key][1]
        if back is None:
            continue
        tag = back[0]
        if tag == "i":
            stack.append((nice.children[node][0], back[1]))
        elif tag == "f":
            out.extend(back[2])
            stack.append((nice.children[node][0], back[1]))
        else:
            left, right = nice.children[node]
            stack.append((left, back[1]))
            stack.append((right, back[2]))
    return out


# --- TSP -------------------------------------------------------------------

def tsp_exact_td(g: Graph, td, max_bag: int = DEFAULT_MAX_BAG, stats: dict | None = None) -> TourSolution:
    """Optimal closed walk visiting every vertex.  ``stats`` as for ``steiner_exact_td``."""
    if g.n == 0:
        raise ValueError("empty graph")
    if g.n == 1:
        return TourSolution((0,), 0)
    nice = _prepare(td, 0, max_bag)
    tables: list[dict] = []
    for node in range(len(nice)):
        kind = nice.kind[node]
        order = sorted(nice.bags[node])
        table: dict = {}
        if kind == LEAF:
            table[((), 0)] = (0, None)
        elif kind == INTRODUCE:
            v = nice.vertex[node]
            pos = order.index(v)
            for (labels, par), (cost, _) in tables[nice.children[node][0]].items():
                fresh = max(labels, default=0) + 1
                nl = _canon(labels[:pos] + (fresh,) + labels[pos:])
                low = par & ((1 << pos) - 1)
                npar = low | ((par >> pos) << (pos + 1))
                _offer(table, (nl, npar), cost, ("i", (labels, par)))
        elif kind == FORGET:
            child = nice.children[node][0]
            u = nice.vertex[node]
            cpos = sorted(nice.bags[child]).index(u)
            charged = _charged_edges(g, nice, node)
            for ckey, (cost, _) in tables[child].items():
                labels0, par0 = ckey
                for mult in itertools.product((0, 1, 2), repeat=len(charged)):
                    labels = list(labels0)
                    par = par0
                    add = 0
                    used = []
                    for (p, x), k in zip(charged, mult):
                        if not k:
                            continue
                        _merge(labels, cpos, p)
                        if k == 1:
                            par ^= (1 << p) | (1 << cpos)
                        add += k * g.weight(u, x)
                        used.append((u, x, k))
                    if par >> cpos & 1:
                        continue
                    mine = labels[cpos]
                    if len(labels) > 1 and not any(
                        labels[i] == mine for i in range(len(labels)) if i != cpos
                    ):
                        continue
                    nl = _canon(labels[:cpos] + labels[cpos + 1:])
                    npar = (par & ((1 << cpos) - 1)) | ((par >> (cpos + 1)) << cpos)
                    _offer(table, (nl, npar), cost + add, ("f", ckey, tuple(used)))
        elif kind == JOIN:
            left, right = nice.children[node]
            for lk, (lc, _) in tables[left].items():
                for rk, (rc, _) in tables[right].items():
                    labels = list(lk[0])
                    rl = rk[0]
                    for i in range(len(labels)):
                        for j in range(i + 1, len(labels)):
                            if rl[i] == rl[j]:
                                _merge(labels, i, j)
                    _offer(table, (_canon(labels), lk[1] ^ rk[1]), lc + rc, ("j", lk, rk))
        tables.append(table)
    _record(stats, nice, tables)
    root = tables[nice.root].get(((), 0))
    if root is None:
        raise Infeasible("graph is disconnected")
    multi: dict[tuple[int, int], int] = {}
    for u, x, k in _collect_edges(nice, tables, ((), 0)):
        a, b = min(u, x), max(u, x)
        multi[(a, b)] = multi.get((a, b), 0) + k
    walk = euler_circuit(g.n, multi, start=0)
    sol = TourSolution(tuple(walk), root[0])
    if walk_cost(g, walk) != root[0]:  # pragma: no cover
        raise RuntimeError("tour reconstruction disagrees with DP value")
    return sol


def euler_circuit(n: int, multi: dict[tuple[int, int], int], start: int = 0) -> list[int]:
    """Hierholzer on an edge-multiplicity map; smallest neighbour first."""
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    for (a, b), k in multi.items():
        if k:
            adj[a][b] = adj[a].get(b, 0) + k
            adj[b][a] = adj[b].get(a, 0) + k
    if any(sum(row.values()) % 2 for row in adj):
        raise ValueError("multigraph has an odd-degree vertex")
    stack, out = [start], []
    while stack:
        x = stack[-1]
        if adj[x]:
            y = min(adj[x])
            for a, b in ((x, y), (y, x)):
                adj[a][b] -= 1
                if not adj[a][b]:
                    del adj[a][b]
            stack.append(y)
        else:
            out.append(stack.pop())
    out.reverse()
    return out


# --- 2-approximations --------------------------------------------------------

def _spanning_tree_of(g: Graph, edge_set) -> list[tuple[int, int, int]]:
    return mst_edges(g.n, [(u, v, g.weight(u, v)) for u, v in edge_set])


def prune_to_steiner_tree(g: Graph, edge_set, terminals) -> SteinerSolution:
    """Spanning forest of ``edge_set`` with non-terminal leaves stripped."""
    tree = _spanning_tree_of(g, edge_set)
    term = set(terminals)
    adj: dict[int, set[int]] = {}
    for u, v, _ in tree:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    leaves = [v for v, nb in adj.items() if len(nb) == 1 and v not in term]
    while leaves:
        v = leaves.pop()
        if v not in adj or len(adj[v]) != 1 or v in term:
            continue
        (x,) = adj.pop(v)
        adj[x].discard(v)
        if len(adj[x]) == 1 and x not in term:
            leaves.append(x)
        elif not adj[x]:
            adj.pop(x)
    edges = sorted({(min(u, v), max(u, v)) for u in adj for v in adj[u]})
    return SteinerSolution(tuple(edges), sum(g.weight(u, v) for u, v in edges))


def steiner_2approx(g: Graph, terminals, d=None) -> tuple[SteinerSolution, int]:
    """MST of the terminal distance closure, expanded to shortest paths."""
    R = sorted(set(terminals))
    if not R:
        raise ValueError("terminal set is empty")
    if d is None:
        d = all_pairs(g, allow_disconnected=True)
    if any(d.dist[R[0]][t] == float("inf") for t in R):
        raise Infeasible("terminals are not connected")
    if len(R) == 1:
        return SteinerSolution((), 0), 0
    closure = [(a, b, d.dist[a][b]) for i, a in enumerate(R) for b in R[i + 1:]]
    used = set()
    for a, b, _ in mst_edges(g.n, closure):
        path = shortest_path(g, d, a, b)
        used.update((min(x, y), max(x, y)) for x, y in zip(path, path[1:]))
    sol = prune_to_steiner_tree(g, used, R)
    return sol, sol.cost


def tsp_2approx(g: Graph, d=None) -> tuple[TourSolution, int]:
    """Preorder of a minimum spanning tree, shortcut in the metric closure, expanded to paths."""
    if g.n == 1:
        return TourSolution((0,), 0), 0
    if d is None:
        d = all_pairs(g)
    gm = metric_preprocess(g, d)
    tree = mst_edges(g.n, gm.edges)
    adj: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for u, v, _ in tree:
        adj[u].append(v)
        adj[v].append(u)
    order, seen, stack = [], set(), [0]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        order.append(x)
        stack.extend(sorted(adj[x], reverse=True))
    order.append(0)
    walk = [0]
    for a, b in zip(order, order[1:]):
        walk.extend(shortest_path(g, d, a, b)[1:])
    sol = TourSolution(tuple(walk), walk_cost(g, walk))
    return sol, sol.cost
