"""Tree decompositions: the level-component construction, projection through a
net, validation, and conversion to nice form."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .graph import Graph
from .spcover import Hd1Certificate
from .structure import InternalInconsistency, LevelHierarchy, Quotient, interface_points


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    parent: tuple[int, ...]  # -1 marks the root

    @cached_property
    def root(self) -> int:
        roots = [i for i, p in enumerate(self.parent) if p == -1]
        if len(roots) != 1:
            raise ValueError(f"expected one root, found {len(roots)}")
        return roots[0]

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p != -1:
                ch[p].append(i)
        return tuple(tuple(c) for c in ch)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def __len__(self) -> int:
        return len(self.bags)

    def postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                out.append(x)
                continue
            stack.append((x, True))
            for c in reversed(self.children[x]):
                stack.append((c, False))
        return out

    def with_vertex(self, v: int) -> "TreeDecomposition":
        return TreeDecomposition(tuple(b | {v} for b in self.bags), self.parent)

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "root": self.root,
            "nodes": [
                {"id": i, "parent": p, "bag": sorted(b)}
                for i, (b, p) in enumerate(zip(self.bags, self.parent))
            ],
        }


def compress(td: TreeDecomposition) -> TreeDecomposition:
    """Merge every node into its parent when both carry the same bag."""
    parent = list(td.parent)
    alias = list(range(len(td.bags)))

    def find(x):
        while alias[x] != x:
            x = alias[x]
        return x

    for x in reversed(td.postorder()):  # parents before children
        p = parent[x]
        if p != -1 and td.bags[x] == td.bags[find(p)]:
            alias[x] = find(p)
    keep = [i for i in range(len(td.bags)) if alias[i] == i]
    index = {old: new for new, old in enumerate(keep)}
    bags, par = [], []
    for old in keep:
        bags.append(td.bags[old])
        p = td.parent[old]
        par.append(-1 if p == -1 else index[find(p)])
    return TreeDecomposition(tuple(bags), tuple(par))


def build_decomposition(h: LevelHierarchy, cert: Hd1Certificate) -> TreeDecomposition:
    """One node per level component; bag = interface points, plus the vertex itself at level 0."""
    node_of: dict[tuple[int, int], int] = {}
    bags: list[frozenset[int]] = []
    keys: list[tuple[int, int]] = []
    for i in range(h.top, -1, -1):
        for rep in sorted(h.components(i)):
            iface = interface_points(h, cert, i, rep)
            bag = set(iface.hubs)
            if i == 0:
                bag.add(rep)
            node_of[(i, rep)] = len(bags)
            bags.append(frozenset(bag))
            keys.append((i, rep))
    parent = []
    for i, rep in keys:
        parent.append(-1 if i == h.top else node_of[(i + 1, h.parent(i, rep))])
    td = compress(TreeDecomposition(tuple(bags), tuple(parent)))
    ok, problems = validate_decomposition(h.graph, td)
    if not ok:
        raise InternalInconsistency("; ".join(problems))
    return td


def project_decomposition(td: TreeDecomposition, quotient: Quotient) -> TreeDecomposition:
    eta = quotient.eta
    return TreeDecomposition(tuple(frozenset(eta[v] for v in b) for b in td.bags), td.parent)


def validate_decomposition(g: Graph, td: TreeDecomposition) -> tuple[bool, list[str]]:
    problems = []
    n_nodes = len(td.bags)
    roots = [i for i, p in enumerate(td.parent) if p == -1]
    if len(roots) != 1:
        problems.append(f"tree has {len(roots)} roots")
        return False, problems
    # every node must reach the root without revisiting
    for i in range(n_nodes):
        seen, x = set(), i
        while x != -1:
            if x in seen or not (-1 <= td.parent[x] < n_nodes):
                problems.append(f"node {i} does not reach the root")
                return False, problems
            seen.add(x)
            x = td.parent[x]
    covered = set().union(*td.bags) if td.bags else set()
    missing = set(range(g.n)) - covered
    if missing:
        problems.append(f"(a) vertices in no bag: {sorted(missing)}")
    stray = covered - set(range(g.n))
    if stray:
        problems.append(f"(a) bags mention unknown vertices: {sorted(stray)}")
    holders: dict[int, list[int]] = {}
    for i, b in enumerate(td.bags):
        for v in b:
            holders.setdefault(v, []).append(i)
    for u, v, _ in g.edges:
        hu = set(holders.get(u, ()))
        if not any(i in hu for i in holders.get(v, ())):
            problems.append(f"(b) edge ({u}, {v}) in no bag")
    for v, nodes in holders.items():
        tops = sum(1 for i in nodes if td.parent[i] == -1 or v not in td.bags[td.parent[i]])
        if tops != 1:
            problems.append(f"(c) bags holding {v} form {tops} subtrees")
    return not problems, problems


# --- nice form -------------------------------------------------------------

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Nodes are stored children-first: index order is a valid bottom-up order."""

    bags: tuple[frozenset[int], ...]
    children: tuple[tuple[int, ...], ...]
    kind: tuple[str, ...]
    vertex: tuple[int | None, ...]

    @property
    def root(self) -> int:
        return len(self.bags) - 1

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def __len__(self) -> int:
        return len(self.bags)

    def as_td(self) -> TreeDecomposition:
        parent = [-1] * len(self.bags)
        for i, ch in enumerate(self.children):
            for c in ch:
                parent[c] = i
        return TreeDecomposition(self.bags, tuple(parent))

    def check(self) -> list[str]:
        """Node-kind consistency problems (empty list when well formed)."""
        out = []
        for i, (bag, ch, k, v) in enumerate(zip(self.bags, self.children, self.kind, self.vertex)):
            cb = [self.bags[c] for c in ch]
            if k == LEAF:
                good = not ch and not bag
            elif k == INTRODUCE:
                good = len(ch) == 1 and v not in cb[0] and bag == cb[0] | {v}
            elif k == FORGET:
                good = len(ch) == 1 and v in cb[0] and bag == cb[0] - {v}
            elif k == JOIN:
                good = len(ch) == 2 and cb[0] == bag and cb[1] == bag
            else:
                good = False
            if not good:
                out.append(f"node {i} ({k}) is malformed")
        if self.bags and self.bags[self.root]:
            out.append("root bag is not empty")
        return out


class _NiceBuilder:
    def __init__(self):
        self.bags, self.children, self.kind, self.vertex = [], [], [], []

    def add(self, bag, children, kind, vertex=None) -> int:
        self.bags.append(frozenset(bag))
        self.children.append(tuple(children))
        self.kind.append(kind)
        self.vertex.append(vertex)
        return len(self.bags) - 1

    def morph(self, top: int, target: frozenset[int]) -> int:
        """Forget then introduce until the bag at ``top`` equals ``target``."""
        bag = self.bags[top]
        for v in sorted(bag - target):
            bag = bag - {v}
            top = self.add(bag, (top,), FORGET, v)
        for v in sorted(target - bag):
            bag = bag | {v}
            top = self.add(bag, (top,), INTRODUCE, v)
        return top

    def freeze(self) -> NiceTreeDecomposition:
        return NiceTreeDecomposition(
            tuple(self.bags), tuple(self.children), tuple(self.kind), tuple(self.vertex)
        )


def make_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    b = _NiceBuilder()
    top_of: dict[int, int] = {}
    for x in td.postorder():
        bag = td.bags[x]
        kids = td.children[x]
        if not kids:
            top = b.morph(b.add((), (), LEAF), bag)
        else:
            tops = [b.morph(top_of[c], bag) for c in kids]
            top = tops[0]
            for other in tops[1:]:
                top = b.add(bag, (top, other), JOIN)
        top_of[x] = top
    b.morph(top_of[td.root], frozenset())
    return b.freeze()


def heuristic_decomposition(g: Graph) -> TreeDecomposition:
    """Min-fill-in elimination decomposition for graphs without a certificate."""
    import networkx as nx
    from networkx.algorithms.approximation import treewidth_min_fill_in

    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((u, v) for u, v, _ in g.edges)
    _, T = treewidth_min_fill_in(G)
    bags = sorted(T.nodes, key=lambda b: (sorted(b), len(b)))
    index = {b: i for i, b in enumerate(bags)}
    parent = [-1] * len(bags)
    seen: set[int] = set()
    root = None
    for start in range(len(bags)):
        if start in seen:
            continue
        # later components hang below the first root
        if root is None:
            root = start
        else:
            parent[start] = root
        seen.add(start)
        queue = [start]
        while queue:
            x = queue.pop(0)
            for y in sorted(index[b] for b in T.neighbors(bags[x])):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)
    td = TreeDecomposition(tuple(frozenset(b) for b in bags), tuple(parent))
    ok, problems = validate_decomposition(g, td)
    if not ok:  # pragma: no cover
        raise InternalInconsistency("heuristic decomposition invalid: " + "; ".join(problems))
    return td
