"""Hardness gadgets: SAT to Steiner tree on highway dimension 1, and
(<=3,3)-SAT to TSP on highway dimension at most 6.

Both generators come with their decision thresholds and a decoder that turns
an optimal solution back into a satisfying assignment.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph import Graph


class DimacsError(ValueError):
    pass


class DecodeError(RuntimeError):
    """An optimal solution under the threshold did not decode to a model; indicates a gadget bug."""


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} references an undeclared variable")

    def evaluate(self, assignment) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: bad header {line!r}") from None
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise DimacsError(f"line {lineno}: variable {abs(lit)} exceeds declared {header[0]}")
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


# --- Steiner tree ------------------------------------------------------------

@dataclass(frozen=True)
class StpReduction:
    formula: CnfFormula
    graph: Graph
    threshold: int
    roles: dict[str, int] = field(hash=False)

    def sidecar(self) -> dict:
        return {"kind": "stp", "threshold": str(self.threshold), "roles": dict(self.roles)}


def stp_threshold(formula: CnfFormula) -> int:
    return 12 * formula.num_vars + sum(11 ** (i + 1) for i in range(1, len(formula.clauses) + 1))


def gen_stp(formula: CnfFormula) -> StpReduction:
    """Variable paths t-u-f of unit edges, a root at distance 11 from every t and f,
    and one terminal per clause i joined to its literals by edges of length 11**(i+1)."""
    k = formula.num_vars
    roles: dict[str, int] = {}
    edges = []
    for x in range(1, k + 1):
        t, u, f = 3 * (x - 1), 3 * (x - 1) + 1, 3 * (x - 1) + 2
        roles[f"t{x}"], roles[f"u{x}"], roles[f"f{x}"] = t, u, f
        edges += [(t, u, 1), (u, f, 1)]
    root = 3 * k
    roles["v0"] = root
    for x in range(1, k + 1):
        edges += [(root, roles[f"t{x}"], 11), (root, roles[f"f{x}"], 11)]
    for i, clause in enumerate(formula.clauses, 1):
        vi = root + i
        roles[f"v{i}"] = vi
        ends = sorted({roles[f"t{l}"] if l > 0 else roles[f"f{-l}"] for l in clause})
        edges += [(vi, s, 11 ** (i + 1)) for s in ends]
    n = root + len(formula.clauses) + 1
    terminals = frozenset([roles[f"u{x}"] for x in range(1, k + 1)] + list(range(root, n)))
    labels = [""] * n
    for name, v in roles.items():
        labels[v] = name
    g = Graph(n, tuple(edges), terminals, tuple(labels))
    return StpReduction(formula, g, stp_threshold(formula), roles)


@dataclass(frozen=True)
class Decision:
    satisfiable: bool
    assignment: tuple[bool, ...] | None = None
    undetermined: tuple[int, ...] = ()


def _complete(formula: CnfFormula, partial: dict[int, bool | None]) -> tuple[tuple[bool, ...], tuple[int, ...]] | None:
    """Fill undetermined variables by trying both values; first model wins."""
    free = [x for x in range(1, formula.num_vars + 1) if partial.get(x) is None]
    for bits in itertools.product((True, False), repeat=len(free)):
        full = dict(partial)
        full.update(zip(free, bits))
        model = tuple(full[x] for x in range(1, formula.num_vars + 1))
        if formula.evaluate(model):
            return model, tuple(free)
    return None


def decide_stp(red: StpReduction, solution) -> Decision:
    """SAT iff the optimal tree costs at most the threshold; the root edges encode the model.

    ``solution`` is any object with ``cost`` and ``edges``.
    """
    if solution.cost > red.threshold:
        return Decision(False)
    root = red.roles["v0"]
    chosen = {tuple(sorted(e[:2])) for e in solution.edges}
    partial: dict[int, bool | None] = {}
    for x in range(1, red.formula.num_vars + 1):
        t = (root, red.roles[f"t{x}"]) in chosen or (red.roles[f"t{x}"], root) in chosen
        f = (root, red.roles[f"f{x}"]) in chosen or (red.roles[f"f{x}"], root) in chosen
        partial[x] = True if t and not f else False if f and not t else None
    done = _complete(red.formula, partial)
    if done is None:
        raise DecodeError("tree within the threshold does not decode to a model")
    return Decision(True, done[0], done[1])


# --- TSP ---------------------------------------------------------------------

def validate_33sat(formula: CnfFormula) -> bool:
    """Each literal occurs at most twice and each variable at most three times."""
    lit_count: dict[int, int] = {}
    var_count: dict[int, int] = {}
    for c in formula.clauses:
        if len(c) > 3:
            return False
        for l in c:
            lit_count[l] = lit_count.get(l, 0) + 1
            var_count[abs(l)] = var_count.get(abs(l), 0) + 1
    return all(v <= 2 for v in lit_count.values()) and all(v <= 3 for v in var_count.values())


@dataclass(frozen=True)
class TspReduction:
    formula: CnfFormula
    graph: Graph
    threshold: int
    ladder: dict[str, int] = field(hash=False)
    roles: dict[str, int] = field(hash=False)
    stages: tuple[tuple[str, tuple[tuple[int, int, int], ...]], ...] = field(hash=False)
    # clause j -> per literal position: (variable, f-edge to w, f-edge to w')
    links: tuple[tuple[tuple[int, int, int], ...], ...] = field(hash=False)

    def sidecar(self) -> dict:
        return {
            "kind": "tsp",
            "threshold": str(self.threshold),
            "ladder": {k: str(v) for k, v in self.ladder.items()},
            "roles": dict(self.roles),
        }


def _v(i: int, r: int) -> int:
    """Vertex v_{i r} for variable i >= 1 and corner r in 1..4 (r = 0 wraps to 4)."""
    r = (r - 1) % 4 + 1
    return 4 * (i - 1) + r - 1


def gen_tsp(formula: CnfFormula) -> TspReduction:
    """Variable squares with a-diagonals, a c-chain between squares, one
    alternating e/d cycle per clause and two f-edges per literal.

    Each cost class is twice the total cost of everything added before it.
    Clauses with fewer than three literals get a correspondingly shorter
    cycle; a one-literal clause is a single e-edge.
    """
    if not validate_33sat(formula):
        raise ValueError("formula is not (<=3,3)")
    for c in formula.clauses:
        if len({abs(l) for l in c}) != len(c):
            raise ValueError(f"clause {c} repeats a variable")
    n, m = formula.num_vars, len(formula.clauses)
    roles: dict[str, int] = {}
    for i in range(1, n + 1):
        for r in range(1, 5):
            roles[f"v{i}_{r}"] = _v(i, r)
    nxt = 4 * n
    wv: list[list[tuple[int, int]]] = []
    for j, c in enumerate(formula.clauses, 1):
        row = []
        for k in range(1, len(c) + 1):
            roles[f"w{j}_{k}"], roles[f"w'{j}_{k}"] = nxt, nxt + 1
            row.append((nxt, nxt + 1))
            nxt += 2
        wv.append(row)

    edges: list[tuple[int, int, int]] = []
    ladder: dict[str, int] = {}
    stages = []
    total = 0

    def stage(name: str, pairs) -> None:
        nonlocal total
        cost = 1 if not edges else 2 * total
        ladder[name] = cost
        new = tuple((a, b, cost) for a, b in pairs)
        edges.extend(new)
        stages.append((name, new))
        total += cost * len(new)

    stage("a", [p for i in range(1, n + 1) for p in ((_v(i, 1), _v(i, 3)), (_v(i, 2), _v(i, 4)))])
    stage("b", [(_v(i, r), _v(i, r + 1)) for i in range(1, n + 1) for r in range(1, 5)])
    for i in range(1, n):
        stage(f"c{i}", [(_v(i, 1), _v(i + 1, 1))])
    stage("d", [(row[t][1], row[(t + 1) % len(row)][0]) for row in wv if len(row) > 1 for t in range(len(row))])
    stage("e", [pair for row in wv for pair in row])
    seen: set[int] = set()
    links = []
    for j, c in enumerate(formula.clauses, 1):
        pairs, link = [], []
        for (w, w2), lit in zip(wv[j - 1], c):
            i = abs(lit)
            delta = 2 if lit in seen else 0
            if lit > 0:
                ew, ew2 = (w, _v(i, 2 + delta)), (w2, _v(i, 1 + delta))
            else:
                ew, ew2 = (w, _v(i, 3 - delta)), (w2, _v(i, 2 + delta))
            pairs += [ew, ew2]
            link.append((i, ew[1], ew2[1]))
        seen.update(c)
        stage(f"f{j}", pairs)
        links.append(tuple(link))

    W = 2 * n * ladder["a"] + (2 * n - m) * ladder["b"]
    W += 2 * sum(ladder[f"c{i}"] for i in range(1, n))
    for j, c in enumerate(formula.clauses, 1):
        k = len(c)
        if k == 1:
            # the lone e-edge is kept once; the tour enters and leaves through both f-edges
            W += 2 * ladder[f"f{j}"] + ladder["e"]
        else:
            W += 2 * ladder[f"f{j}"] + (k - 1) * ladder["e"] + k * ladder["d"]
    labels = [""] * nxt
    for name, v in roles.items():
        labels[v] = name
    g = Graph(nxt, tuple(edges), labels=tuple(labels))
    return TspReduction(formula, g, W, ladder, roles, tuple(stages), tuple(links))


def ladder_is_safe(red: TspReduction) -> bool:
    """Every cost is at least twice the total of all edges added before it."""
    total = 0
    for _, new in red.stages:
        if new and total and any(w < 2 * total for *_, w in new):
            return False
        total += sum(w for *_, w in new)
    return True


def edge_addition_hd_bound(g: Graph, new_edges, hd_g: int) -> dict:
    """Bound on the highway dimension after adding ``new_edges`` with safe costs.

    Raises ValueError if some new cost is below twice the total of g's costs.
    """
    total = sum(w for *_, w in g.edges)
    new_edges = list(new_edges)
    unsafe = [e for e in new_edges if e[2] < 2 * total]
    if unsafe:
        raise ValueError(f"costs not safe w.r.t. the existing {total}: {unsafe}")
    return {
        "bound": max(hd_g, len(new_edges)),
        "existing_total": total,
        "min_new_cost": min((e[2] for e in new_edges), default=None),
        "added": len(new_edges),
    }


def tsp_hd_trace(red: TspReduction) -> list[tuple[str, int]]:
    """Stage-by-stage highway-dimension bounds for the TSP gadget.

    The squares alone have hd 2.  d-edges are disjoint single edges and keep
    the bound.  e-edges and f-edges go through the edge-addition bound one
    clause (resp. one cost class) at a time.
    """
    trace = []
    bound = 2
    built: list[tuple[int, int, int]] = []
    n = red.graph.n
    per_clause_e: dict[int, int] = {}
    for name, new in red.stages:
        if name in ("a", "b"):
            built += new
            trace.append((name, bound))
            continue
        base = Graph(n, tuple(built))
        if name == "d":
            bound = max(bound, 1 if new else 0)
        elif name == "e":
            w_of = {v: j for j, row in enumerate(_clause_vertices(red)) for v in row}
            for a, b, w in new:
                per_clause_e[w_of[a]] = per_clause_e.get(w_of[a], 0) + 1
            edge_addition_hd_bound(base, new, bound)  # safety check only
            bound = max([bound] + list(per_clause_e.values()))
        else:
            bound = edge_addition_hd_bound(base, new, bound)["bound"]
        built += new
        trace.append((name, bound))
    return trace


def _clause_vertices(red: TspReduction) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in red.formula.clauses]
    for name, v in red.roles.items():
        if name.startswith("w"):
            j = int(name.lstrip("w'").split("_")[0])
            out[j - 1].append(v)
    return out


def constructive_tour(red: TspReduction, assignment) -> dict[tuple[int, int], int]:
    """Eulerian multigraph of cost exactly W built from a satisfying assignment."""
    f = red.formula
    if not f.evaluate(assignment):
        raise ValueError("assignment does not satisfy the formula")
    multi: dict[tuple[int, int], int] = {}

    def add(a, b, k=1):
        key = (min(a, b), max(a, b))
        multi[key] = multi.get(key, 0) + k
        if not multi[key]:
            del multi[key]

    R = red.roles
    for j, c in enumerate(f.clauses, 1):
        k = len(c)
        for t in range(1, k + 1):
            add(R[f"w{j}_{t}"], R[f"w'{j}_{t}"], 2 if k == 1 else 1)
            if k > 1:
                add(R[f"w'{j}_{t}"], R[f"w{j}_{t % k + 1}"])
    for i in range(1, f.num_vars):
        add(_v(i, 1), _v(i + 1, 1), 2)
    for i in range(1, f.num_vars + 1):
        cyc = (1, 3, 4, 2) if assignment[i - 1] else (1, 3, 2, 4)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            add(_v(i, a), _v(i, b))
    for j, c in enumerate(f.clauses, 1):
        for t, lit in enumerate(c, 1):
            if assignment[abs(lit) - 1] == (lit > 0):
                break
        _, vw, vw2 = red.links[j - 1][t - 1]
        add(R[f"w{j}_{t}"], vw)
        add(R[f"w'{j}_{t}"], vw2)
        add(R[f"w{j}_{t}"], R[f"w'{j}_{t}"], -1)
        add(vw, vw2, -1)
    return multi


def decide_tsp(red: TspReduction, solution) -> Decision:
    """SAT iff the optimal tour costs at most W; a-edge orientations encode the model.

    Variables whose a-edges are not each traversed exactly once are reported
    as undetermined and completed by trying both values.  ``solution`` is
    any object with ``walk`` and ``cost``.
    """
    if solution.cost > red.threshold:
        return Decision(False)
    walk = solution.walk
    steps: dict[tuple[int, int], int] = {}
    for a, b in zip(walk, walk[1:]):
        steps[(a, b)] = steps.get((a, b), 0) + 1
    partial: dict[int, bool | None] = {}
    for i in range(1, red.formula.num_vars + 1):
        v1, v2, v3, v4 = (_v(i, r) for r in range(1, 5))
        d13 = (steps.get((v1, v3), 0), steps.get((v3, v1), 0))
        d24 = (steps.get((v2, v4), 0), steps.get((v4, v2), 0))
        if sorted(d13) != [0, 1] or sorted(d24) != [0, 1]:
            partial[i] = None
            continue
        forward13 = d13[0] == 1
        forward42 = d24[1] == 1
        partial[i] = forward13 == forward42
    done = _complete(red.formula, partial)
    if done is None:
        raise DecodeError("tour within W does not decode to a model")
    return Decision(True, done[0], done[1])


def all_small_33sat(max_vars: int = 3, max_clauses: int = 2):
    """Every (<=3,3) formula with clauses over distinct variables, all variables used."""
    out = []
    for n in range(1, max_vars + 1):
        lits = [l for x in range(1, n + 1) for l in (x, -x)]
        clauses = [
            c for size in (1, 2, 3) for c in itertools.combinations(lits, size)
            if len({abs(l) for l in c}) == size
        ]
        for m in range(1, max_clauses + 1):
            for combo in itertools.product(clauses, repeat=m):
                if len(set(combo)) != m:
                    continue
                if {abs(l) for c in combo for l in c} != set(range(1, n + 1)):
                    continue
                f = CnfFormula(n, combo)
                if validate_33sat(f):
                    out.append(f)
    return out
