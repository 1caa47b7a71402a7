"""(1+eps)-approximation pipelines for TSP and Steiner tree on certified graphs.

Both follow the same route: a 2-approximation gives a cost c, a net at
radius r = eps' * c / (3n) shrinks the aspect ratio, the level-component
decomposition is projected onto the net, the quotient is solved exactly, and
the quotient solution is lifted back to g along shortest paths.

Error budget (beta = 2 is the bootstrap ratio, every net vertex lies within
3r of its representative):

* Steiner: mapping an optimal tree (at most n-1 edges) into the quotient adds
  at most 6r per edge, and attaching each terminal adds at most 3r, so the
  result is within OPT + 3 eps' c.  eps' = eps / (3 beta).
* TSP: an optimal closed walk can be taken with at most 2n-2 edge traversals,
  each adding at most 6r in the quotient, and the detours to non-net
  vertices add at most 6r each, so the result is within OPT + 6 eps' c.
  eps' = eps / (6 beta).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dpsolvers import (
    DEFAULT_MAX_BAG,
    SteinerSolution,
    TourSolution,
    prune_to_steiner_tree,
    steiner_2approx,
    steiner_exact_td,
    tsp_2approx,
    tsp_exact_td,
    walk_cost,
)
from .graph import DistMatrix, Graph, all_pairs, shortest_path
from .spcover import Hd1Certificate, verify_hd1
from .structure import (
    InternalInconsistency,
    build_hierarchy,
    compute_net,
    quotient_graph,
)
from .treedecomp import (
    build_decomposition,
    compress,
    project_decomposition,
    validate_decomposition,
)

BETA = 2


class NotCertified(ValueError):
    """The input graph did not pass the highway-dimension-1 check."""


@dataclass
class FptasReport:
    problem: str
    eps: Fraction
    eps_internal: Fraction
    beta: int
    bootstrap_cost: int
    net_radius: Fraction
    n: int
    n_solved: int  # after trimming (Steiner) or n (TSP)
    quotient_size: int
    quotient_edges: int
    width: int
    projected_width: int
    quotient_opt: int
    lift_cost: int  # quotient cost plus connection paths, before deduplication
    final_cost: int
    trimmed: bool = False
    notes: list[str] = field(default_factory=list)
    steps: dict[str, int] = field(default_factory=dict)

    def consistent(self) -> list[str]:
        """Internal consistency problems of the trace (empty when sane)."""
        out = []
        if self.final_cost > self.lift_cost:
            out.append("final cost exceeds the lifted cost")
        if self.quotient_opt > self.lift_cost:
            out.append("quotient optimum exceeds the lifted cost")
        # OPT lies in [c / beta, c] and final <= (1 + eps) OPT
        if Fraction(self.final_cost) > (1 + self.eps) * self.bootstrap_cost:
            out.append("final cost exceeds (1 + eps) * c")
        if Fraction(self.final_cost) * self.beta < self.bootstrap_cost:
            out.append("final cost is below the certified lower bound c / beta")
        if self.projected_width > self.width:
            out.append("projection widened the decomposition")
        return out

    def to_json(self) -> dict:
        fs = lambda x: f"{Fraction(x).numerator}/{Fraction(x).denominator}"
        return {
            "problem": self.problem,
            "eps": fs(self.eps),
            "eps_internal": fs(self.eps_internal),
            "beta": self.beta,
            "bootstrap_cost": str(self.bootstrap_cost),
            "net_radius": fs(self.net_radius),
            "n": self.n,
            "n_solved": self.n_solved,
            "quotient_size": self.quotient_size,
            "quotient_edges": self.quotient_edges,
            "width": self.width,
            "projected_width": self.projected_width,
            "quotient_opt": str(self.quotient_opt),
            "lift_cost": str(self.lift_cost),
            "final_cost": str(self.final_cost),
            "trimmed": self.trimmed,
            "notes": list(self.notes),
            "steps": dict(self.steps),
        }


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return eps


def _certify(g: Graph, d: DistMatrix | None):
    if d is None:
        if not g.is_connected():
            raise NotCertified("graph is disconnected")
        d = all_pairs(g)
    cert = verify_hd1(g, d)
    if not isinstance(cert, Hd1Certificate):
        raise NotCertified(f"graph is not highway dimension 1 (witness at r = {cert.scale})")
    return cert, d


def trim_steiner(g: Graph, terminals, c: int, d: DistMatrix | None = None) -> tuple[Graph, list[int]]:
    """Induced subgraph on vertices within distance c of some terminal.

    Returns the trimmed graph (terminals renumbered) and ``keep`` mapping new
    ids to old ones.
    """
    if d is None:
        d = all_pairs(g, allow_disconnected=True)
    R = sorted(set(terminals))
    keep = [v for v in range(g.n) if min(d.dist[t][v] for t in R) <= c]
    sub, keep = g.induced(keep)
    index = {v: i for i, v in enumerate(keep)}
    return sub.with_terminals(index[t] for t in R), keep


def _reduce(g: Graph, cert, d: DistMatrix, c: int, eps_int: Fraction, max_bag: int):
    r = eps_int * c / (3 * g.n)
    net = compute_net(g, r, d, certified=True)
    q = quotient_graph(g, net, d)
    h = build_hierarchy(g, cert, d)
    td = build_decomposition(h, cert)
    ptd = compress(project_decomposition(td, q))
    ok, problems = validate_decomposition(q.graph, ptd)
    if not ok:
        raise InternalInconsistency("projected decomposition invalid: " + "; ".join(problems))
    return r, net, q, td, ptd


def fptas_tsp(g: Graph, eps, max_bag: int = DEFAULT_MAX_BAG, d: DistMatrix | None = None):
    """Closed walk of cost at most (1 + eps) OPT, with its trace."""
    eps = _check_eps(eps)
    cert, d = _certify(g, d)
    eps_int = eps / (6 * BETA)
    if g.n == 1:
        rep = FptasReport("tsp", eps, eps_int, BETA, 0, Fraction(0), 1, 1, 1, 0, 0, 0, 0, 0, 0)
        return TourSolution((0,), 0), rep
    _, c = tsp_2approx(g, d)
    r, net, q, td, ptd = _reduce(g, cert, d, c, eps_int, max_bag)
    stats: dict = {}
    if q.graph.n == 1:
        qsol = TourSolution((0,), 0)
    else:
        qsol = tsp_exact_td(q.graph, ptd, max_bag, stats)
    pts = q.points
    walk = [pts[qsol.walk[0]]]
    for a, b in zip(qsol.walk, qsol.walk[1:]):
        walk.extend(shortest_path(g, d, pts[a], pts[b])[1:])
    lift = qsol.cost
    seen = set(walk)
    missing: dict[int, list[int]] = {}
    for v in range(g.n):
        if v not in seen:
            missing.setdefault(net.eta[v], []).append(v)
    out = []
    for x in walk:
        out.append(x)
        for v in missing.pop(x, ()):
            if v in seen:
                continue
            there = shortest_path(g, d, x, v)
            back = shortest_path(g, d, v, x)
            out.extend(there[1:] + back[1:])
            seen.update(there)
            lift += 2 * d.dist[x][v]
    if missing:  # pragma: no cover
        raise InternalInconsistency("some net point never appears on the quotient tour")
    final = walk_cost(g, out)
    sol = TourSolution(tuple(out), final)
    rep = FptasReport(
        "tsp", eps, eps_int, BETA, c, r, g.n, g.n, q.graph.n, q.graph.m,
        td.width, ptd.width, qsol.cost, lift, final, steps=stats,
    )
    return sol, rep


def fptas_steiner(g: Graph, terminals=None, eps=Fraction(1, 2), max_bag: int = DEFAULT_MAX_BAG,
                  d: DistMatrix | None = None):
    """Steiner tree of cost at most (1 + eps) OPT, with its trace."""
    eps = _check_eps(eps)
    R = sorted(set(g.terminals if terminals is None else terminals))
    if not R:
        raise ValueError("terminal set is empty")
    cert, d = _certify(g, d)
    eps_int = eps / (3 * BETA)
    if len(R) == 1:
        rep = FptasReport("steiner", eps, eps_int, BETA, 0, Fraction(0), g.n, g.n, 1, 0, 0, 0, 0, 0, 0)
        return SteinerSolution((), 0), rep
    _, c = steiner_2approx(g, R, d)
    notes = []
    work, keep = trim_steiner(g, R, c, d)
    trimmed = work.n < g.n
    work_cert, work_d = cert, d
    if trimmed:
        work_d = all_pairs(work)
        cand = verify_hd1(work, work_d)
        if isinstance(cand, Hd1Certificate):
            work_cert = cand
        else:
            notes.append("trimmed graph lost the certificate; solving on the full graph")
            work, keep, trimmed, work_d = g, list(range(g.n)), False, d
    index = {v: i for i, v in enumerate(keep)}
    WR = [index[t] for t in R]
    r, net, q, td, ptd = _reduce(work, work_cert, work_d, c, eps_int, max_bag)
    qR = sorted({q.eta[t] for t in WR})
    stats: dict = {}
    qsol = steiner_exact_td(q.graph, qR, ptd, max_bag, stats)
    pts = q.points
    used = set()
    lift = qsol.cost
    for a, b in qsol.edges:
        p = shortest_path(work, work_d, pts[a], pts[b])
        used.update((min(x, y), max(x, y)) for x, y in zip(p, p[1:]))
    for t in WR:
        rep_t = pts[q.eta[t]]
        if rep_t != t:
            p = shortest_path(work, work_d, t, rep_t)
            used.update((min(x, y), max(x, y)) for x, y in zip(p, p[1:]))
            lift += work_d.dist[t][rep_t]
    tree = prune_to_steiner_tree(work, used, WR)
    edges = tuple(sorted((min(keep[a], keep[b]), max(keep[a], keep[b])) for a, b in tree.edges))
    sol = SteinerSolution(edges, tree.cost)
    rep = FptasReport(
        "steiner", eps, eps_int, BETA, c, r, g.n, work.n, q.graph.n, q.graph.m,
        td.width, ptd.width, qsol.cost, lift, tree.cost, trimmed, notes, stats,
    )
    return sol, rep
