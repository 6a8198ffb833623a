"""Exhaustive oracle for decomposability into locally irregular subgraphs.

Decides whether the edge set of a small graph can be partitioned into k
(possibly empty) classes, each inducing a locally irregular subgraph. Empty
classes are allowed, which makes the property monotone in k. The search is
plain backtracking over edges with two prunings: interchangeable labels are
canonicalized (a new label may only be opened in increasing order, which in
particular pins the first edge to label 1), and an edge's constraint is
checked as soon as both endpoints have all incident edges labeled.

The search refuses instances whose worst-case tree k^m exceeds the node
budget unless forced, and raises instead of guessing when the budget runs
out mid-search: a returned boolean is always exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from lidecomp.errors import BudgetError, InputError
from lidecomp.graphs import Graph

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class SearchConfig:
    parts: int
    node_budget: int = DEFAULT_NODE_BUDGET
    force: bool = False  # run even when k^m exceeds the budget estimate

    def validate(self) -> None:
        if self.parts < 1:
            raise InputError(f"part count must be >= 1, got {self.parts}")
        if self.node_budget < 1:
            raise InputError("node budget must be positive")


def is_decomposable(
    g: Graph,
    k: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    force: bool = False,
) -> tuple[bool, tuple[int, ...] | None]:
    """Decide k-decomposability; on success also return a witness labeling.

    The witness assigns a label in 1..k to every edge in canonical order and
    every label class induces a locally irregular subgraph.
    """
    config = SearchConfig(parts=k, node_budget=node_budget, force=force)
    config.validate()
    if g.m == 0:
        return True, ()
    if not force and k**g.m > node_budget:
        raise BudgetError(
            f"worst-case tree {k}^{g.m} exceeds node budget {node_budget}; pass force to try"
        )

    # Process edges with large endpoint degree sums first: conflicts surface
    # earlier and vertices close sooner.
    order = sorted(range(g.m), key=lambda i: (-(g.degrees[g.edges[i][0]] + g.degrees[g.edges[i][1]]), i))
    counts = [[0] * (k + 1) for _ in range(g.n)]
    remaining = list(g.degrees)
    labels = [0] * g.m
    nodes = 0

    def closed_ok(v: int) -> bool:
        # v just closed: every incident edge whose other end is also closed
        # now has final degrees on both sides.
        for w in g.adjacency[v]:
            if remaining[w] == 0:
                c = labels[g.edge_id(v, w)]
                if counts[v][c] == counts[w][c]:
                    return False
        return True

    def assign(pos: int, max_used: int) -> bool:
        nonlocal nodes
        if pos == g.m:
            return True
        e = order[pos]
        u, v = g.edges[e]
        top = min(k, max_used + 1)
        for c in range(1, top + 1):
            nodes += 1
            if nodes > node_budget:
                raise BudgetError(f"exact search exceeded {node_budget} nodes")
            labels[e] = c
            counts[u][c] += 1
            counts[v][c] += 1
            remaining[u] -= 1
            remaining[v] -= 1
            ok = (remaining[u] > 0 or closed_ok(u)) and (remaining[v] > 0 or closed_ok(v))
            if ok and assign(pos + 1, max(max_used, c)):
                return True
            labels[e] = 0
            counts[u][c] -= 1
            counts[v][c] -= 1
            remaining[u] += 1
            remaining[v] += 1
        return False

    if assign(0, 0):
        return True, tuple(labels)
    return False, None


def min_parts(
    g: Graph,
    k_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    force: bool = False,
) -> int | None:
    """Smallest k <= k_max admitting a decomposition, or None when none does."""
    if k_max < 1:
        raise InputError(f"k_max must be >= 1, got {k_max}")
    for k in range(1, k_max + 1):
        decomposable, _ = is_decomposable(g, k, node_budget=node_budget, force=force)
        if decomposable:
            return k
    return None


def witness_parts(g: Graph, witness: tuple[int, ...], k: int) -> list[frozenset[int]]:
    """Split a witness labeling into k edge-index classes."""
    if len(witness) != g.m:
        raise InputError("witness does not label every edge")
    return [frozenset(i for i, c in enumerate(witness) if c == part) for part in range(1, k + 1)]
