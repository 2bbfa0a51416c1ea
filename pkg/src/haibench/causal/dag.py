"""Directed acyclic graphs and the graphical criteria used by the
effect estimators: d-separation, back-door admissibility, and the
observation-removal (rule 1) applicability test.

d-separation here uses the moralized-ancestral-graph construction; the
test suite checks it against an independent path-enumeration oracle.
"""

from __future__ import annotations

from typing import FrozenSet, Iterable, Optional, Sequence, Union

__all__ = [
    "CycleError",
    "Dag",
    "validate_dag",
    "d_separated",
    "backdoor_admissible",
    "rule1_applicable",
]

NodeSet = Union[str, Iterable[str]]


class CycleError(ValueError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("directed cycle: " + " -> ".join([*self.cycle, self.cycle[0]]))


def _as_set(nodes: Optional[NodeSet]) -> frozenset[str]:
    if nodes is None:
        return frozenset()
    if isinstance(nodes, str):
        return frozenset([nodes])
    return frozenset(nodes)


def validate_dag(
    nodes: Sequence[str], edges: Iterable[tuple[str, str]]
) -> list[str]:
    """Return a topological order, or raise CycleError listing one cycle.

    Also rejects duplicate node names and edges with unknown endpoints.
    """
    node_list = list(nodes)
    if len(set(node_list)) != len(node_list):
        raise ValueError("node names must be unique")
    node_set = set(node_list)
    parents: dict[str, set[str]] = {n: set() for n in node_list}
    children: dict[str, set[str]] = {n: set() for n in node_list}
    for u, v in edges:
        if u not in node_set or v not in node_set:
            raise ValueError(f"edge ({u!r}, {v!r}) references unknown node")
        if u == v:
            raise CycleError([u])
        parents[v].add(u)
        children[u].add(v)

    indegree = {n: len(parents[n]) for n in node_list}
    ready = [n for n in node_list if indegree[n] == 0]
    order: list[str] = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for ch in sorted(children[n]):
            indegree[ch] -= 1
            if indegree[ch] == 0:
                ready.append(ch)
    if len(order) < len(node_list):
        # Walk parent pointers within the residual nodes until one repeats.
        residual = {n for n in node_list if n not in set(order)}
        start = next(iter(sorted(residual)))
        path = [start]
        seen = {start}
        cur = start
        while True:
            cur = next(iter(sorted(p for p in parents[cur] if p in residual)))
            if cur in seen:
                cycle = list(reversed(path[path.index(cur):]))
                pivot = cycle.index(min(cycle))
                raise CycleError(cycle[pivot:] + cycle[:pivot])
            path.append(cur)
            seen.add(cur)
    return order


class Dag:
    """Immutable directed acyclic graph over named nodes."""

    def __init__(self, nodes: Sequence[str], edges: Iterable[tuple[str, str]]):
        self._order = validate_dag(nodes, edges)
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.edges: tuple[tuple[str, str], ...] = tuple((u, v) for u, v in edges)
        self._parents: dict[str, frozenset[str]] = {n: frozenset() for n in nodes}
        self._children: dict[str, frozenset[str]] = {n: frozenset() for n in nodes}
        parents: dict[str, set[str]] = {n: set() for n in nodes}
        children: dict[str, set[str]] = {n: set() for n in nodes}
        for u, v in self.edges:
            parents[v].add(u)
            children[u].add(v)
        self._parents = {n: frozenset(parents[n]) for n in nodes}
        self._children = {n: frozenset(children[n]) for n in nodes}

    @property
    def topological_order(self) -> list[str]:
        return list(self._order)

    def parents(self, node: str) -> frozenset[str]:
        return self._parents[node]

    def children(self, node: str) -> frozenset[str]:
        return self._children[node]

    def ancestors(self, nodes: NodeSet) -> frozenset[str]:
        """All strict ancestors of the given nodes."""
        frontier = list(_as_set(nodes))
        seen: set[str] = set()
        while frontier:
            n = frontier.pop()
            for p in self._parents[n]:
                if p not in seen:
                    seen.add(p)
                    frontier.append(p)
        return frozenset(seen)

    def descendants(self, nodes: NodeSet) -> frozenset[str]:
        """All strict descendants of the given nodes."""
        frontier = list(_as_set(nodes))
        seen: set[str] = set()
        while frontier:
            n = frontier.pop()
            for c in self._children[n]:
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        return frozenset(seen)

    def remove_edges(
        self,
        into: NodeSet = (),
        out_of: NodeSet = (),
    ) -> "Dag":
        """Graph surgery: drop edges into and/or out of the given nodes."""
        into_set = _as_set(into)
        out_set = _as_set(out_of)
        kept = [
            (u, v)
            for u, v in self.edges
            if v not in into_set and u not in out_set
        ]
        return Dag(self.nodes, kept)

    def _check_nodes(self, nodes: FrozenSet[str]) -> None:
        unknown = nodes - set(self.nodes)
        if unknown:
            raise ValueError(f"unknown nodes: {sorted(unknown)}")


def d_separated(dag: Dag, a: NodeSet, b: NodeSet, z: NodeSet = ()) -> bool:
    """True iff every path between a and b is blocked given z.

    Computed on the moralized ancestral graph of a, b and z: within the
    ancestral node set, parents sharing a child are married, directions
    dropped, z removed; separation then reduces to graph disconnection.
    """
    a_set, b_set, z_set = _as_set(a), _as_set(b), _as_set(z)
    dag._check_nodes(a_set | b_set | z_set)
    if a_set & b_set or a_set & z_set or b_set & z_set:
        raise ValueError("a, b and z must be disjoint")
    if not a_set or not b_set:
        return True

    relevant = a_set | b_set | z_set
    anc = set(relevant) | set(dag.ancestors(relevant))
    adj: dict[str, set[str]] = {n: set() for n in anc}
    for u, v in dag.edges:
        if u in anc and v in anc:
            adj[u].add(v)
            adj[v].add(u)
    for v in anc:
        ps = [p for p in dag.parents(v) if p in anc]
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                adj[ps[i]].add(ps[j])
                adj[ps[j]].add(ps[i])

    frontier = [n for n in a_set]
    seen = set(a_set)
    while frontier:
        n = frontier.pop()
        for m in adj[n]:
            if m in z_set or m in seen:
                continue
            if m in b_set:
                return False
            seen.add(m)
            frontier.append(m)
    return True


def backdoor_admissible(dag: Dag, x: str, y: str, z: NodeSet = ()) -> bool:
    """True iff z blocks every back-door path from x to y.

    Requires that no member of z descends from x and that z d-separates x
    from y once x's outgoing edges are removed.
    """
    if x == y:
        raise ValueError("x and y must differ")
    z_set = _as_set(z)
    dag._check_nodes(z_set | {x, y})
    if x in z_set or y in z_set:
        raise ValueError("x and y cannot be members of the adjustment set")
    if z_set & dag.descendants(x):
        return False
    stripped = dag.remove_edges(out_of=x)
    return d_separated(stripped, x, y, z_set)


def rule1_applicable(
    dag: Dag, x: NodeSet, y: NodeSet, z: NodeSet, w: NodeSet = ()
) -> bool:
    """Whether observing z is redundant given do(x) and w.

    True iff y is d-separated from z by x union w in the graph with all
    edges into x removed.
    """
    x_set, y_set, z_set, w_set = _as_set(x), _as_set(y), _as_set(z), _as_set(w)
    dag._check_nodes(x_set | y_set | z_set | w_set)
    sets = [x_set, y_set, z_set, w_set]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise ValueError("x, y, z and w must be disjoint")
    mutilated = dag.remove_edges(into=x_set)
    return d_separated(mutilated, y_set, z_set, x_set | w_set)
