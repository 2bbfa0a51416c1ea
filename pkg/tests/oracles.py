"""Independent oracles for the test suite.

Each oracle recomputes a quantity by a different route than the library:
the normal quantile via quadrature + bisection, least squares via
hand-rolled Gaussian elimination on the normal equations, d-separation via
exhaustive path enumeration, and interventional distributions via graph
mutilation and brute-force joint enumeration. None of them import the
corresponding library implementations.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict

import numpy as np

# ---------------------------------------------------------------------------
# Normal CDF by Gauss-Legendre quadrature, inverse by bisection
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(80)


def normal_cdf_quadrature(x: np.ndarray) -> np.ndarray:
    """Phi(x) = 1/2 + integral of the normal pdf from 0 to x."""
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    # Map Legendre nodes from [-1, 1] onto [0, x] per element.
    t = half[..., None] * (_GL_NODES + 1.0)
    integrand = np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    return 0.5 + half * (integrand @ _GL_WEIGHTS)


def probit_bisection(p: np.ndarray, iterations: int = 64) -> np.ndarray:
    """Invert the quadrature CDF by bisection on [-9, 9]."""
    p = np.asarray(p, dtype=float)
    lo = np.full_like(p, -9.0)
    hi = np.full_like(p, 9.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = normal_cdf_quadrature(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Least squares by Gaussian elimination on the normal equations
# ---------------------------------------------------------------------------


def solve_least_squares_elimination(rows: list[list[float]], ys: list[float]) -> list[float]:
    """Solve argmin ||Xw - y|| via X'Xw = X'y with partial-pivot elimination.

    Plain-Python arithmetic throughout; raises on a singular system.
    """
    n = len(rows)
    d = len(rows[0])
    a = [[0.0] * (d + 1) for _ in range(d)]
    for i in range(d):
        for j in range(d):
            a[i][j] = sum(rows[k][i] * rows[k][j] for k in range(n))
        a[i][d] = sum(rows[k][i] * ys[k] for k in range(n))
    for col in range(d):
        pivot = max(range(col, d), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) < 1e-12:
            raise ValueError("singular normal equations")
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(d):
            if r == col:
                continue
            factor = a[r][col] / a[col][col]
            for c in range(col, d + 1):
                a[r][c] -= factor * a[col][c]
    return [a[i][d] / a[i][i] for i in range(d)]


# ---------------------------------------------------------------------------
# d-separation by exhaustive path enumeration
# ---------------------------------------------------------------------------


def d_separated_by_paths(nodes, edges, a_set, b_set, z_set) -> bool:
    """Enumerate every simple undirected path from a to b; separated iff
    every path has a blocking triple (conditioned non-collider, or an
    unconditioned collider with no conditioned descendant)."""
    children = defaultdict(set)
    neighbors = defaultdict(set)
    for u, v in edges:
        children[u].add(v)
        neighbors[u].add(v)
        neighbors[v].add(u)

    def descendants(n):
        seen = set()
        stack = [n]
        while stack:
            cur = stack.pop()
            for ch in children[cur]:
                if ch not in seen:
                    seen.add(ch)
                    stack.append(ch)
        return seen

    desc = {n: descendants(n) for n in nodes}
    z_set = set(z_set)

    def path_active(path) -> bool:
        for i in range(1, len(path) - 1):
            prev, mid, nxt = path[i - 1], path[i], path[i + 1]
            is_collider = mid in children[prev] and mid in children[nxt]
            if is_collider:
                if mid not in z_set and not (desc[mid] & z_set):
                    return False
            else:
                if mid in z_set:
                    return False
        return True

    for start in a_set:
        stack = [(start, [start])]
        while stack:
            cur, path = stack.pop()
            if cur in b_set and len(path) > 1:
                if path_active(path):
                    return False
                continue
            for nxt in neighbors[cur]:
                if nxt in path:
                    continue
                if nxt in b_set:
                    if path_active(path + [nxt]):
                        return False
                    continue
                stack.append((nxt, path + [nxt]))
    return True


# ---------------------------------------------------------------------------
# Interventional distributions by mutilation + joint enumeration
# ---------------------------------------------------------------------------


def interventional_by_mutilation(raw_model, x, x_value, y):
    """P(y | do(x := x_value)) by setting x, enumerating every assignment of
    the other variables, and multiplying non-x CPT entries (the truncated
    product), then marginalizing y.

    raw_model is the plain-dict form produced by random_discrete_model:
    {"order": [names...], "states": {name: [..]}, "parents": {name: [..]},
     "cpts": {name: {parent_cfg_tuple: [probs]}}}.
    """
    order = raw_model["order"]
    states = raw_model["states"]
    parents = raw_model["parents"]
    cpts = raw_model["cpts"]
    others = [n for n in order if n != x]
    dist = {s: 0.0 for s in states[y]}
    for combo in itertools.product(*(states[n] for n in others)):
        assignment = dict(zip(others, combo))
        assignment[x] = x_value
        p = 1.0
        for n in others:
            cfg = tuple(assignment[q] for q in parents[n])
            row = cpts[n][cfg]
            p *= row[states[n].index(assignment[n])]
            if p == 0.0:
                break
        dist[assignment[y]] += p
    return dist


def expectation(dist) -> float:
    return sum(float(s) * p for s, p in dist.items())


# ---------------------------------------------------------------------------
# Random structure generators (seeded by the caller)
# ---------------------------------------------------------------------------


def random_dag(rng: random.Random, max_nodes: int = 6, edge_prob: float = 0.4):
    n = rng.randint(3, max_nodes)
    nodes = [f"N{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((nodes[i], nodes[j]))
    return nodes, edges


def random_discrete_model(
    rng: random.Random,
    max_nodes: int = 5,
    max_states: int = 3,
    edge_prob: float = 0.5,
    min_prob: float = 0.05,
):
    """Random DAG plus well-conditioned random CPTs in plain-dict form."""
    nodes, edges = random_dag(rng, max_nodes=max_nodes, edge_prob=edge_prob)
    states = {n: list(range(rng.randint(2, max_states))) for n in nodes}
    parents = {n: sorted({u for u, v in edges if v == n}) for n in nodes}
    cpts = {}
    for n in nodes:
        table = {}
        for cfg in itertools.product(*(states[p] for p in parents[n])):
            raw = [rng.uniform(min_prob, 1.0) for _ in states[n]]
            total = sum(raw)
            table[cfg] = [v / total for v in raw]
        cpts[n] = table
    return {
        "order": nodes,
        "edges": edges,
        "states": states,
        "parents": parents,
        "cpts": cpts,
    }


def random_mediator_model(rng: random.Random, n_m_states: int = 3):
    """Canonical mediation structure x -> m -> y with a direct x -> y edge
    and random well-conditioned CPTs, in plain-dict form."""
    states = {"x": [0, 1], "m": list(range(n_m_states)), "y": [0, 1]}
    parents = {"x": [], "m": ["x"], "y": ["m", "x"]}

    def row(k):
        raw = [rng.uniform(0.05, 1.0) for _ in range(k)]
        total = sum(raw)
        return [v / total for v in raw]

    cpts = {
        "x": {(): row(2)},
        "m": {(xv,): row(n_m_states) for xv in states["x"]},
        "y": {
            (mv, xv): row(2)
            for mv in states["m"]
            for xv in states["x"]
        },
    }
    return {
        "order": ["x", "m", "y"],
        "edges": [("x", "m"), ("m", "y"), ("x", "y")],
        "states": states,
        "parents": parents,
        "cpts": cpts,
    }
