"""Discrete causal models: exact joints from conditional tables, the
back-door adjustment, average treatment effects, and mediation
decomposition into natural direct and indirect effects.

Everything is computed from the model's exact joint distribution; there is
no sampling. Positivity violations (a stratum that the adjustment formula
needs but the joint gives zero mass) are hard errors rather than silently
skipped strata, since skipping would bias the adjusted distribution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from .dag import Dag, backdoor_admissible

__all__ = [
    "PositivityError",
    "Variable",
    "DiscreteModel",
    "InterventionQuery",
    "MediationResult",
    "backdoor_adjust",
    "ate",
    "mediation_effects",
    "fit_cpts",
]

ROW_SUM_TOL = 1e-12

State = Any
Assignment = tuple[State, ...]


class PositivityError(ValueError):
    """A required conditional is undefined because its stratum has zero mass."""


@dataclass(frozen=True)
class Variable:
    name: str
    states: tuple[State, ...]

    def __post_init__(self) -> None:
        if len(self.states) < 1:
            raise ValueError(f"variable {self.name!r} needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"variable {self.name!r} has duplicate states")


class DiscreteModel:
    """A DAG plus one conditional probability table per node.

    CPTs are given as ``cpts[node][parent_assignment] -> row``, where the
    parent assignment is a tuple of parent states in the order returned by
    ``parent_order(node)`` (sorted names), and the row is one probability
    per node state. Rows must cover every parent configuration and sum to
    one within 1e-12.
    """

    def __init__(
        self,
        dag: Dag,
        variables: Sequence[Variable],
        cpts: Mapping[str, Mapping[tuple, Sequence[float]]],
    ):
        names = [v.name for v in variables]
        if sorted(names) != sorted(dag.nodes):
            raise ValueError("variables do not match dag nodes")
        self.dag = dag
        self.variables = {v.name: v for v in variables}
        self._cpts: dict[str, dict[tuple, tuple[float, ...]]] = {}
        for node in dag.nodes:
            if node not in cpts:
                raise ValueError(f"missing CPT for node {node!r}")
            order = self.parent_order(node)
            expected = set(
                itertools.product(*(self.variables[p].states for p in order))
            )
            table: dict[tuple, tuple[float, ...]] = {}
            for cfg, row in cpts[node].items():
                cfg = tuple(cfg)
                if cfg not in expected:
                    raise ValueError(
                        f"CPT for {node!r} has a row for unknown parent config {cfg!r}"
                    )
                row = tuple(float(p) for p in row)
                if len(row) != len(self.variables[node].states):
                    raise ValueError(
                        f"CPT row for {node!r} given {cfg!r} has wrong length"
                    )
                if any(p < 0 for p in row):
                    raise ValueError(f"negative probability in CPT for {node!r}")
                if abs(sum(row) - 1.0) > ROW_SUM_TOL:
                    raise ValueError(
                        f"CPT row for {node!r} given {cfg!r} sums to {sum(row)!r}"
                    )
                table[cfg] = row
            missing = expected - set(table)
            if missing:
                raise ValueError(
                    f"CPT for {node!r} is missing parent configs, e.g. {sorted(missing)[0]!r}"
                )
            self._cpts[node] = table
        self._joint: Optional[dict[Assignment, float]] = None

    def parent_order(self, node: str) -> tuple[str, ...]:
        return tuple(sorted(self.dag.parents(node)))

    def cpt_row(self, node: str, parent_assignment: tuple) -> tuple[float, ...]:
        return self._cpts[node][tuple(parent_assignment)]

    def joint(self) -> dict[Assignment, float]:
        """Exact joint over all nodes, keyed by states in node order."""
        if self._joint is None:
            nodes = list(self.dag.nodes)
            index = {n: i for i, n in enumerate(nodes)}
            state_idx = {
                n: {s: i for i, s in enumerate(self.variables[n].states)}
                for n in nodes
            }
            joint: dict[Assignment, float] = {}
            for assignment in itertools.product(
                *(self.variables[n].states for n in nodes)
            ):
                p = 1.0
                for n in nodes:
                    cfg = tuple(assignment[index[q]] for q in self.parent_order(n))
                    p *= self._cpts[n][cfg][state_idx[n][assignment[index[n]]]]
                    if p == 0.0:
                        break
                joint[assignment] = p
            self._joint = joint
        return self._joint

    def marginal(self, nodes: Sequence[str]) -> dict[tuple, float]:
        """Marginal distribution over the given nodes, in the given order."""
        idxs = [self.dag.nodes.index(n) for n in nodes]
        out: dict[tuple, float] = {}
        for assignment, p in self.joint().items():
            key = tuple(assignment[i] for i in idxs)
            out[key] = out.get(key, 0.0) + p
        return out


@dataclass(frozen=True)
class InterventionQuery:
    x_node: str
    x_value: State
    y_node: str
    adjustment_set: frozenset[str] = frozenset()
    mediator: Optional[str] = None

    def __post_init__(self) -> None:
        if self.x_node in self.adjustment_set or self.y_node in self.adjustment_set:
            raise ValueError("x and y cannot appear in the adjustment set")
        if self.x_node == self.y_node:
            raise ValueError("x and y must differ")


def _validate_query_nodes(model: DiscreteModel, q: InterventionQuery) -> None:
    known = set(model.dag.nodes)
    for n in {q.x_node, q.y_node, *q.adjustment_set}:
        if n not in known:
            raise ValueError(f"unknown node {n!r}")
    if q.x_value not in model.variables[q.x_node].states:
        raise ValueError(
            f"{q.x_value!r} is not a state of {q.x_node!r}"
        )


def backdoor_adjust(
    model: DiscreteModel, q: InterventionQuery
) -> dict[State, float]:
    """Interventional distribution of y under do(x := value) by adjusting
    over the query's (admissible) back-door set:
    sum over z of P(y | x, z) * P(z).
    """
    _validate_query_nodes(model, q)
    z_nodes = sorted(q.adjustment_set)
    if not backdoor_admissible(model.dag, q.x_node, q.y_node, z_nodes):
        raise ValueError(
            f"adjustment set {z_nodes} is not back-door admissible for "
            f"({q.x_node!r}, {q.y_node!r})"
        )
    y_states = model.variables[q.y_node].states
    # Accumulate P(z), P(x, z) and P(y, x, z) in one sweep of the joint.
    nodes = list(model.dag.nodes)
    xi = nodes.index(q.x_node)
    yi = nodes.index(q.y_node)
    zi = [nodes.index(n) for n in z_nodes]
    p_z: dict[tuple, float] = {}
    p_xz: dict[tuple, float] = {}
    p_yxz: dict[tuple, dict[State, float]] = {}
    for assignment, p in model.joint().items():
        zkey = tuple(assignment[i] for i in zi)
        p_z[zkey] = p_z.get(zkey, 0.0) + p
        if assignment[xi] == q.x_value:
            p_xz[zkey] = p_xz.get(zkey, 0.0) + p
            p_yxz.setdefault(zkey, {})
            ykey = assignment[yi]
            p_yxz[zkey][ykey] = p_yxz[zkey].get(ykey, 0.0) + p

    result = {s: 0.0 for s in y_states}
    for zkey, pz in p_z.items():
        if pz <= 0.0:
            continue
        pxz = p_xz.get(zkey, 0.0)
        if pxz <= 0.0:
            raise PositivityError(
                f"stratum {dict(zip(z_nodes, zkey))} has P(z) > 0 but "
                f"P({q.x_node}={q.x_value!r}, z) = 0"
            )
        for s in y_states:
            result[s] += p_yxz[zkey].get(s, 0.0) / pxz * pz
    return result


def _expectation(dist: Mapping[State, float]) -> float:
    try:
        return sum(float(s) * p for s, p in dist.items())
    except (TypeError, ValueError) as exc:
        raise ValueError("outcome states must be numeric for expectations") from exc


def ate(
    model: DiscreteModel,
    x: str,
    y: str,
    z: Iterable[str] = (),
    x1: State = 1,
    x0: State = 0,
) -> float:
    """E[y | do(x := x1)] - E[y | do(x := x0)], adjusting over z."""
    z_set = frozenset(z)
    e1 = _expectation(
        backdoor_adjust(model, InterventionQuery(x, x1, y, adjustment_set=z_set))
    )
    e0 = _expectation(
        backdoor_adjust(model, InterventionQuery(x, x0, y, adjustment_set=z_set))
    )
    return e1 - e0


@dataclass(frozen=True)
class MediationResult:
    nde: float
    nie: float
    te: float


def mediation_effects(
    model: DiscreteModel, x: str, m: str, y: str
) -> MediationResult:
    """Natural direct/indirect decomposition of the effect of binary x on y
    through mediator m.

    Identification assumes the canonical unconfounded mediation structure:
    x has no parents, m's only possible parent is x, and y's parents are a
    subset of {x, m}. The decomposition satisfies nde + nie = te exactly
    (up to float accumulation).
    """
    for n in (x, m, y):
        if n not in set(model.dag.nodes):
            raise ValueError(f"unknown node {n!r}")
    if len({x, m, y}) != 3:
        raise ValueError("x, m and y must be distinct")
    x_states = model.variables[x].states
    if len(x_states) != 2:
        raise ValueError(f"mediation requires binary x, {x!r} has {len(x_states)} states")
    if model.dag.parents(x):
        raise ValueError(f"treatment {x!r} has parents; adjust confounding first")
    if not model.dag.parents(m) <= {x}:
        raise ValueError(f"mediator {m!r} is confounded (parents beyond {x!r})")
    if not model.dag.parents(y) <= {x, m}:
        raise ValueError(f"outcome {y!r} has parents beyond {{{x!r}, {m!r}}}")
    try:
        x0, x1 = sorted(x_states, key=float)
    except (TypeError, ValueError):
        x0, x1 = sorted(x_states, key=repr)

    m_states = model.variables[m].states
    p_xm = model.marginal([x, m])
    p_x = model.marginal([x])
    for xv in (x0, x1):
        if p_x.get((xv,), 0.0) <= 0.0:
            raise PositivityError(f"P({x}={xv!r}) = 0")

    def p_m_given(xv: State, mv: State) -> float:
        return p_xm.get((xv, mv), 0.0) / p_x[(xv,)]

    # E[y | x, m] strata from the joint.
    p_xmy = model.marginal([x, m, y])

    def e_y_given(xv: State, mv: State) -> float:
        mass = p_xm.get((xv, mv), 0.0)
        if mass <= 0.0:
            raise PositivityError(
                f"E[{y} | {x}={xv!r}, {m}={mv!r}] undefined: zero-mass stratum"
            )
        total = 0.0
        for yv in model.variables[y].states:
            p = p_xmy.get((xv, mv, yv), 0.0)
            if p:
                total += float(yv) * p
        return total / mass

    nde = 0.0
    nie = 0.0
    for mv in m_states:
        w0 = p_m_given(x0, mv)
        w1 = p_m_given(x1, mv)
        if w0 > 0.0:
            nde += (e_y_given(x1, mv) - e_y_given(x0, mv)) * w0
        delta = w1 - w0
        if delta != 0.0:
            nie += e_y_given(x1, mv) * delta
    te = ate(model, x, y, z=(), x1=x1, x0=x0)
    return MediationResult(nde=nde, nie=nie, te=te)


def fit_cpts(
    dag: Dag,
    records: Sequence[Mapping[str, State]],
    variables: Optional[Sequence[Variable]] = None,
    smoothing: float = 0.0,
) -> DiscreteModel:
    """Estimate CPTs from complete categorical records by frequency counts,
    with optional add-k smoothing. Without smoothing, an unobserved parent
    configuration is an error.
    """
    if not records:
        raise ValueError("no records to fit from")
    if smoothing < 0:
        raise ValueError("smoothing must be nonnegative")
    if variables is None:
        states: dict[str, set] = {n: set() for n in dag.nodes}
        for rec in records:
            for n in dag.nodes:
                if n not in rec:
                    raise ValueError(f"record missing node {n!r}")
                states[n].add(rec[n])
        variables = [
            Variable(n, tuple(sorted(states[n], key=repr))) for n in dag.nodes
        ]
    var_by_name = {v.name: v for v in variables}

    cpts: dict[str, dict[tuple, list[float]]] = {}
    for node in dag.nodes:
        order = tuple(sorted(dag.parents(node)))
        node_states = var_by_name[node].states
        counts: dict[tuple, list[float]] = {
            cfg: [smoothing] * len(node_states)
            for cfg in itertools.product(*(var_by_name[p].states for p in order))
        }
        s_index = {s: i for i, s in enumerate(node_states)}
        for rec in records:
            cfg = tuple(rec[p] for p in order)
            counts[cfg][s_index[rec[node]]] += 1.0
        table: dict[tuple, list[float]] = {}
        for cfg, row in counts.items():
            total = sum(row)
            if total <= 0:
                raise ValueError(
                    f"no observations for {node!r} given {cfg!r}; "
                    "use smoothing > 0"
                )
            table[cfg] = [c / total for c in row]
        cpts[node] = table
    return DiscreteModel(dag, list(variables), cpts)
