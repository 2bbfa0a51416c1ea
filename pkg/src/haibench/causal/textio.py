"""Loadable text format for causal models and queries.

A model file is a JSON/YAML object with a node list, an edge list, and
optionally one CPT block per node::

    {
      "nodes": [{"name": "Z", "states": [0, 1]}, "X", "Y"],
      "edges": [["Z", "X"], ["Z", "Y"], ["X", "Y"]],
      "cpts": {
        "Z": [{"given": {}, "p": [0.5, 0.5]}],
        "X": [{"given": {"Z": 0}, "p": [0.8, 0.2]},
              {"given": {"Z": 1}, "p": [0.3, 0.7]}],
        ...
      }
    }

Bare-string nodes default to states [0, 1]. A query file is either a
single query object or {"queries": [...]}; each query has a "kind" of
d_separation, backdoor_admissible, rule1, backdoor_adjust, ate, or
mediation, plus that kind's parameters.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional, Sequence, Union

from .dag import Dag, backdoor_admissible, d_separated, rule1_applicable
from .discrete import DiscreteModel, InterventionQuery, Variable, ate, backdoor_adjust, mediation_effects

__all__ = ["load_dag", "load_model", "load_queries", "run_query", "run_queries"]


def _parse_nodes(spec: Sequence[Any]) -> list[Variable]:
    out = []
    for item in spec:
        if isinstance(item, str):
            out.append(Variable(item, (0, 1)))
        else:
            states = item.get("states", [0, 1])
            out.append(Variable(item["name"], tuple(states)))
    return out


def load_dag(obj: Mapping[str, Any]) -> Dag:
    names = [v.name for v in _parse_nodes(obj["nodes"])]
    edges = [(u, v) for u, v in obj.get("edges", [])]
    return Dag(names, edges)


def load_model(obj: Mapping[str, Any]) -> Union[Dag, DiscreteModel]:
    """Build a DiscreteModel, or a bare Dag when no CPTs are given."""
    variables = _parse_nodes(obj["nodes"])
    dag = Dag([v.name for v in variables], [(u, v) for u, v in obj.get("edges", [])])
    if "cpts" not in obj:
        return dag
    cpts: dict[str, dict[tuple, Sequence[float]]] = {}
    for node, rows in obj["cpts"].items():
        order = tuple(sorted(dag.parents(node)))
        table: dict[tuple, Sequence[float]] = {}
        for row in rows:
            given = row.get("given", {})
            extra = set(given) - set(order)
            if extra:
                raise ValueError(
                    f"CPT row for {node!r} conditions on non-parents {sorted(extra)}"
                )
            missing = set(order) - set(given)
            if missing:
                raise ValueError(
                    f"CPT row for {node!r} is missing parents {sorted(missing)}"
                )
            cfg = tuple(given[p] for p in order)
            table[cfg] = row["p"]
        cpts[node] = table
    return DiscreteModel(dag, variables, cpts)


def _need_model(model: Union[Dag, DiscreteModel], kind: str) -> DiscreteModel:
    if isinstance(model, Dag):
        raise ValueError(f"query kind {kind!r} needs a model with CPTs")
    return model


def run_query(
    model: Union[Dag, DiscreteModel], query: Mapping[str, Any]
) -> dict[str, Any]:
    kind = query.get("kind")
    dag = model if isinstance(model, Dag) else model.dag
    if kind == "d_separation":
        value = d_separated(dag, query["a"], query["b"], query.get("z", []))
        return {"kind": kind, "d_separated": value}
    if kind == "backdoor_admissible":
        value = backdoor_admissible(dag, query["x"], query["y"], query.get("z", []))
        return {"kind": kind, "admissible": value}
    if kind == "rule1":
        value = rule1_applicable(
            dag, query["x"], query["y"], query["z"], query.get("w", [])
        )
        return {"kind": kind, "applicable": value}
    if kind == "backdoor_adjust":
        m = _need_model(model, kind)
        q = InterventionQuery(
            x_node=query["x"],
            x_value=query["x_value"],
            y_node=query["y"],
            adjustment_set=frozenset(query.get("z", [])),
        )
        dist = backdoor_adjust(m, q)
        return {
            "kind": kind,
            "distribution": {str(s): p for s, p in dist.items()},
        }
    if kind == "ate":
        m = _need_model(model, kind)
        value = ate(
            m,
            query["x"],
            query["y"],
            query.get("z", []),
            x1=query.get("x1", 1),
            x0=query.get("x0", 0),
        )
        return {"kind": kind, "ate": value}
    if kind == "mediation":
        m = _need_model(model, kind)
        res = mediation_effects(m, query["x"], query["m"], query["y"])
        return {"kind": kind, "nde": res.nde, "nie": res.nie, "te": res.te}
    raise ValueError(f"unknown query kind {kind!r}")


def load_queries(obj: Any) -> list[Mapping[str, Any]]:
    if isinstance(obj, Mapping) and "queries" in obj:
        return list(obj["queries"])
    if isinstance(obj, Mapping):
        return [obj]
    return list(obj)


def run_queries(
    model: Union[Dag, DiscreteModel],
    queries: Any,
    label: Optional[str] = None,
) -> list[dict[str, Any]]:
    results = []
    for i, q in enumerate(load_queries(queries)):
        try:
            res = run_query(model, q)
        except ValueError as exc:
            res = {"kind": q.get("kind"), "error": str(exc)}
        if label is not None:
            res["model"] = label
        res["index"] = i
        results.append(res)
    return results
