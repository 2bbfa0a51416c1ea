"""Acceptance suite: one test per release criterion, at the stated
tolerance, printing one pass line each (visible with pytest -s or in the
captured output of a failing run). Oracles live in tests/oracles.py and
never share a code path with the implementation they check.
"""

import random
import statistics
import time

import numpy as np
import pytest

from haibench.events import JudgmentRecord
from haibench.harness import load_config, run_benchmark
from haibench.judgment import policy_capture_fit, sdt_evaluate
from haibench.probit import probit
from haibench.sim import (
    AgentSpec,
    AutomationLevel,
    ReliabilitySchedule,
    TaskParams,
    advise,
    derive_seed,
    generate_scenario,
    run_session,
)
from haibench.sim.scenario import adjust_threats_for_kind
from haibench.events import (
    BackEndInteraction,
    EventKind,
    FrontEndComponent,
    SystemInventory,
)
from haibench.causal import (
    Dag,
    DiscreteModel,
    InterventionQuery,
    Variable,
    backdoor_adjust,
    d_separated,
    mediation_effects,
)
from haibench.judgment import heuristic_alignment
from haibench.events import HeuristicOutcome
from haibench.system import (
    WeightedItem,
    attention_metrics,
    critical_risk,
    interaction_balance,
    weighted_failure_score,
)

from oracles import (
    d_separated_by_paths,
    expectation,
    interventional_by_mutilation,
    probit_bisection,
    random_dag,
    random_discrete_model,
    random_mediator_model,
    solve_least_squares_elimination,
)
from test_causal import build_model


def report(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}")


def test_sdt_oracle_seeded_judgments():
    """10,000 seeded judgments at true rates 0.69/0.31 give d' within
    0.05 of 0.9917; runtime under one second."""
    t0 = time.monotonic()
    rng = random.Random(derive_seed(424242, "sdt-acceptance"))
    records = []
    for _ in range(10_000):
        records.append(
            JudgmentRecord("signal", "yes" if rng.random() < 0.69 else "no")
        )
        records.append(
            JudgmentRecord("noise", "yes" if rng.random() < 0.31 else "no")
        )
    result = sdt_evaluate(records)
    oracle_d = float(
        probit_bisection(np.array([0.69]))[0] - probit_bisection(np.array([0.31]))[0]
    )
    assert oracle_d == pytest.approx(0.9917, abs=1e-3)
    assert abs(result.d_prime - 0.9917) <= 0.05
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report(
        f"SDT oracle: d'={result.d_prime:.4f} within 0.05 of 0.9917 "
        f"({elapsed * 1000:.0f} ms)"
    )


def test_z_function_accuracy_grid():
    """Inverse-normal accuracy <= 1e-9 against the quadrature-bisection
    oracle across the 1e-4-spaced grid of (0.001, 0.999)."""
    grid = np.arange(0.001 + 1e-4, 0.999, 1e-4)
    oracle = probit_bisection(grid)
    ours = np.array([probit(p) for p in grid])
    max_err = float(np.max(np.abs(ours - oracle)))
    assert max_err <= 1e-9
    report(f"Z-function max error {max_err:.2e} <= 1e-9 on {grid.size} grid points")


def test_backdoor_adjustment_vs_mutilation_enumeration():
    """Back-door adjustment equals graph-mutilation enumeration within
    1e-12 on 1000 random discrete models (<= 5 nodes, <= 3 states), in
    under 10 seconds."""
    t0 = time.monotonic()
    rng = random.Random(derive_seed(424242, "backdoor-acceptance"))
    checked = 0
    worst = 0.0
    while checked < 1000:
        raw = random_discrete_model(rng, max_nodes=5, max_states=3)
        nodes = raw["order"]
        x = rng.choice(nodes)
        y = rng.choice([n for n in nodes if n != x])
        z = frozenset(raw["parents"][x])
        if y in z:
            continue
        model = build_model(raw)
        x_value = rng.choice(raw["states"][x])
        dist = backdoor_adjust(
            model, InterventionQuery(x, x_value, y, adjustment_set=z)
        )
        oracle = interventional_by_mutilation(raw, x, x_value, y)
        for s in raw["states"][y]:
            err = abs(dist[s] - oracle[s])
            worst = max(worst, err)
            assert err <= 1e-12
        checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    report(
        f"back-door adjustment matched mutilation oracle on {checked} models, "
        f"max error {worst:.2e} ({elapsed:.1f} s)"
    )


def test_d_separation_and_mediation_identities():
    """d-separation equals the path-enumeration oracle on 1000 random DAGs
    (<= 6 nodes); NDE + NIE = ATE within 1e-12 on 200 mediator models."""
    rng = random.Random(derive_seed(424242, "dsep-acceptance"))
    for _ in range(1000):
        nodes, edges = random_dag(rng, max_nodes=6)
        pool = list(nodes)
        rng.shuffle(pool)
        a, b = pool[0], pool[1]
        z = set(pool[2 : 2 + rng.randint(0, len(pool) - 2)])
        dag = Dag(nodes, edges)
        assert d_separated(dag, {a}, {b}, z) == d_separated_by_paths(
            nodes, edges, {a}, {b}, z
        )
    worst = 0.0
    for _ in range(200):
        raw = random_mediator_model(rng)
        model = build_model(raw)
        res = mediation_effects(model, "x", "m", "y")
        err = abs(res.nde + res.nie - res.te)
        worst = max(worst, err)
        assert err <= 1e-12
        d1 = interventional_by_mutilation(raw, "x", 1, "y")
        d0 = interventional_by_mutilation(raw, "x", 0, "y")
        assert res.te == pytest.approx(expectation(d1) - expectation(d0), abs=1e-12)
    report(
        "d-separation matched path enumeration on 1000 DAGs; "
        f"NDE+NIE=ATE on 200 mediator models (max gap {worst:.2e})"
    )


def test_advisor_calibration():
    """Empirical advisor correctness in [0.79, 0.81] over 10,000 seeded
    trials at rate 0.8; the forced first failure lands exactly on its
    scheduled trial."""
    params = TaskParams()
    rng = random.Random(derive_seed(424242, "advisor-acceptance"))
    scenario = adjust_threats_for_kind(generate_scenario(params, 12), params, True)
    sched = ReliabilitySchedule(rate=0.8)
    n = 10_000
    correct = sum(
        advise(scenario, AutomationLevel.HIGH_DECISION, sched, t, rng, params).correct
        for t in range(1, n + 1)
    )
    fraction = correct / n
    assert 0.79 <= fraction <= 0.81

    for k in (1, 4, 11):
        sched_k = ReliabilitySchedule(rate=1.0, first_failure_trial=k)
        rng_k = random.Random(0)
        flags = [
            advise(scenario, AutomationLevel.LOW_DECISION, sched_k, t, rng_k, params).correct
            for t in range(1, k + 3)
        ]
        assert all(flags[: k - 1])
        assert flags[k - 1] is False
    report(
        f"advisor calibration: empirical correctness {fraction:.4f} in [0.79, 0.81]; "
        "first failure lands exactly on schedule"
    )


def test_qualitative_automation_effects():
    """With defaults and matched seeds over 100 sessions: complying with
    unreliable automation is strictly less accurate than manual work, and
    compliant decisions under full decision automation are strictly faster
    than manual ones."""
    params = TaskParams()
    rt = dict(rt_median_ms=900.0, rt_sigma=0.35, rt_per_option=0.1)
    compliant = AgentSpec("compliant", "compliant", **rt)
    manual = AgentSpec("manual", "manual", noise=0.05, **rt)
    sched = ReliabilitySchedule(rate=0.6)

    acc = {"compliant": [], "manual": []}
    rts = {"compliant": [], "manual": []}
    for i in range(100):
        seed = derive_seed(424242, f"automation-effects:{i}")
        for spec in (compliant, manual):
            session = run_session(
                params, AutomationLevel.HIGH_DECISION, sched, spec, 20, seed
            )
            stim = {}
            correct = []
            for ev in session.events:
                if ev.kind is EventKind.STIMULUS and ev.payload.get("task") == "engagement":
                    stim[ev.trial_id] = ev.t
                elif ev.kind is EventKind.OPERATOR_ACTION and ev.payload.get("action") != "probe":
                    rts[spec.name].append(ev.t - stim[ev.trial_id])
                elif ev.kind is EventKind.FEEDBACK:
                    correct.append(ev.payload["correct"])
            acc[spec.name].append(sum(correct) / len(correct))

    mean_acc_compliant = statistics.mean(acc["compliant"])
    mean_acc_manual = statistics.mean(acc["manual"])
    mean_rt_compliant = statistics.mean(rts["compliant"])
    mean_rt_manual = statistics.mean(rts["manual"])
    assert mean_acc_compliant < mean_acc_manual
    assert mean_rt_compliant < mean_rt_manual
    report(
        "qualitative automation effects: accuracy "
        f"{mean_acc_compliant:.3f} < {mean_acc_manual:.3f} under unreliable advice; "
        f"RT {mean_rt_compliant:.0f} ms < {mean_rt_manual:.0f} ms under decision automation"
    )


def test_metric_bound_fuzz():
    """10,000 random inventories/inputs keep every declared range: ratios
    in [0,1], alignment scores in [-1,1], risk index >= 1, count metrics
    >= 0, the attention floor/ceiling never both bind, and the weighted
    failure score is invariant to weight scaling by 0.5, 3, and 10."""
    rng = random.Random(derive_seed(424242, "fuzz-acceptance"))
    for i in range(10_000):
        n_front = rng.randint(0, 14)
        n_back = rng.randint(0, 14)
        front = tuple(
            FrontEndComponent(f"f{j}", chunk_group="g" if rng.random() < 0.5 else None)
            for j in range(n_front)
        )
        back = tuple(
            BackEndInteraction(
                f"b{j}",
                provides_feedback=rng.random() < 0.5,
                duplicate_of=f"b{rng.randrange(j)}" if j and rng.random() < 0.3 else None,
                critical=rng.random() < 0.3,
                overlooked=rng.random() < 0.3,
            )
            for j in range(n_back)
        )
        inv = SystemInventory(front_end=front, back_end=back)
        ib = interaction_balance(inv)
        if ib.cib is not None:
            assert ib.cib >= 0
        if ib.fe is not None:
            assert 0.0 <= ib.fe <= 1.0
        assert ib.op >= 0 and ib.ir >= 0
        if n_back:
            assert (ib.op > 0) == (ib.cib < 1)
        am = attention_metrics(inv)
        if am.ase is not None:
            assert 0.0 <= am.ase <= 1.0
        assert am.war >= 0 and am.ni >= 0
        assert am.war * am.ni == 0
        assert critical_risk(inv) >= 1

        items = [
            WeightedItem(rng.uniform(0.05, 20.0), rng.random() < 0.4)
            for _ in range(rng.randint(1, 10))
        ]
        wf = weighted_failure_score(items)
        assert 0.0 <= wf.raw <= 1.0
        for k in (0.5, 3, 10):
            scaled = weighted_failure_score(
                [WeightedItem(it.weight * k, it.failed) for it in items]
            )
            assert abs(scaled.raw - wf.raw) <= 1e-12

        if i % 10 == 0:
            counts = [rng.randint(0, 20) for _ in range(4)]
            if sum(counts) >= 1:
                hts = heuristic_alignment(
                    [HeuristicOutcome("h", *counts)]
                ).alignment_score
                assert -1.0 <= hts <= 1.0
    report("metric-bound fuzz: 10,000 random inputs respected every declared range")


def test_policy_capture_regression_recovery():
    """Noiseless cue-weight data is recovered within 1e-8 and matches an
    independent elimination solver."""
    rng = random.Random(derive_seed(424242, "regression-acceptance"))
    for trial in range(20):
        dim = rng.randint(1, 5)
        w_true = [rng.uniform(-2, 2) for _ in range(dim)]
        obs = []
        for _ in range(dim + 10):
            cues = [rng.uniform(-3, 3) for _ in range(dim)]
            obs.append((cues, sum(w * c for w, c in zip(w_true, cues))))
        model = policy_capture_fit(obs)
        assert list(model.weights) == pytest.approx(w_true, abs=1e-8)
        oracle = solve_least_squares_elimination(
            [list(c) for c, _ in obs], [d for _, d in obs]
        )
        assert list(model.weights) == pytest.approx(oracle, abs=1e-8)
    report("policy-capturing regression recovered known weights within 1e-8 (20 cases)")


def test_benchmark_determinism_and_runtime(tmp_path):
    """The full default suite runs twice with identical (config, seed) and
    produces byte-identical report files, completing well under 60 s."""
    config = load_config("tests/data/acceptance_config.yaml")
    t0 = time.monotonic()
    run_benchmark(config, tmp_path / "a")
    first_elapsed = time.monotonic() - t0
    run_benchmark(config, tmp_path / "b")
    names_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    names_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert names_a == names_b
    cell_files = [n for n in names_a if n.startswith("cell-")]
    assert len(cell_files) == 16  # 4 levels x 2 schedules x 2 agents
    import json

    n_sessions = sum(
        len(json.loads((tmp_path / "a" / n).read_text())["sessions"])
        for n in cell_files
    )
    assert n_sessions == 160
    for name in names_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert first_elapsed < 60.0
    report(
        f"determinism: {len(names_a)} report files byte-identical across reruns; "
        f"default suite ran in {first_elapsed:.1f} s (< 60 s)"
    )
