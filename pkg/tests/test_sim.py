import math
import random
import statistics

import pytest

from haibench.events import EventKind
from haibench.sim import (
    AgentSpec,
    Advice,
    AutomationLevel,
    ReliabilitySchedule,
    Scenario,
    TaskParams,
    advise,
    danger_score,
    derive_seed,
    generate_scenario,
    ground_truth_key,
    ranked_pairs,
    run_session,
    scenario_is_signal,
    solve_optimal,
)
from haibench.sim.agents import CalibratedAgent, make_agent
from haibench.sim.scenario import Enemy, Friendly, adjust_threats_for_kind
from haibench.events import serialize_session


PARAMS = TaskParams()


class TestScenario:
    def test_seed_determinism(self):
        a = generate_scenario(PARAMS, 42)
        b = generate_scenario(PARAMS, 42)
        assert a == b
        assert generate_scenario(PARAMS, 43) != a

    def test_degenerate_single_pair(self):
        params = TaskParams(n_enemies=1, n_friendlies=1)
        s = generate_scenario(params, 7)
        assert len(ranked_pairs(s, params)) == 1

    def test_pair_count(self):
        s = generate_scenario(PARAMS, 7)
        assert len(ranked_pairs(s, PARAMS)) == 20

    def test_positions_distinct_and_in_grid(self):
        s = generate_scenario(PARAMS, 99)
        cells = [(u.x, u.y) for u in (*s.enemies, *s.friendlies)] + [s.hq]
        assert len(set(cells)) == len(cells)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            TaskParams(n_enemies=0)
        with pytest.raises(ValueError):
            TaskParams(grid_size=2, n_enemies=5, n_friendlies=5)

    def test_kind_adjustment_forces_label(self):
        for seed in range(20):
            s = generate_scenario(PARAMS, seed)
            as_signal = adjust_threats_for_kind(s, PARAMS, True)
            as_noise = adjust_threats_for_kind(s, PARAMS, False)
            assert scenario_is_signal(as_signal, PARAMS)
            assert not scenario_is_signal(as_noise, PARAMS)
            assert all(e.threat > 0 for e in as_noise.enemies)


class TestSolveOptimal:
    def test_single_pair_forced(self):
        params = TaskParams(n_enemies=1, n_friendlies=1)
        s = generate_scenario(params, 3)
        sol = solve_optimal(s, params)
        assert sol.enemy_id == "E1" and sol.friendly_id == "F1"

    def test_tie_breaks_to_first_listed(self):
        s = Scenario(
            grid_size=10,
            hq=(0, 0),
            enemies=(Enemy("E1", 3, 0, 5.0), Enemy("E2", 0, 3, 5.0)),
            friendlies=(Friendly("F1", 3, 1), Friendly("F2", 3, 1 + 0)),
            seed=0,
        )
        # Equal danger (same threat, same distance to hq) -> first enemy wins.
        sol = solve_optimal(s, PARAMS)
        assert sol.enemy_id == "E1"
        assert sol.friendly_id == "F1"

    def test_matches_independent_enumeration(self):
        rng = random.Random(2718)
        for _ in range(50):
            params = TaskParams(n_enemies=6, n_friendlies=5)
            s = generate_scenario(params, rng.randrange(10**6))
            sol = solve_optimal(s, params)
            # Second, independently coded exhaustive search.
            best = None
            for e in s.enemies:
                d = params.w_threat * e.threat - params.w_distance * math.dist(
                    (e.x, e.y), s.hq
                )
                for f in s.friendlies:
                    ef = math.dist((e.x, e.y), (f.x, f.y))
                    cand = (-d, ef, e.id, f.id)
                    if best is None or cand < best:
                        best = cand
            assert (sol.enemy_id, sol.friendly_id) == (best[2], best[3])
            assert sol.danger[sol.enemy_id] == pytest.approx(-best[0])

    def test_ranked_pairs_head_is_optimum(self):
        for seed in range(10):
            s = generate_scenario(PARAMS, seed)
            assert ranked_pairs(s, PARAMS)[0].option == solve_optimal(s, PARAMS).option


class TestAdvise:
    def _scenario(self, seed=5, signal=True):
        s = generate_scenario(PARAMS, seed)
        return adjust_threats_for_kind(s, PARAMS, signal)

    def test_perfect_reliability_matches_optimum(self):
        rng = random.Random(0)
        sched = ReliabilitySchedule(rate=1.0)
        for trial in range(1, 30):
            s = self._scenario(seed=trial)
            adv = advise(s, AutomationLevel.HIGH_DECISION, sched, trial, rng, PARAMS)
            assert adv.correct
            assert adv.recommended_option == solve_optimal(s, PARAMS).option

    def test_first_failure_schedule(self):
        rng = random.Random(1)
        sched = ReliabilitySchedule(rate=1.0, first_failure_trial=11)
        s = self._scenario()
        results = [
            advise(s, AutomationLevel.LOW_DECISION, sched, t, rng, PARAMS).correct
            for t in range(1, 16)
        ]
        assert results[:10] == [True] * 10
        assert results[10] is False

    def test_incorrect_signal_advice_is_second_best(self):
        rng = random.Random(2)
        sched = ReliabilitySchedule(rate=0.0)
        s = self._scenario(signal=True)
        adv = advise(s, AutomationLevel.HIGH_DECISION, sched, 1, rng, PARAMS)
        assert not adv.correct
        assert adv.recommended_option == ranked_pairs(s, PARAMS)[1].option

    def test_incorrect_noise_advice_recommends_engagement(self):
        rng = random.Random(3)
        sched = ReliabilitySchedule(rate=0.0)
        s = self._scenario(signal=False)
        adv = advise(s, AutomationLevel.MEDIUM_DECISION, sched, 1, rng, PARAMS)
        assert not adv.correct
        assert adv.recommended_action == "engage"

    def test_single_pair_incorrect_advice_declines(self):
        params = TaskParams(n_enemies=1, n_friendlies=1)
        s = adjust_threats_for_kind(generate_scenario(params, 4), params, True)
        adv = advise(
            s, AutomationLevel.HIGH_DECISION, ReliabilitySchedule(rate=0.0), 1,
            random.Random(4), params,
        )
        assert not adv.correct
        assert adv.recommended_action == "decline"

    def test_content_shapes(self):
        rng = random.Random(5)
        sched = ReliabilitySchedule(rate=1.0)
        s = self._scenario()
        n_pairs = len(ranked_pairs(s, PARAMS))
        low = advise(s, AutomationLevel.LOW_DECISION, sched, 1, rng, PARAMS)
        assert len(low.pairs) == n_pairs
        med = advise(s, AutomationLevel.MEDIUM_DECISION, sched, 1, rng, PARAMS)
        assert len(med.pairs) == min(3, n_pairs)
        high = advise(s, AutomationLevel.HIGH_DECISION, sched, 1, rng, PARAMS)
        assert len(high.pairs) == 1

    def test_information_level_always_truthful(self):
        rng = random.Random(6)
        sched = ReliabilitySchedule(rate=0.0)  # would falsify decision levels
        s = self._scenario()
        adv = advise(s, AutomationLevel.INFORMATION, sched, 1, rng, PARAMS)
        assert adv.correct
        assert adv.recommended_action is None
        assert len(adv.distances) == len(s.enemies) * len(s.friendlies)
        for row in adv.distances:
            e = next(x for x in s.enemies if x.id == row["enemy"])
            f = next(x for x in s.friendlies if x.id == row["friendly"])
            assert row["distance"] == pytest.approx(math.dist((e.x, e.y), (f.x, f.y)), abs=1e-5)

    def test_calibration_seeded(self):
        rng = random.Random(derive_seed(20240101, "calibration"))
        sched = ReliabilitySchedule(rate=0.8)
        s = self._scenario()
        n = 10_000
        correct = sum(
            advise(s, AutomationLevel.HIGH_DECISION, sched, t, rng, PARAMS).correct
            for t in range(1, n + 1)
        )
        assert 0.79 <= correct / n <= 0.81


class TestRunSession:
    def test_byte_identical_determinism(self):
        args = dict(
            params=PARAMS,
            level=AutomationLevel.MEDIUM_DECISION,
            schedule=ReliabilitySchedule(rate=0.8),
            agent_spec=AgentSpec("c", "compliant"),
            n_trials=12,
            seed=99,
        )
        a = serialize_session(run_session(**args))
        b = serialize_session(run_session(**args))
        assert a == b

    def test_ingest_round_trip(self):
        from haibench.events import ingest_log

        session = run_session(
            PARAMS,
            AutomationLevel.LOW_DECISION,
            ReliabilitySchedule(rate=0.7),
            AgentSpec("c", "compliant"),
            6,
            123,
        )
        assert ingest_log(serialize_session(session)) == session

    def _accuracy(self, session):
        feedback = [
            ev.payload["correct"]
            for ev in session.events
            if ev.kind is EventKind.FEEDBACK
        ]
        return sum(feedback) / len(feedback)

    def _advice_correct_fraction(self, session):
        flags = [
            ev.payload["correct"]
            for ev in session.events
            if ev.kind is EventKind.ADVICE
        ]
        return sum(flags) / len(flags)

    def test_compliant_perfect_reliability_is_perfect(self):
        s = run_session(
            PARAMS,
            AutomationLevel.HIGH_DECISION,
            ReliabilitySchedule(rate=1.0),
            AgentSpec("c", "compliant"),
            20,
            7,
        )
        assert self._accuracy(s) == 1.0

    def test_compliant_accuracy_equals_advisor_correctness(self):
        for level in (AutomationLevel.LOW_DECISION, AutomationLevel.HIGH_DECISION):
            s = run_session(
                PARAMS,
                level,
                ReliabilitySchedule(rate=0.7),
                AgentSpec("c", "compliant"),
                30,
                11,
            )
            assert self._accuracy(s) == self._advice_correct_fraction(s)

    def test_compliant_first_error_at_scheduled_trial(self):
        k = 6
        s = run_session(
            PARAMS,
            AutomationLevel.HIGH_DECISION,
            ReliabilitySchedule(rate=1.0, first_failure_trial=k),
            AgentSpec("c", "compliant"),
            10,
            13,
        )
        per_trial = {
            ev.trial_id: ev.payload["correct"]
            for ev in s.events
            if ev.kind is EventKind.FEEDBACK
        }
        first_error = min(t for t, ok in per_trial.items() if not ok)
        assert first_error == k

    def test_noiseless_manual_is_perfect_regardless_of_advisor(self):
        for rate in (0.0, 0.5, 1.0):
            s = run_session(
                PARAMS,
                AutomationLevel.HIGH_DECISION,
                ReliabilitySchedule(rate=rate),
                AgentSpec("m", "manual", noise=0.0),
                15,
                21,
            )
            assert self._accuracy(s) == 1.0

    def test_manual_accuracy_independent_of_schedule(self):
        spec = AgentSpec("m", "manual", noise=0.0)
        accs = set()
        for rate in (0.2, 0.9):
            s = run_session(
                PARAMS, AutomationLevel.LOW_DECISION, ReliabilitySchedule(rate=rate),
                spec, 15, 33,
            )
            accs.add(self._accuracy(s))
        assert accs == {1.0}

    def test_level_none_emits_no_advice(self):
        s = run_session(
            PARAMS, None, ReliabilitySchedule(rate=1.0), AgentSpec("m", "manual"), 5, 3
        )
        assert not [ev for ev in s.events if ev.kind is EventKind.ADVICE]
        assert s.config_ref["level"] is None

    def test_compliant_high_faster_than_manual_matched(self):
        rt = dict(rt_median_ms=900.0, rt_sigma=0.35, rt_per_option=0.1)
        compliant_rts, manual_rts = [], []
        for i in range(30):
            seed = derive_seed(5150, f"rt:{i}")
            for spec, sink in (
                (AgentSpec("c", "compliant", **rt), compliant_rts),
                (AgentSpec("m", "manual", noise=0.05, **rt), manual_rts),
            ):
                s = run_session(
                    PARAMS,
                    AutomationLevel.HIGH_DECISION,
                    ReliabilitySchedule(rate=0.8),
                    spec,
                    10,
                    seed,
                )
                trials = {}
                for ev in s.events:
                    if ev.kind is EventKind.STIMULUS and ev.payload.get("task") == "engagement":
                        trials[ev.trial_id] = ev.t
                    elif ev.kind is EventKind.OPERATOR_ACTION and ev.payload.get("action") != "probe":
                        sink.append(ev.t - trials[ev.trial_id])
        assert statistics.mean(compliant_rts) < statistics.mean(manual_rts)

    def test_questionnaire_emitted_and_synthetic(self):
        s = run_session(
            PARAMS, AutomationLevel.HIGH_DECISION, ReliabilitySchedule(rate=0.8),
            AgentSpec("c", "compliant"), 8, 17,
        )
        names = {item.name for item in s.questionnaire}
        assert {"workload", "trust", "self_confidence", "clarity"} <= names
        q_events = [ev for ev in s.events if ev.kind is EventKind.QUESTIONNAIRE]
        assert all(ev.payload.get("source") == "scripted" for ev in q_events)

    def test_ground_truth_key_round_trip(self):
        s = run_session(
            PARAMS, AutomationLevel.LOW_DECISION, ReliabilitySchedule(rate=0.9),
            AgentSpec("c", "compliant"), 12, 29,
        )
        key = ground_truth_key(s)
        assert set(key) == set(range(1, 13))
        assert {k.label for k in key.values()} == {"signal", "noise"}


class TestAgents:
    def test_calibrated_trust_bounds_and_decrease(self):
        spec = AgentSpec("k", "calibrated", trust_init=0.5, trust_step=0.2)
        agent = make_agent(spec, PARAMS, random.Random(1))
        assert isinstance(agent, CalibratedAgent)
        trust_before = agent.trust
        agent.observe_feedback(correct=False, advice_correct=False)
        assert agent.trust == pytest.approx(trust_before - 0.2)
        for _ in range(20):
            agent.observe_feedback(correct=False, advice_correct=False)
            assert 0.0 <= agent.trust <= 1.0
        for _ in range(20):
            agent.observe_feedback(correct=True, advice_correct=True)
            assert 0.0 <= agent.trust <= 1.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            AgentSpec("x", "psychic")

    def test_anchored_between_manual_and_compliant(self):
        # With unreliable advice the anchored agent should land strictly
        # between the always-following and never-following profiles.
        def acc(kind, **kw):
            vals = []
            for i in range(20):
                s = run_session(
                    PARAMS,
                    AutomationLevel.HIGH_DECISION,
                    ReliabilitySchedule(rate=0.5),
                    AgentSpec("a", kind, **kw),
                    15,
                    derive_seed(606, f"{kind}:{i}"),
                )
                feedback = [
                    ev.payload["correct"]
                    for ev in s.events
                    if ev.kind is EventKind.FEEDBACK
                ]
                vals.append(sum(feedback) / len(feedback))
            return statistics.mean(vals)

        compliant = acc("compliant")
        anchored = acc("anchored", anchor_prob=0.5)
        manual = acc("manual", noise=0.0)
        assert compliant < anchored < manual
