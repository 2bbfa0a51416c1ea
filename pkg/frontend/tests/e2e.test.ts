// End-to-end: drive a scripted session through the real session service
// with a 300 ms injected action->response delay on every operator action,
// then score the recorded log through the same pipeline as scripted
// agents and check the server-computed operational latency and that every
// selected metric field is populated.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { TrialController } from "../src/trial.js";
import type { ClientEvent, TrialView } from "../src/types.js";

const PORT = 8875 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;
const INJECTED_DELAY_MS = 300;
const N_TRIALS = 6;

// Session-level metric groups; design-level groups (inventory, composite,
// weighted_failure) are benchmark-run metrics, not per-log ones.
const SELECTED = [
  "accuracy",
  "response_time",
  "sdt",
  "ndm",
  "coherence",
  "cct",
  "lens",
  "classification",
  "probe",
  "questionnaire",
  "ol",
  "csi",
  "ccs",
  "alignment",
];

// master_seed chosen so the first served session mixes signal and noise
// trials (3/3 over 6), which the detection metrics require.
const CONFIG = {
  master_seed: 777001,
  sessions_per_cell: 1,
  n_trials: N_TRIALS,
  levels: ["high_decision"],
  schedules: [{ label: "r80", rate: 0.8 }],
  agents: [{ name: "compliant", kind: "compliant" }],
  metrics: { select: SELECTED },
  serve: {
    level: "high_decision",
    schedule: { rate: 0.8 },
    n_trials: N_TRIALS,
    timestamp_tolerance_ms: 2000,
  },
};

let workDir: string;
let configPath: string;
let server: ChildProcess | null = null;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Sleep to a precise wall-clock target: coarse timer, then a short spin. */
async function preciseSleep(ms: number): Promise<void> {
  const target = performance.now() + ms;
  const coarse = ms - 10;
  if (coarse > 0) await sleep(coarse);
  while (performance.now() < target) {
    /* spin for the last few ms */
  }
}

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/sessions/probe/trials/1`);
      if (res.status === 404) return; // structured 404 means the app is up
    } catch {
      // not listening yet
    }
    await sleep(200);
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "haibench-ui-"));
  configPath = join(workDir, "config.json");
  writeFileSync(configPath, JSON.stringify(CONFIG, null, 2));
  server = spawn(
    "python3",
    [
      "-m",
      "haibench.cli",
      "serve",
      "--config",
      configPath,
      "--bind",
      `127.0.0.1:${PORT}`,
      "--out",
      workDir,
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", (chunk: Buffer) => {
    process.stderr.write(chunk);
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

// Running estimate of the post-to-server-stamp overhead, calibrated from
// the server-stamped response events each post returns. Subtracting it
// from the wait makes the realized action-to-response delay converge on
// the nominal injected value instead of drifting high with machine load.
let overheadEstimateMs = 2;

async function postWithInjectedDelay(api: ApiClient, event: ClientEvent): Promise<void> {
  // The event keeps its original timestamp; the post is delayed so the
  // server's response stamp lands the injected delay after the action.
  const waitMs = event.t + INJECTED_DELAY_MS - api.clock.now() - overheadEstimateMs;
  if (waitMs > 0) await preciseSleep(waitMs);
  const res = await api.postEvents([event]);
  expect(res).not.toBeNull();
  const response = res!.appended.find((e) => e.kind === "system_response");
  if (response) {
    const realized = response.t - event.t;
    overheadEstimateMs = Math.min(
      15,
      Math.max(0, overheadEstimateMs + 0.5 * (realized - INJECTED_DELAY_MS)),
    );
  }
}

// Scripted think time between a stimulus and its action. The clock skew
// after midpoint anchoring is bounded by half an RTT, so any think time
// comfortably above that keeps decision times positive, as they are for
// any human operator.
const THINK_MS = 50;

async function runScriptedSession(api: ApiClient): Promise<string> {
  const created = await api.createSession("e2e-bot");
  expect(created.n_trials).toBe(N_TRIALS);
  let view: TrialView = created.trial;
  for (let trial = 1; trial <= N_TRIALS; trial++) {
    if (trial > 1) view = await api.getTrial(trial);
    const controller = new TrialController(view, api.clock);
    controller.markRendered();
    const advice = view.advice;
    expect(advice).not.toHaveProperty("correct"); // ground truth stays server-side
    await sleep(THINK_MS);
    const decision =
      advice.recommended_action === "engage" && advice.recommended_option
        ? controller.decide({
            action: "engage",
            enemy: advice.recommended_option.split(":")[0],
            friendly: advice.recommended_option.split(":")[1],
          })
        : controller.decide({ action: "decline" });
    expect(decision).not.toBeNull();
    await postWithInjectedDelay(api, decision!);

    // The probe prompt renders before it can be seen, so its onset also
    // trails the server-stamped feedback by at least a frame.
    await sleep(THINK_MS);
    const probeOnset = controller.showProbe();
    expect(probeOnset).not.toBeNull();
    await api.postEvents([probeOnset!]);
    await sleep(THINK_MS);
    const probeAnswer = controller.answerProbe();
    expect(probeAnswer).not.toBeNull();
    await postWithInjectedDelay(api, probeAnswer!);
  }
  await api.postQuestionnaire([
    { name: "workload", value: 3 },
    { name: "trust", value: 5 },
    { name: "self_confidence", value: 6 },
  ]);
  const done = await api.complete();
  return done.log_path;
}

function scoreLog(logPath: string): Record<string, unknown> {
  const res = spawnSync(
    "python3",
    ["-m", "haibench.cli", "score", logPath, "--config", configPath],
    { encoding: "utf-8", maxBuffer: 64 * 1024 * 1024 },
  );
  expect(res.status, res.stderr).toBe(0);
  return JSON.parse(res.stdout);
}

describe("human-session end-to-end path", () => {
  it(
    "yields server-computed latency equal to the injected delay and scores " +
      "through the scripted pipeline with every selected metric populated",
    async () => {
      // One throwaway request keeps connection setup out of the anchoring
      // round trip.
      await fetch(`${BASE}/sessions/warmup/trials/1`).catch(() => undefined);
      const api = new ApiClient(BASE);
      const logPath = await runScriptedSession(api);

      const report = scoreLog(logPath) as {
        sessions: {
          subject_kind: string;
          metrics: Record<string, number | null>;
          errors: Record<string, string>;
        }[];
        aggregate: { extras: Record<string, number> };
        metric_selection: string[];
      };
      expect(report.metric_selection).toEqual([...SELECTED].sort());
      const session = report.sessions[0];
      expect(session.subject_kind).toBe("human");
      // The questionnaire posts exactly workload/trust/self-confidence, so
      // the user-score clarity variant has no input; that is the only
      // allowed per-field note.
      expect(Object.keys(session.errors)).toEqual(["ccs.ccs2"]);

      const m = session.metrics;
      expect(m["ol.mean_ms"]).not.toBeNull();
      expect(m["ol.mean_ms"]!).toBeGreaterThanOrEqual(INJECTED_DELAY_MS - 5);
      expect(m["ol.mean_ms"]!).toBeLessThanOrEqual(INJECTED_DELAY_MS + 5);

      for (const key of [
        "accuracy",
        "mean_rt_ms",
        "sdt.score",
        "sdt.d_prime",
        "sdt.c",
        "ndm.score",
        "ndm.mean_speed",
        "coherence.score",
        "coherence.b_assessment",
        "cct.score",
        "cct.normalized",
        "lens.score",
        "lens.e_validity",
        "classification.accuracy",
        "classification.cumulative_reward",
        "probe.accuracy",
        "probe.mean_rt_ms",
        "questionnaire.workload",
        "questionnaire.trust",
        "questionnaire.self_confidence",
        "ol.mean_ms",
        "csi",
        "ccs.ccs1",
      ]) {
        expect(m[key], key).not.toBeNull();
        expect(m[key], key).not.toBeUndefined();
      }
      // The compliant scripted driver always follows advice, so the
      // reliance heuristic is defined at the aggregate level too.
      expect(report.aggregate.extras["alignment.AS"]).not.toBeUndefined();

      // Questionnaire values round-trip verbatim.
      expect(m["questionnaire.workload"]).toBe(3);
      expect(m["questionnaire.trust"]).toBe(5);
      expect(m["questionnaire.self_confidence"]).toBe(6);
    },
  );

  it("rejects a regressing timestamp with a structured error", async () => {
    const api = new ApiClient(BASE);
    await api.createSession("e2e-regression");
    await api.postEvents([
      { kind: "stimulus", t: 500_000, trial: 1, payload: { task: "probe" } },
    ]);
    await expect(
      api.postEvents([
        { kind: "stimulus", t: 1, trial: 1, payload: { task: "probe" } },
      ]),
    ).rejects.toMatchObject({ code: "timestamp_regression" });
  });
});
