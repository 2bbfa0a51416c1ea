// Trial state machine: gates decisions on render completion, enforces the
// one-decision-per-trial invariant, and builds the exact event payloads
// the scoring pipeline expects. Pure logic, no DOM.

import { SessionClock } from "./clock.js";
import type { AdviceView, ClientEvent, ScenarioView, TrialView } from "./types.js";

export type Selection =
  | { action: "engage"; enemy: string; friendly: string }
  | { action: "decline" };

export function pairCount(scenario: ScenarioView): number {
  return scenario.enemies.length * scenario.friendlies.length;
}

/** The advice panel must be shaped exactly by its level: a distance table
 * and no recommendations for information support, the full prioritized
 * list, the top three, or a single option for the decision levels. */
export function validateAdviceShape(advice: AdviceView, scenario: ScenarioView): void {
  const n = pairCount(scenario);
  switch (advice.level) {
    case "information":
      if (advice.pairs.length !== 0 || (advice.distances ?? []).length !== n) {
        throw new Error("information advice must be a full distance table");
      }
      if (advice.recommended_action) {
        throw new Error("information advice cannot recommend");
      }
      return;
    case "low_decision":
      if (advice.pairs.length !== n) {
        throw new Error(`low_decision advice must rank all ${n} options`);
      }
      break;
    case "medium_decision":
      if (advice.pairs.length !== Math.min(3, n)) {
        throw new Error("medium_decision advice must show the top three options");
      }
      break;
    case "high_decision":
      if (advice.pairs.length !== 1) {
        throw new Error("high_decision advice must show a single option");
      }
      break;
    default:
      throw new Error(`unknown advice level ${(advice as AdviceView).level}`);
  }
  if (!advice.recommended_action) {
    throw new Error("decision-level advice must carry a recommendation");
  }
}

export class TrialController {
  private rendered = false;
  private decided = false;
  private probeShown = false;
  private probeAnswered = false;

  constructor(
    readonly view: TrialView,
    private readonly clock: SessionClock,
  ) {
    validateAdviceShape(view.advice, view.scenario);
  }

  /** Call when the stimulus has actually painted; decisions are disabled
   * until then, which anchors reaction time at render completion. */
  markRendered(): void {
    this.rendered = true;
  }

  canDecide(): boolean {
    return this.rendered && !this.decided;
  }

  hasDecided(): boolean {
    return this.decided;
  }

  /** Build the single decision event for this trial. Returns null if the
   * trial is not yet rendered or was already decided (double submissions
   * are dropped client-side). */
  decide(selection: Selection): ClientEvent | null {
    if (!this.canDecide()) return null;
    this.decided = true;
    const payload: Record<string, unknown> =
      selection.action === "engage"
        ? {
            action: "engage",
            option: `${selection.enemy}:${selection.friendly}`,
            enemy: selection.enemy,
            friendly: selection.friendly,
            action_id: `d${this.view.trial}`,
          }
        : { action: "decline", option: "none", action_id: `d${this.view.trial}` };
    return {
      kind: "operator_action",
      t: this.clock.now(),
      trial: this.view.trial,
      payload,
    };
  }

  /** Probe onset event; emit when the probe prompt is shown. */
  showProbe(): ClientEvent | null {
    if (!this.view.probe || this.probeShown) return null;
    this.probeShown = true;
    return {
      kind: "stimulus",
      t: this.clock.now(),
      trial: this.view.trial,
      payload: { task: "probe", prompt: this.view.probe.prompt },
    };
  }

  /** The probe acknowledgement; one per trial. */
  answerProbe(): ClientEvent | null {
    if (!this.view.probe || !this.probeShown || this.probeAnswered) return null;
    this.probeAnswered = true;
    return {
      kind: "operator_action",
      t: this.clock.now(),
      trial: this.view.trial,
      payload: {
        action: "probe",
        response: this.view.probe.expected,
        action_id: `p${this.view.trial}`,
      },
    };
  }
}
