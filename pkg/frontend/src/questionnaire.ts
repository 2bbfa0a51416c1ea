// Post-block questionnaire model: workload, trust and self-confidence on
// the 1-7 scale. Submission is blocked until every item is answered;
// values post verbatim.

import type { LikertItem } from "./types.js";

export const QUESTIONNAIRE_ITEMS = ["workload", "trust", "self_confidence"] as const;

export const LIKERT_MIN = 1;
export const LIKERT_MAX = 7;

export class QuestionnaireForm {
  private values = new Map<string, number>();

  constructor(readonly items: readonly string[] = QUESTIONNAIRE_ITEMS) {}

  set(name: string, value: number): void {
    if (!this.items.includes(name)) {
      throw new Error(`unknown questionnaire item ${name}`);
    }
    if (!Number.isInteger(value) || value < LIKERT_MIN || value > LIKERT_MAX) {
      throw new Error(`value for ${name} must be an integer in ${LIKERT_MIN}-${LIKERT_MAX}`);
    }
    this.values.set(name, value);
  }

  get(name: string): number | undefined {
    return this.values.get(name);
  }

  missing(): string[] {
    return this.items.filter((name) => !this.values.has(name));
  }

  isComplete(): boolean {
    return this.missing().length === 0;
  }

  /** Payload for POST /questionnaire; throws while any item is missing. */
  payload(): LikertItem[] {
    const missing = this.missing();
    if (missing.length > 0) {
      throw new Error(`unanswered items: ${missing.join(", ")}`);
    }
    return this.items.map((name) => ({ name, value: this.values.get(name)! }));
  }
}
