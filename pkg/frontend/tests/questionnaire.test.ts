import { describe, expect, it } from "vitest";

import { QUESTIONNAIRE_ITEMS, QuestionnaireForm } from "../src/questionnaire.js";

describe("questionnaire form", () => {
  it("blocks submission until every item is answered", () => {
    const form = new QuestionnaireForm();
    expect(form.isComplete()).toBe(false);
    expect(() => form.payload()).toThrow(/unanswered/);
    form.set("workload", 4);
    form.set("trust", 4);
    expect(form.missing()).toEqual(["self_confidence"]);
    form.set("self_confidence", 4);
    expect(form.isComplete()).toBe(true);
  });

  it("posts values verbatim in declared order", () => {
    const form = new QuestionnaireForm();
    form.set("trust", 2);
    form.set("self_confidence", 7);
    form.set("workload", 5);
    expect(form.payload()).toEqual([
      { name: "workload", value: 5 },
      { name: "trust", value: 2 },
      { name: "self_confidence", value: 7 },
    ]);
    expect(QUESTIONNAIRE_ITEMS).toEqual(["workload", "trust", "self_confidence"]);
  });

  it("rejects out-of-scale and non-integer values", () => {
    const form = new QuestionnaireForm();
    expect(() => form.set("workload", 0)).toThrow(/1-7/);
    expect(() => form.set("workload", 8)).toThrow(/1-7/);
    expect(() => form.set("workload", 3.5)).toThrow(/1-7/);
    expect(() => form.set("mystery", 4)).toThrow(/unknown/);
  });
});
