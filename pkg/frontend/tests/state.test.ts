import { describe, expect, it } from "vitest";

import type { InterpolantResponse, Schema } from "../src/api.js";
import {
  applyExplanation,
  controlsPayload,
  draftIssues,
  initSession,
  instancePayload,
  setDirection,
  setField,
  toggleMutable,
} from "../src/state.js";

const schema: Schema = {
  features: [
    {
      name: "marital_status",
      kind: "categorical",
      values: ["married_civ_spouse", "divorced", "never_married"],
    },
    { name: "capital_gain", kind: "numeric", min: 0, max: 99999, scale: 0 },
    { name: "age", kind: "numeric", min: 17, max: 90, scale: 0 },
  ],
};

const explanation: InterpolantResponse = { cost: 1, results: [] };

describe("initSession", () => {
  it("seeds categorical drafts with the first domain value", () => {
    const state = initSession(schema);
    expect(state.draft.marital_status).toBe("married_civ_spouse");
    expect(state.draft.capital_gain).toBe("");
    expect(state.controls.age).toEqual({ mutable: true, direction: "free" });
  });
});

describe("editing", () => {
  it("clears stale results on any field edit", () => {
    let state = initSession(schema);
    state = applyExplanation(state, explanation);
    expect(state.explanation).not.toBeNull();
    state = setField(state, "age", "30");
    expect(state.explanation).toBeNull();
    expect(state.classification).toBeNull();
  });

  it("clears stale results on toggle edits", () => {
    let state = initSession(schema);
    state = applyExplanation(state, explanation);
    state = toggleMutable(state, "capital_gain");
    expect(state.explanation).toBeNull();
    expect(state.controls.capital_gain.mutable).toBe(false);
  });

  it("ignores unknown fields", () => {
    const state = initSession(schema);
    expect(setField(state, "nope", "1")).toBe(state);
  });

  it("rejects direction toggles on categorical features", () => {
    const state = initSession(schema);
    expect(setDirection(state, "marital_status", "increase")).toBe(state);
    const next = setDirection(state, "age", "decrease");
    expect(next.controls.age.direction).toBe("decrease");
  });
});

describe("validation", () => {
  it("flags missing and out-of-range numerics", () => {
    let state = initSession(schema);
    expect(draftIssues(state).map((i) => i.feature)).toEqual([
      "capital_gain",
      "age",
    ]);
    state = setField(state, "capital_gain", "6000");
    state = setField(state, "age", "12");
    const issues = draftIssues(state);
    expect(issues).toHaveLength(1);
    expect(issues[0]).toMatchObject({ feature: "age" });
    state = setField(state, "age", "28");
    expect(draftIssues(state)).toHaveLength(0);
  });
});

describe("payloads", () => {
  it("builds the instance with numeric coercion", () => {
    let state = initSession(schema);
    state = setField(state, "capital_gain", "6000");
    state = setField(state, "age", "28");
    state = setField(state, "marital_status", "never_married");
    expect(instancePayload(state)).toEqual({
      marital_status: "never_married",
      capital_gain: 6000,
      age: 28,
    });
  });

  it("maps toggles to control policies", () => {
    let state = initSession(schema);
    state = toggleMutable(state, "capital_gain");
    state = setDirection(state, "age", "increase");
    expect(controlsPayload(state)).toEqual({
      capital_gain: "immutable",
      age: "increase",
    });
  });

  it("locking wins over a direction toggle", () => {
    let state = initSession(schema);
    state = setDirection(state, "age", "increase");
    state = toggleMutable(state, "age");
    expect(controlsPayload(state)).toEqual({ age: "immutable" });
  });
});
