// Live flow against the real service on the adult fixture: the explorer's
// state/render pipeline must show exactly what /api/interpolant returned.

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client, ServiceError } from "../src/api.js";
import {
  applyExplanation,
  controlsPayload,
  initSession,
  instancePayload,
  setField,
  toggleMutable,
} from "../src/state.js";
import { renderExplanation, renderForm } from "../src/render.js";

const PORT = 8765 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForHealth(tries = 100): Promise<void> {
  for (let i = 0; i < tries; i++) {
    try {
      const response = await fetch(`${BASE}/api/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn("recourse", ["serve", "--fixture", "adult", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForHealth();
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("explorer flow on the adult fixture", () => {
  it("locking gain and education renders the cost-2 explanation verbatim", async () => {
    const client = new Client(BASE);
    const schema = await client.getSchema();
    let state = initSession(schema);
    expect(renderForm(state)).toContain('data-field="marital_status"');

    state = setField(state, "marital_status", "never_married");
    state = setField(state, "capital_gain", "6000");
    state = setField(state, "education_num", "4");
    state = setField(state, "relationship", "unmarried");
    state = setField(state, "sex", "male");
    state = setField(state, "age", "28");
    state = toggleMutable(state, "capital_gain");
    state = toggleMutable(state, "education_num");

    const instance = instancePayload(state);
    const controls = controlsPayload(state);
    expect(controls).toEqual({
      capital_gain: "immutable",
      education_num: "immutable",
    });

    const classification = await client.classify(instance);
    expect(classification.label).toBe("<=50K");

    const explanation = await client.interpolant(instance, controls);
    state = applyExplanation(state, explanation);
    const html = renderExplanation(state);

    if ("no_recourse" in explanation) throw new Error("expected a result");
    expect(explanation.cost).toBe(2);
    expect(html).toContain("X* = <strong>2</strong>");

    const result = explanation.results[0];
    // exactly the two changed features are highlighted
    const changed = Object.entries(result.controls)
      .filter(([, z]) => z !== 0)
      .map(([name]) => name);
    expect(changed.sort()).toEqual(["marital_status", "relationship"]);
    expect(html.match(/class="changed"/g)).toHaveLength(2);
    // every displayed value is taken verbatim from the response
    for (const [name, value] of Object.entries(result.counterfactual.values)) {
      expect(html).toContain(String(value));
      expect(String(value)).toBe(String(result.counterfactual.values[name]));
    }
    expect(html).toContain("married_civ_spouse");
    expect(html).toContain("husband");

    // the payload is stable: a second identical request returns the same bytes
    const again = await client.interpolant(instance, controls);
    expect(JSON.stringify(again)).toBe(JSON.stringify(explanation));
  });

  it("locking every feature renders the no-recourse banner", async () => {
    const client = new Client(BASE);
    const schema = await client.getSchema();
    let state = initSession(schema);
    state = setField(state, "marital_status", "never_married");
    state = setField(state, "capital_gain", "6000");
    state = setField(state, "education_num", "4");
    state = setField(state, "relationship", "unmarried");
    state = setField(state, "sex", "male");
    state = setField(state, "age", "28");
    for (const feature of schema.features) {
      state = toggleMutable(state, feature.name);
    }
    const explanation = await client.interpolant(
      instancePayload(state),
      controlsPayload(state),
    );
    expect(explanation).toEqual({ no_recourse: true });
    state = applyExplanation(state, explanation);
    expect(renderExplanation(state)).toContain("No recourse");
  });

  it("an already-desired instance surfaces as a distinct error code", async () => {
    const client = new Client(BASE);
    const schema = await client.getSchema();
    let state = initSession(schema);
    state = setField(state, "marital_status", "married_civ_spouse");
    state = setField(state, "capital_gain", "5500");
    state = setField(state, "education_num", "13");
    state = setField(state, "relationship", "husband");
    state = setField(state, "sex", "male");
    state = setField(state, "age", "40");
    const classification = await client.classify(instancePayload(state));
    expect(classification.label).toBe(">50K");
    try {
      await client.interpolant(instancePayload(state), {});
      throw new Error("expected already_desired");
    } catch (err) {
      expect(err).toBeInstanceOf(ServiceError);
      expect((err as ServiceError).code).toBe("already_desired");
    }
  });
});
