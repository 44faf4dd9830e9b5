// Session state and its pure transitions. Results always correspond to the
// instance and toggles they were computed from: any edit clears them.

import type {
  ClassifyResponse,
  Feature,
  InterpolantResponse,
  Policy,
  Schema,
} from "./api.js";

export type Direction = "free" | "increase" | "decrease";

export type FeatureControl = {
  mutable: boolean;
  direction: Direction; // meaningful only for numeric features
};

export type SessionState = {
  schema: Schema;
  draft: Record<string, string>; // raw input text per feature
  controls: Record<string, FeatureControl>;
  classification: ClassifyResponse | null;
  explanation: InterpolantResponse | null;
  selectedResult: number;
  error: string | null;
  inFlight: boolean;
};

export function initSession(schema: Schema): SessionState {
  const draft: Record<string, string> = {};
  const controls: Record<string, FeatureControl> = {};
  for (const feature of schema.features) {
    draft[feature.name] =
      feature.kind === "categorical" ? feature.values[0] ?? "" : "";
    controls[feature.name] = { mutable: true, direction: "free" };
  }
  return {
    schema,
    draft,
    controls,
    classification: null,
    explanation: null,
    selectedResult: 0,
    error: null,
    inFlight: false,
  };
}

function cleared(state: SessionState): SessionState {
  // stale results cleared on edit: displayed results must always match the
  // instance and controls shown
  return {
    ...state,
    classification: null,
    explanation: null,
    selectedResult: 0,
    error: null,
  };
}

export function setField(
  state: SessionState,
  name: string,
  value: string,
): SessionState {
  if (!(name in state.draft)) return state;
  return cleared({ ...state, draft: { ...state.draft, [name]: value } });
}

export function toggleMutable(state: SessionState, name: string): SessionState {
  const control = state.controls[name];
  if (!control) return state;
  return cleared({
    ...state,
    controls: {
      ...state.controls,
      [name]: { ...control, mutable: !control.mutable },
    },
  });
}

export function setDirection(
  state: SessionState,
  name: string,
  direction: Direction,
): SessionState {
  const feature = state.schema.features.find((f) => f.name === name);
  const control = state.controls[name];
  if (!feature || !control) return state;
  if (feature.kind !== "numeric" && direction !== "free") {
    return state; // direction toggles only exist on numeric features
  }
  return cleared({
    ...state,
    controls: { ...state.controls, [name]: { ...control, direction } },
  });
}

export type DraftIssue = { feature: string; message: string };

export function draftIssues(state: SessionState): DraftIssue[] {
  const issues: DraftIssue[] = [];
  for (const feature of state.schema.features) {
    const text = (state.draft[feature.name] ?? "").trim();
    if (text === "") {
      issues.push({ feature: feature.name, message: "required" });
      continue;
    }
    if (feature.kind === "numeric") {
      const value = Number(text);
      if (!Number.isFinite(value)) {
        issues.push({ feature: feature.name, message: "not a number" });
      } else {
        const lo = feature.min / 10 ** feature.scale;
        const hi = feature.max / 10 ** feature.scale;
        if (value < lo || value > hi) {
          issues.push({
            feature: feature.name,
            message: `must be in [${lo}, ${hi}]`,
          });
        }
      }
    } else if (!feature.values.includes(text)) {
      issues.push({ feature: feature.name, message: "not in domain" });
    }
  }
  return issues;
}

export function instancePayload(
  state: SessionState,
): Record<string, string | number> {
  const out: Record<string, string | number> = {};
  for (const feature of state.schema.features) {
    const text = (state.draft[feature.name] ?? "").trim();
    out[feature.name] = feature.kind === "numeric" ? Number(text) : text;
  }
  return out;
}

export function controlsPayload(state: SessionState): Record<string, Policy> {
  const out: Record<string, Policy> = {};
  for (const feature of state.schema.features) {
    const control = state.controls[feature.name];
    if (!control.mutable) {
      out[feature.name] = "immutable";
    } else if (feature.kind === "numeric" && control.direction !== "free") {
      out[feature.name] = control.direction;
    }
  }
  return out;
}

export function applyClassification(
  state: SessionState,
  classification: ClassifyResponse,
): SessionState {
  return { ...state, classification, error: null };
}

export function applyExplanation(
  state: SessionState,
  explanation: InterpolantResponse,
): SessionState {
  return { ...state, explanation, selectedResult: 0, error: null };
}

export function applyError(state: SessionState, message: string): SessionState {
  return { ...state, error: message, inFlight: false };
}

export function selectResult(state: SessionState, index: number): SessionState {
  return { ...state, selectedResult: index };
}

export function featureByName(schema: Schema, name: string): Feature | undefined {
  return schema.features.find((f) => f.name === name);
}
