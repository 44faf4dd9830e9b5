// DOM wiring: the only module that touches the document. One in-flight
// explanation at a time; newer submissions abort and supersede older ones.

import { Client, ServiceError } from "./api.js";
import {
  applyClassification,
  applyError,
  applyExplanation,
  controlsPayload,
  draftIssues,
  initSession,
  instancePayload,
  selectResult,
  setDirection,
  setField,
  SessionState,
  toggleMutable,
} from "./state.js";
import {
  renderAlreadyDesired,
  renderClassification,
  renderExplanation,
  renderForm,
  renderStatus,
  escapeHtml,
} from "./render.js";

const client = new Client("");
let state: SessionState | null = null;
let inFlight: AbortController | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function paint(): void {
  if (!state) return;
  el("form").innerHTML = renderForm(state);
  el("status").innerHTML = renderStatus(state);
  el("classification").innerHTML = renderClassification(state);
  el("explanation").innerHTML = renderExplanation(state);
  const issues = draftIssues(state);
  const button = el("explain") as HTMLButtonElement;
  button.disabled = issues.length > 0 || state.inFlight;
  el("issues").innerHTML = issues
    .map(
      (issue) =>
        `<div class="issue">${escapeHtml(issue.feature)}: ${escapeHtml(issue.message)}</div>`,
    )
    .join("");
}

function update(next: SessionState): void {
  state = next;
  paint();
}

function edited(next: SessionState): void {
  // an edit invalidates whatever is in flight: its results would no longer
  // correspond to the instance and toggles on screen
  inFlight?.abort();
  update({ ...next, inFlight: false });
}

async function explore(): Promise<void> {
  if (!state || draftIssues(state).length > 0) return;
  inFlight?.abort();
  const controller = new AbortController();
  inFlight = controller;
  update({ ...state, inFlight: true, classification: null, explanation: null });
  const instance = instancePayload(state);
  const controls = controlsPayload(state);
  try {
    const classification = await client.classify(instance, controller.signal);
    if (controller.signal.aborted || !state) return;
    update(applyClassification({ ...state, inFlight: true }, classification));
    const explanation = await client.interpolant(
      instance,
      controls,
      controller.signal,
    );
    if (controller.signal.aborted || !state) return;
    update({ ...applyExplanation(state, explanation), inFlight: false });
  } catch (err) {
    if (controller.signal.aborted || !state) return;
    if (err instanceof ServiceError && err.code === "already_desired") {
      const label = state.classification?.label ?? "desired";
      update({ ...state, inFlight: false, error: null });
      el("explanation").innerHTML = renderAlreadyDesired(label);
      return;
    }
    update(applyError(state, err instanceof Error ? err.message : String(err)));
  }
}

function bind(): void {
  const form = el("form");
  form.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (!state) return;
    const field = target.getAttribute("data-field");
    if (field) {
      edited(setField(state, field, (target as HTMLInputElement).value));
      return;
    }
    const direction = target.getAttribute("data-direction");
    if (direction) {
      const value = (target as HTMLSelectElement).value as
        | "free"
        | "increase"
        | "decrease";
      edited(setDirection(state, direction, value));
    }
  });
  form.addEventListener("input", (event) => {
    const target = event.target as HTMLElement;
    if (!state) return;
    const field = target.getAttribute("data-field");
    if (field && target.tagName === "INPUT") {
      edited(setField(state, field, (target as HTMLInputElement).value));
    }
  });
  form.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (!state) return;
    const lock = target.getAttribute("data-lock");
    if (lock) edited(toggleMutable(state, lock));
  });
  el("explanation").addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest("[data-result]");
    if (row && state) {
      update(selectResult(state, Number(row.getAttribute("data-result"))));
    }
  });
  el("explain").addEventListener("click", () => {
    void explore();
  });
}

async function boot(): Promise<void> {
  try {
    const schema = await client.getSchema();
    update(initSession(schema));
    bind();
  } catch (err) {
    el("status").innerHTML =
      `<div class="banner error">could not load schema: ` +
      `${escapeHtml(err instanceof Error ? err.message : String(err))}</div>`;
  }
}

void boot();
