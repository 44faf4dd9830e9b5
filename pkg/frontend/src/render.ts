// Pure HTML builders. Values are inserted exactly as the API returned them
// (numbers via String(), symbols verbatim) so what the user reads is what
// the service computed.

import type { CfeResultPayload, JustificationNode, Schema } from "./api.js";
import type { SessionState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function show(value: string | number): string {
  return escapeHtml(typeof value === "number" ? String(value) : value);
}

export function renderForm(state: SessionState): string {
  const { features } = state.schema;
  if (features.length === 0) {
    return '<p class="empty">No features in this schema.</p>';
  }
  const rows = features.map((feature) => {
    const control = state.controls[feature.name];
    const name = escapeHtml(feature.name);
    let input: string;
    if (feature.kind === "categorical") {
      const options = feature.values
        .map((v) => {
          const selected = state.draft[feature.name] === v ? " selected" : "";
          return `<option value="${escapeHtml(v)}"${selected}>${escapeHtml(v)}</option>`;
        })
        .join("");
      input = `<select data-field="${name}">${options}</select>`;
    } else {
      const lo = feature.min / 10 ** feature.scale;
      const hi = feature.max / 10 ** feature.scale;
      const value = escapeHtml(state.draft[feature.name] ?? "");
      input =
        `<input type="number" data-field="${name}" min="${lo}" max="${hi}" ` +
        `value="${value}" placeholder="[${lo}, ${hi}]">`;
    }
    const lockLabel = control.mutable ? "mutable" : "immutable";
    const lock =
      `<button type="button" class="lock ${control.mutable ? "" : "locked"}" ` +
      `data-lock="${name}">${lockLabel}</button>`;
    let direction = "";
    if (feature.kind === "numeric") {
      const picks = (["free", "increase", "decrease"] as const)
        .map((d) => {
          const selected = control.direction === d ? " selected" : "";
          return `<option value="${d}"${selected}>${d}</option>`;
        })
        .join("");
      const disabled = control.mutable ? "" : " disabled";
      direction = `<select class="direction" data-direction="${name}"${disabled}>${picks}</select>`;
    }
    return (
      `<div class="field" data-row="${name}">` +
      `<label>${name}</label>${input}${lock}${direction}</div>`
    );
  });
  return rows.join("\n");
}

export function renderTree(node: JustificationNode): string {
  const goal = escapeHtml(node.goal);
  const outcome = escapeHtml(node.outcome);
  if (node.children.length === 0) {
    return `<li><span class="goal">${goal}</span> <span class="outcome">${outcome}</span></li>`;
  }
  const children = node.children.map(renderTree).join("");
  return (
    `<li><details><summary><span class="goal">${goal}</span> ` +
    `<span class="outcome">${outcome}</span></summary><ul>${children}</ul></details></li>`
  );
}

export function renderClassification(state: SessionState): string {
  const classification = state.classification;
  if (!classification) return "";
  const label = escapeHtml(classification.label);
  return (
    `<div class="classification">prediction: <strong>${label}</strong></div>` +
    `<ul class="proof">${renderTree(classification.justification)}</ul>`
  );
}

export function renderResultsTable(schema: Schema, results: CfeResultPayload[],
                                   selected: number): string {
  const header =
    "<tr><th>#</th><th>cost</th>" +
    schema.features.map((f) => `<th>${escapeHtml(f.name)}</th>`).join("") +
    "</tr>";
  const rows = results.map((result, index) => {
    const cells = schema.features.map((feature) => {
      const name = feature.name;
      const changed = result.controls[name] !== 0;
      const pre = result.factual[name];
      const post = result.counterfactual.values[name];
      if (!changed) {
        return `<td>${show(pre)}</td>`;
      }
      const interval = result.counterfactual.intervals[name];
      const range =
        interval && interval[0] !== interval[1]
          ? `<span class="interval">[${show(interval[0])}, ${show(interval[1])}]</span>`
          : "";
      return (
        `<td class="changed">${show(pre)} → <strong>${show(post)}</strong>${range}</td>`
      );
    });
    const marker = index === selected ? ' class="selected"' : "";
    return (
      `<tr${marker} data-result="${index}"><td>${index + 1}</td>` +
      `<td>${result.cost}</td>${cells.join("")}</tr>`
    );
  });
  return `<table class="results">${header}${rows.join("")}</table>`;
}

export function renderExplanation(state: SessionState): string {
  const explanation = state.explanation;
  if (!explanation) return "";
  if ("no_recourse" in explanation) {
    return '<div class="banner no-recourse">No recourse: the locked features forbid every counterfactual world.</div>';
  }
  const results = explanation.results;
  const chosen = results[state.selectedResult] ?? results[0];
  const proofs = chosen
    ? `<div class="proofs"><h3>why the counterfactual flips</h3>` +
      `<ul class="proof">${renderTree(chosen.justifications.counterfactual)}</ul></div>`
    : "";
  return (
    `<div class="banner cost">minimal intervention cost X* = <strong>${explanation.cost}</strong></div>` +
    renderResultsTable(state.schema, results, state.selectedResult) +
    proofs
  );
}

export function renderStatus(state: SessionState): string {
  if (state.inFlight) return '<div class="banner pending">computing…</div>';
  if (state.error) {
    return `<div class="banner error">${escapeHtml(state.error)}</div>`;
  }
  return "";
}

export function renderAlreadyDesired(label: string): string {
  return (
    `<div class="banner success">Already classified <strong>${escapeHtml(label)}</strong>` +
    " — nothing to change.</div>"
  );
}
