// Pure renderers: API response in, HTML string out. Numbers are printed as
// the server sent them; nothing is aggregated here.

import type { QuerySession } from "./session.js";
import type {
  ApiErrorBody,
  Comparison,
  ComparisonRow,
  CompositionPlan,
  Envelope,
  ModelBody,
  QueryPage,
} from "./types.js";
import type { WhatIfState } from "./whatif.js";

export function escapeHtml(s: string): string {
  return s.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}

function num(v: number | null | undefined): string {
  return v === null || v === undefined ? "-" : String(v);
}

function rowLabel(r: ComparisonRow): string {
  const slice = r.slice ? ` [${r.slice}]` : "";
  return `${r.metric} @ ${r.hardware} (${r.dataset}@${r.dataset_version})${slice}`;
}

// Column of the best value in a comparison row, or -1 when none is present.
export function bestIndex(row: ComparisonRow): number {
  let best = -1;
  row.values.forEach((v, i) => {
    if (v === null) return;
    const current = best < 0 ? null : row.values[best];
    if (current === null || (row.higher_is_better ? v > current : v < current)) best = i;
  });
  return best;
}

export function renderErrorAnnotation(mql: string, error: ApiErrorBody): string {
  const d = error.detail ?? {};
  const parts = [`<div class="error" data-code="${escapeHtml(error.code)}">`];
  parts.push(`<p class="message">${escapeHtml(error.message)}</p>`);
  if (d.line !== undefined && d.column !== undefined) {
    const lines = mql.split("\n");
    const line = lines[d.line - 1] ?? "";
    const col = Math.max(1, Math.min(d.column, line.length + 1));
    const before = line.slice(0, col - 1);
    const at = line.slice(col - 1).match(/^\S+/)?.[0] ?? " ";
    const after = line.slice(col - 1 + at.length);
    parts.push(
      `<pre class="source" data-line="${d.line}" data-column="${d.column}">` +
        `${escapeHtml(before)}<u class="at">${escapeHtml(at)}</u>${escapeHtml(after)}</pre>`,
    );
  }
  if (d.expected) parts.push(`<p class="expected">expected: ${d.expected.map(escapeHtml).join(", ")}</p>`);
  if (d.field) parts.push(`<p class="field">field: <code>${escapeHtml(d.field)}</code></p>`);
  parts.push("</div>");
  return parts.join("");
}

export function renderResultTable(page: QueryPage, metrics: Comparison | null = null): string {
  if (page.count === 0) return `<p class="empty">0 results</p>`;
  const models = page.results.filter((e) => e.kind === "ModelRecord");
  const keyRows = models.length === page.results.length && metrics ? metrics.rows : [];
  const column = new Map((metrics?.models ?? []).map((m, i) => [m.id, i]));
  const head = ["name", "version", "task", ...keyRows.map(rowLabel)];
  const out = [`<table class="results"><thead><tr>`];
  for (const h of head) out.push(`<th>${escapeHtml(h)}</th>`);
  out.push(`</tr></thead><tbody>`);
  for (const e of page.results) {
    const b = e.body as Record<string, unknown>;
    const id = String(b.id ?? b.iri ?? "");
    out.push(`<tr data-id="${escapeHtml(id)}">`);
    out.push(`<td>${escapeHtml(String(b.name ?? id))}</td>`);
    out.push(`<td>${escapeHtml(String(b.version ?? ""))}</td>`);
    out.push(`<td>${escapeHtml(String(b.task ?? e.kind))}</td>`);
    const col = column.get(id);
    for (const r of keyRows) out.push(`<td>${num(col === undefined ? null : r.values[col])}</td>`);
    out.push(`</tr>`);
  }
  out.push(`</tbody></table>`);
  out.push(`<p class="count">${page.count} result(s), showing ${page.offset + 1}&ndash;${page.offset + page.results.length}</p>`);
  return out.join("");
}

export function renderQueryConsole(session: QuerySession): string {
  const out = [`<section class="console">`];
  out.push(`<textarea class="mql">${escapeHtml(session.text)}</textarea>`);
  if (session.error) out.push(renderErrorAnnotation(session.text, session.error));
  else if (session.lastPage) out.push(renderResultTable(session.lastPage, session.keyMetrics));
  out.push(`<ol class="history">`);
  for (const h of session.history) {
    const tag = h.code ? escapeHtml(h.code) : `${h.count}`;
    out.push(`<li><code>${escapeHtml(h.mql)}</code> <span>${tag}</span></li>`);
  }
  out.push(`</ol></section>`);
  return out.join("");
}

export function renderCompare(c: Comparison): string {
  const out = [`<table class="compare"><thead><tr><th>metric</th>`];
  for (const m of c.models) out.push(`<th>${escapeHtml(m.name)} ${escapeHtml(m.version)}</th>`);
  out.push(`</tr></thead><tbody>`);
  for (const r of c.rows) {
    const best = bestIndex(r);
    out.push(`<tr><th>${escapeHtml(rowLabel(r))}</th>`);
    r.values.forEach((v, i) => {
      out.push(i === best ? `<td class="best">${num(v)}</td>` : `<td>${num(v)}</td>`);
    });
    out.push(`</tr>`);
  }
  out.push(`</tbody></table>`);
  return out.join("");
}

// Record fields, provenance badge, and per-hardware results taken from a
// single-model /compare response.
export function renderModelDetail(record: Envelope, runs: Comparison | null): string {
  const m = record.body as unknown as ModelBody;
  const origin = m.source?.origin ?? "manual";
  const out = [`<article class="model" data-id="${escapeHtml(m.id)}">`];
  out.push(`<h2>${escapeHtml(m.name)} <small>${escapeHtml(m.version)}</small> `);
  out.push(`<span class="badge badge-${escapeHtml(origin)}">${escapeHtml(origin)}</span></h2>`);
  out.push(`<dl>`);
  for (const key of Object.keys(m).sort()) {
    if (key === "name" || key === "version" || key === "source") continue;
    out.push(`<dt>${escapeHtml(key)}</dt><dd>${escapeHtml(JSON.stringify(m[key]))}</dd>`);
  }
  out.push(`</dl>`);
  if (runs) {
    const byHardware = new Map<string, ComparisonRow[]>();
    for (const r of runs.rows) byHardware.set(r.hardware, [...(byHardware.get(r.hardware) ?? []), r]);
    for (const hw of [...byHardware.keys()].sort()) {
      out.push(`<h3>${escapeHtml(hw)}</h3><ul class="runs">`);
      for (const r of byHardware.get(hw)!) {
        out.push(`<li>${escapeHtml(r.metric)} on ${escapeHtml(r.dataset)}@${escapeHtml(r.dataset_version)}: ${num(r.values[0])}</li>`);
      }
      out.push(`</ul>`);
    }
  }
  out.push(`</article>`);
  return out.join("");
}

function renderPlan(plan: CompositionPlan): string {
  const out = [`<div class="plan" data-mode="${escapeHtml(plan.mode)}">`];
  if (plan.aggregate) {
    const a = plan.aggregate;
    out.push(`<p class="aggregate">score ${num(a.score)}, latency ${num(a.latency_ms)} ms, memory ${num(a.memory_mb)} MB</p>`);
  }
  if (plan.assignment) {
    out.push(`<table class="assignment"><thead><tr><th>node</th><th>model</th><th>accuracy</th><th>latency_ms</th><th>memory_mb</th></tr></thead><tbody>`);
    for (const [node, c] of Object.entries(plan.assignment)) {
      out.push(`<tr><td>${escapeHtml(node)}</td><td>${escapeHtml(c.name)} ${escapeHtml(c.version)}</td>`);
      out.push(`<td>${num(c.accuracy)}</td><td>${num(c.latency_ms)}</td><td>${num(c.memory_mb)}</td></tr>`);
    }
    out.push(`</tbody></table>`);
  }
  out.push(`</div>`);
  return out.join("");
}

export function renderWhatIf(state: WhatIfState): string {
  const d = state.draft;
  const out = [`<section class="whatif">`];
  out.push(`<label>latency budget <input type="range" name="latency_ms" value="${d.budgets.latency_ms}"> ${d.budgets.latency_ms} ms</label>`);
  out.push(`<label>memory budget <input type="range" name="memory_mb" value="${d.budgets.memory_mb}"> ${d.budgets.memory_mb} MB</label>`);
  out.push(`<p class="graph">${d.nodes.map((n) => escapeHtml(`${n.id}:${n.task}`)).join(" &rarr; ")} on ${escapeHtml(d.hardware)}</p>`);
  const o = state.outcome;
  if (o?.kind === "plan") {
    out.push(renderPlan(o.plan));
  } else if (o?.kind === "infeasible") {
    const binding = o.plan?.binding ?? [];
    out.push(`<div class="infeasible"><p>${escapeHtml(o.error.message)}</p>`);
    out.push(`<p class="binding">binding: ${binding.map(escapeHtml).join(", ")}</p></div>`);
  } else if (o?.kind === "error") {
    out.push(`<div class="error" data-code="${escapeHtml(o.error.code)}">${escapeHtml(o.error.message)}</div>`);
  }
  out.push(`</section>`);
  return out.join("");
}
