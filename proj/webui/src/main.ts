// Browser entry point. Wires the pure renderers to the DOM; all state changes
// go through QuerySession and WhatIfState.

import { ApiClient } from "./api.js";
import { renderCompare, renderModelDetail, renderQueryConsole, renderWhatIf } from "./render.js";
import { QuerySession } from "./session.js";
import type { CompositionRequest } from "./types.js";
import { WhatIfState } from "./whatif.js";

const defaultDraft: CompositionRequest = {
  nodes: [
    { id: "classify", task: "text-classification", input_type: "text", dataset: "tweebank-crowd" },
    { id: "tag", task: "pos-tagging", output_type: "tag-sequence", dataset: "tweebank-crowd" },
  ],
  edges: [{ from: "classify", to: "tag" }],
  budgets: { latency_ms: 60, memory_mb: 500 },
  hardware: "pixel-6",
};

const client = new ApiClient(document.body.dataset.apiBase ?? "");
const session = new QuerySession(client);
const whatif = new WhatIfState(client, defaultDraft);
const app = document.getElementById("app")!;

function showQuery(): void {
  app.innerHTML = renderQueryConsole(session) + `<button id="run">Run</button>`;
  const editor = app.querySelector<HTMLTextAreaElement>("textarea.mql")!;
  app.querySelector("#run")!.addEventListener("click", async () => {
    await session.submit(editor.value);
    showQuery();
  });
  app.querySelectorAll<HTMLTableRowElement>("table.results tr[data-id]").forEach((tr) => {
    tr.addEventListener("click", () => (location.hash = "#model/" + encodeURIComponent(tr.dataset.id!)));
  });
}

async function showModel(id: string): Promise<void> {
  const [rec, runs] = await Promise.all([client.record("ModelRecord", id), client.compare([id])]);
  app.innerHTML = rec.ok ? renderModelDetail(rec.body, runs.ok ? runs.body : null) : `<p class="error">${rec.error.message}</p>`;
}

async function showCompare(ids: string[]): Promise<void> {
  const input = `<input id="ids" size="60" value="${ids.join(",")}"><button id="go">Compare</button>`;
  if (ids.length === 0) {
    app.innerHTML = input;
  } else {
    const res = await client.compare(ids);
    app.innerHTML = input + (res.ok ? renderCompare(res.body) : `<p class="error">${res.error.message}</p>`);
  }
  app.querySelector("#go")!.addEventListener("click", () => {
    location.hash = "#compare/" + app.querySelector<HTMLInputElement>("#ids")!.value;
  });
}

function showWhatIf(): void {
  app.innerHTML = renderWhatIf(whatif);
  const slider = (name: string, max: number, set: (v: number) => Promise<void>) => {
    const el = app.querySelector<HTMLInputElement>(`input[name=${name}]`)!;
    el.max = String(max);
    el.addEventListener("input", async () => {
      await set(Number(el.value));
      if (location.hash === "#whatif") showWhatIf();
    });
  };
  slider("latency_ms", 500, (v) => whatif.setLatencyBudget(v));
  slider("memory_mb", 4000, (v) => whatif.setMemoryBudget(v));
}

async function route(): Promise<void> {
  const hash = decodeURIComponent(location.hash.slice(1));
  if (hash.startsWith("model/")) return showModel(hash.slice(6));
  if (hash.startsWith("compare")) return showCompare(hash.slice(8).split(",").filter(Boolean));
  if (hash === "whatif") {
    if (!whatif.outcome) await whatif.resolve();
    return showWhatIf();
  }
  showQuery();
}

window.addEventListener("hashchange", () => void route());
void route();
