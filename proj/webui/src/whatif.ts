import type { ApiClient } from "./api.js";
import type { ApiErrorBody, CompositionPlan, CompositionRequest } from "./types.js";

export type WhatIfOutcome =
  | { kind: "plan"; plan: CompositionPlan }
  | { kind: "infeasible"; error: ApiErrorBody; plan: CompositionPlan | null }
  | { kind: "error"; error: ApiErrorBody };

// Composition what-if panel. Every edit re-solves on the server; a newer
// edit aborts the request of an older one and stale answers are dropped.
export class WhatIfState {
  draft: CompositionRequest;
  outcome: WhatIfOutcome | null = null;
  private seq = 0;
  private inflight: AbortController | null = null;

  constructor(
    private readonly client: ApiClient,
    draft: CompositionRequest,
  ) {
    this.draft = structuredClone(draft);
  }

  setLatencyBudget(ms: number): Promise<void> {
    this.draft.budgets = { ...this.draft.budgets, latency_ms: ms };
    return this.resolve();
  }

  setMemoryBudget(mb: number): Promise<void> {
    this.draft.budgets = { ...this.draft.budgets, memory_mb: mb };
    return this.resolve();
  }

  setWeight(node: string, weight: number): Promise<void> {
    this.draft.weights = { ...(this.draft.weights ?? {}), [node]: weight };
    return this.resolve();
  }

  setHardware(hardware: string): Promise<void> {
    this.draft.hardware = hardware;
    return this.resolve();
  }

  async resolve(): Promise<void> {
    const mine = ++this.seq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    let res;
    try {
      res = await this.client.compose(structuredClone(this.draft), controller.signal);
    } catch (e) {
      if (controller.signal.aborted) return;
      throw e;
    }
    if (mine !== this.seq) return;
    this.inflight = null;
    if (res.ok) {
      this.outcome = { kind: "plan", plan: res.body };
    } else if (res.error.code === "INFEASIBLE") {
      const plan = (res.error.detail as unknown as CompositionPlan | undefined) ?? null;
      this.outcome = { kind: "infeasible", error: res.error, plan };
    } else {
      this.outcome = { kind: "error", error: res.error };
    }
  }
}
