import type { ApiClient } from "./api.js";
import type { ApiErrorBody, Comparison, ModelBody, QueryPage } from "./types.js";

export interface HistoryEntry {
  mql: string;
  status: number;
  count?: number;
  code?: string;
}

// Query console state. History only ever grows within a session.
export class QuerySession {
  text = "";
  lastPage: QueryPage | null = null;
  keyMetrics: Comparison | null = null;
  error: ApiErrorBody | null = null;
  private readonly entries: HistoryEntry[] = [];

  constructor(private readonly client: ApiClient) {}

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  async submit(mql = this.text): Promise<void> {
    this.text = mql;
    const res = await this.client.query(mql);
    if (!res.ok) {
      this.error = res.error;
      this.lastPage = null;
      this.keyMetrics = null;
      this.entries.push({ mql, status: res.status, code: res.error.code });
      return;
    }
    this.error = null;
    this.lastPage = res.body;
    this.keyMetrics = null;
    this.entries.push({ mql, status: res.status, count: res.body.count });

    const modelIds = res.body.results.filter((e) => e.kind === "ModelRecord").map((e) => (e.body as ModelBody).id);
    if (modelIds.length > 0) {
      const cmp = await this.client.compare(modelIds);
      if (cmp.ok) this.keyMetrics = cmp.body;
    }
  }
}
