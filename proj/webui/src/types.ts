// Shapes of the /api/v1 JSON contract as served by mz_server.

export type Json = null | boolean | number | string | Json[] | { [key: string]: Json };

export interface Envelope<B = Record<string, Json>> {
  kind: string;
  body: B;
}

export interface ModelBody {
  id: string;
  name: string;
  version: string;
  task: string;
  source?: { origin: "manual" | "external" | "harness"; [key: string]: Json };
  [key: string]: Json | undefined;
}

export interface QueryPage {
  count: number;
  offset: number;
  limit: number;
  elapsed_ms: number;
  plan: string;
  results: Envelope[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: {
    line?: number;
    column?: number;
    expected?: string[];
    field?: string;
    binding?: string[];
    [key: string]: Json | undefined;
  };
}

export interface ModelRef {
  id: string;
  name: string;
  version: string;
}

export interface ComparisonRow {
  metric: string;
  dataset: string;
  dataset_version: string;
  hardware: string;
  slice: string | null;
  higher_is_better: boolean;
  values: (number | null)[];
}

export interface Comparison {
  models: ModelRef[];
  rows: ComparisonRow[];
}

export interface TaskNodeDraft {
  id: string;
  task: string;
  input_type?: string;
  output_type?: string;
  dataset?: string;
}

export interface CompositionRequest {
  nodes: TaskNodeDraft[];
  edges: { from: string; to: string }[];
  budgets: { latency_ms: number; memory_mb: number };
  hardware: string;
  weights?: Record<string, number>;
}

export interface AssignedCandidate extends ModelRef {
  accuracy: number;
  latency_ms: number;
  memory_mb: number;
  input_type?: string;
  output_type?: string;
}

export interface CompositionPlan {
  feasible: boolean;
  mode: string;
  aggregate?: { score: number; latency_ms: number; memory_mb: number };
  assignment?: Record<string, AssignedCandidate>;
  binding?: string[];
  excluded?: Record<string, { id: string; name: string; version: string; missing_metrics: string[] }[]>;
}

export interface Health {
  status: string;
  record_counts: Record<string, number>;
  total: number;
}
