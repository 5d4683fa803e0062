import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { bestIndex, renderCompare, renderModelDetail } from "../src/render.js";
import type { ComparisonRow } from "../src/types.js";
import { recordedFetch, recording } from "./recorded.js";

// Independent reference: sort present values by polarity and take the first.
function expectedBest(row: ComparisonRow): number {
  const present = row.values.map((v, i) => [v, i] as const).filter(([v]) => v !== null) as [number, number][];
  if (present.length === 0) return -1;
  present.sort((a, b) => (row.higher_is_better ? b[0] - a[0] : a[0] - b[0]) || a[1] - b[1]);
  return present[0][1];
}

describe("compare view", () => {
  it("calls /compare with the chosen ids", async () => {
    const backend = recordedFetch();
    const res = await new ApiClient("", backend.fetchImpl).compare(["m-spacy-pos", "m-stanza-pos", "m-tiny-pos"]);
    expect(res.ok).toBe(true);
    expect(backend.calls[0]).toMatchObject({ method: "GET", path: "/api/v1/compare" });
  });

  it("highlights the best value per row by polarity", () => {
    for (const name of ["compare_pos", "compare_q3"]) {
      const c = recording(name).response.body;
      const html = renderCompare(c);
      const rows = html.split("<tr>").slice(2);
      expect(rows).toHaveLength(c.rows.length);
      c.rows.forEach((row: ComparisonRow, i: number) => {
        expect(bestIndex(row)).toBe(expectedBest(row));
        const cells = rows[i].split("<td").slice(1);
        const marked = cells.findIndex((cell) => cell.startsWith(` class="best"`));
        expect(marked).toBe(expectedBest(row));
      });
    }
  });

  it("prefers lower latency and higher accuracy", () => {
    const c = recording("compare_q3").response.body;
    const acc = c.rows.find((r: ComparisonRow) => r.metric === "accuracy");
    const lat = c.rows.find((r: ComparisonRow) => r.metric === "latency_ms" && r.hardware === "hw-edge");
    expect(c.models[bestIndex(acc)].id).toBe("m-vitbase");
    expect(c.models[bestIndex(lat)].id).toBe("m-effnetb0");
  });

  it("matches the recorded snapshot", () => {
    expect(renderCompare(recording("compare_pos").response.body)).toMatchSnapshot();
  });
});

describe("model detail view", () => {
  it("shows fields, provenance badge, and runs grouped by hardware", () => {
    const record = recording("record_resnet50").response.body;
    const runs = recording("compare_resnet50").response.body;
    const html = renderModelDetail(record, runs);
    expect(html).toContain(`<span class="badge badge-manual">manual</span>`);
    const hardware = [...html.matchAll(/<h3>([^<]*)<\/h3>/g)].map((m) => m[1]);
    expect(hardware).toEqual([...new Set(runs.rows.map((r: ComparisonRow) => r.hardware))].sort());
    for (const r of runs.rows) expect(html).toContain(`: ${r.values[0]}</li>`);
    expect(html).toMatchSnapshot();
  });
});
