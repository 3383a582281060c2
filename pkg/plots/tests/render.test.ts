import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { column, parseCsv, readTable, MissingColumn, SchemaMismatch, textColumn } from "../src/csv.js";
import { renderFigure } from "../src/figures.js";
import { binSeries, loglogSlope, mean, std } from "../src/stats.js";
import { loadStyle } from "../src/svg.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = join(here, "..", "fixtures");
const style = loadStyle();

function annotation(svg: string, role: string): { value: number; std?: number } {
  const pattern = new RegExp(
    `data-role="${role}" data-value="([^"]+)"(?: data-std="([^"]+)")?`,
  );
  const match = svg.match(pattern);
  expect(match, `annotation ${role} present`).toBeTruthy();
  return {
    value: Number(match![1]),
    std: match![2] === undefined ? undefined : Number(match![2]),
  };
}

describe("pe-sweep figure", () => {
  const path = join(fixtures, "pe_sweep.csv");

  it("renders with slope annotations matching recomputation", () => {
    const svg = renderFigure("pe-sweep", [path], style, { log: true });
    expect(svg.startsWith("<svg")).toBe(true);
    const table = readTable(path, "qpomdp.pe_sweep.v1");
    const probs = column(table, "accept_prob");
    const costs = column(table, "mean_cost");
    const algos = textColumn(table, "algo");
    for (const algo of ["classical", "quantum"]) {
      const rows = algos
        .map((a, i) => (a === algo ? i : -1))
        .filter((i) => i >= 0);
      const expected = loglogSlope(
        rows.map((i) => probs[i]),
        rows.map((i) => costs[i]),
      );
      const annotated = annotation(svg, `slope-${algo}`).value;
      expect(Math.abs(annotated - expected)).toBeLessThan(1e-9);
    }
  });

  it("supports the linear variant", () => {
    const svg = renderFigure("pe-sweep", [path], style, { log: false });
    expect(svg).toContain("Cost per accepted sample");
  });

  it("is byte-identical across re-renders", () => {
    const first = renderFigure("pe-sweep", [path], style, { log: true });
    const second = renderFigure("pe-sweep", [path], style, { log: true });
    expect(first).toBe(second);
  });
});

describe("reward and cost figures", () => {
  for (const [kind, file, schema] of [
    ["reward", "reward_summary.csv", "qpomdp.reward_summary.v1"],
    ["cost", "cost_summary.csv", "qpomdp.cost_summary.v1"],
  ] as const) {
    it(`${kind}: final annotations match the CSV`, () => {
      const path = join(fixtures, file);
      const svg = renderFigure(kind, [path], style, {});
      const table = readTable(path, schema);
      const samples = textColumn(table, "samples");
      const steps = column(table, "step");
      const means = column(table, "diff_mean");
      const stds = column(table, "diff_std");
      const lastStep = Math.max(...steps);
      for (const key of new Set(samples)) {
        const row = samples.findIndex(
          (s, i) => s === key && steps[i] === lastStep,
        );
        const annotated = annotation(svg, `final-${key}`);
        expect(Math.abs(annotated.value - means[row])).toBeLessThan(1e-9);
        expect(Math.abs(annotated.std! - stds[row])).toBeLessThan(1e-9);
      }
    });
  }

  it("shading toggle removes the band polygons", () => {
    const path = join(fixtures, "reward_summary.csv");
    const shaded = renderFigure("reward", [path], style, { shading: true });
    const bare = renderFigure("reward", [path], style, { shading: false });
    expect(shaded).toContain("<polygon");
    expect(bare).not.toContain("<polygon");
  });
});

describe("cost-vs-reward figure", () => {
  it("renders from the pre-binned CSV", () => {
    const path = join(fixtures, "cvr_binned.csv");
    const svg = renderFigure("cost-vs-reward", [path], style, {});
    const table = readTable(path, "qpomdp.cvr_binned.v1");
    const algos = textColumn(table, "algo");
    const meanX = column(table, "mean_reward");
    const meanY = column(table, "mean_queries");
    for (const algo of new Set(algos)) {
      const rows = algos
        .map((a, i) => (a === algo ? i : -1))
        .filter((i) => i >= 0)
        .sort((a, b) => meanX[a] - meanX[b]);
      const top = meanY[rows[rows.length - 1]];
      expect(
        Math.abs(annotation(svg, `topbin-${algo}`).value - top),
      ).toBeLessThan(1e-9);
    }
  });

  it("re-bins raw points consistently with the stats helper", () => {
    const path = join(fixtures, "cvr_points.csv");
    const svg = renderFigure("cost-vs-reward", [path], style, { bins: 3 });
    const table = readTable(path, "qpomdp.cvr_points.v1");
    const algos = textColumn(table, "algo");
    const rewards = column(table, "final_reward");
    const queries = column(table, "total_queries");
    for (const algo of new Set(algos)) {
      const rows = algos
        .map((a, i) => (a === algo ? i : -1))
        .filter((i) => i >= 0);
      const bins = binSeries(
        rows.map((i) => rewards[i]),
        rows.map((i) => queries[i]),
        3,
      );
      const top = [...bins].sort((a, b) => a.meanX - b.meanX).pop()!;
      expect(
        Math.abs(annotation(svg, `topbin-${algo}`).value - top.meanY),
      ).toBeLessThan(1e-9);
    }
  });
});

describe("error handling", () => {
  it("rejects a wrong schema", () => {
    expect(() =>
      renderFigure("reward", [join(fixtures, "pe_sweep.csv")], style, {}),
    ).toThrow(SchemaMismatch);
  });

  it("reports missing columns", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const path = join(dir, "bad.csv");
    writeFileSync(
      path,
      "# schema=qpomdp.pe_sweep.v1\naccept_prob,algo\n0.5,classical\n",
    );
    expect(() => renderFigure("pe-sweep", [path], style, {})).toThrow(
      MissingColumn,
    );
  });

  it("renders empty axes for an empty-but-valid CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const path = join(dir, "empty.csv");
    writeFileSync(
      path,
      "# schema=qpomdp.pe_sweep.v1\naccept_prob,algo,mean_cost,std_cost,accepted\n",
    );
    const svg = renderFigure("pe-sweep", [path], style, {});
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("no data");
  });
});

describe("statistics helpers", () => {
  it("mean and std agree with direct computation", () => {
    const values = [1, 2, 3, 4, 7];
    expect(mean(values)).toBeCloseTo(3.4, 12);
    const m = mean(values);
    const expected = Math.sqrt(
      values.reduce((acc, v) => acc + (v - m) ** 2, 0) / values.length,
    );
    expect(std(values)).toBeCloseTo(expected, 12);
  });

  it("binning collapses a degenerate range to one bin", () => {
    const bins = binSeries([2, 2, 2], [1, 3, 5], 4);
    expect(bins).toHaveLength(1);
    expect(bins[0].count).toBe(3);
    expect(bins[0].meanY).toBeCloseTo(3, 12);
  });
});

describe("command line", () => {
  it("writes an SVG file and reruns byte-identically", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cli-"));
    const out = join(dir, "figure.svg");
    const script = join(here, "..", "dist", "render.js");
    const args = [
      script,
      "--kind",
      "pe-sweep",
      "--in",
      join(fixtures, "pe_sweep.csv"),
      "--out",
      out,
      "--log",
    ];
    execFileSync("node", args);
    const first = readFileSync(out);
    execFileSync("node", args);
    expect(readFileSync(out).equals(first)).toBe(true);
  });

  it("fails with a message on unknown kinds", () => {
    const script = join(here, "..", "dist", "render.js");
    expect(() =>
      execFileSync("node", [script, "--kind", "pie", "--in", "x", "--out", "y"], {
        stdio: "pipe",
      }),
    ).toThrow();
  });
});

describe("csv parser", () => {
  it("round-trips a small table", () => {
    const table = parseCsv(
      "# schema=qpomdp.test.v1\na,b\n1,x\n2,y\n",
    );
    expect(table.schema).toBe("qpomdp.test.v1");
    expect(column(table, "a")).toEqual([1, 2]);
    expect(textColumn(table, "b")).toEqual(["x", "y"]);
  });
});
