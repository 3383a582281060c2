/**
 * The four figure kinds, each a pure function of its CSV inputs plus
 * the style file. Annotated statistics (fitted slopes, deviations)
 * are recomputed from the CSV rows and stamped into the SVG as
 * data-value attributes so tests can verify them independently.
 */

import { column, distinct, readTable, textColumn, Table } from "./csv.js";
import { binSeries, loglogSlope } from "./stats.js";
import { chartFrame, fmtValue, Frame, Style } from "./svg.js";

export interface FigureOptions {
  log?: boolean;
  bins?: number;
  shading?: boolean;
}

const ALGO_ORDER = ["classical", "quantum"];

function seriesColor(style: Style, index: number): string {
  return style.seriesColors[index % style.seriesColors.length];
}

function legend(frame: Frame, entries: Array<[string, string]>): void {
  entries.forEach(([label, color], index) => {
    const y = frame.plotTop + 16 + 18 * index;
    frame.scene.line(
      [[frame.plotRight - 150, y - 4], [frame.plotRight - 122, y - 4]],
      color,
      2,
    );
    frame.scene.text(frame.plotRight - 116, y, label);
  });
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

function emptyFigure(style: Style, title: string): string {
  const frame = chartFrame(style, [0, 1], [0, 1], {
    title: `${title} (no data)`,
    xLabel: "",
    yLabel: "",
  });
  return frame.scene.build();
}

/** Queries per accepted sample against the acceptance probability. */
export function renderPeSweep(
  paths: string[],
  style: Style,
  options: FigureOptions,
): string {
  const table = readTable(paths[0], "qpomdp.pe_sweep.v1");
  if (table.rows.length === 0) return emptyFigure(style, "Cost per sample");
  const probs = column(table, "accept_prob");
  const costs = column(table, "mean_cost");
  const algos = textColumn(table, "algo");

  const frame = chartFrame(
    style,
    extent(probs),
    extent(costs),
    {
      title: "Cost per accepted sample",
      xLabel: "acceptance probability",
      yLabel: "queries per accepted sample",
    },
    { x: options.log ?? false, y: options.log ?? false },
  );

  const entries: Array<[string, string]> = [];
  ALGO_ORDER.forEach((algo, index) => {
    const rows = algos
      .map((a, i) => (a === algo ? i : -1))
      .filter((i) => i >= 0)
      .sort((a, b) => probs[b] - probs[a]);
    if (rows.length === 0) return;
    const color = seriesColor(style, index);
    frame.scene.line(
      rows.map((i) => [frame.x.toPx(probs[i]), frame.y.toPx(costs[i])]),
      color,
      2,
    );
    for (const i of rows) {
      frame.scene.circle(
        frame.x.toPx(probs[i]),
        frame.y.toPx(costs[i]),
        style.markerRadius,
        color,
      );
    }
    const fitted = loglogSlope(
      rows.map((i) => probs[i]),
      rows.map((i) => costs[i]),
    );
    entries.push([`${algo} (slope ${fitted.toFixed(3)})`, color]);
    frame.scene.text(
      frame.plotLeft + 10,
      frame.plotTop + 16 + 18 * index,
      `${algo} slope ${fitted.toFixed(3)}`,
      { color, data: { role: `slope-${algo}`, value: fmtValue(fitted) } },
    );

    if (options.log) {
      // reference lines with the ideal scaling exponents
      const exponent = algo === "classical" ? -1.0 : -0.5;
      const anchorProb = probs[rows[0]];
      const anchorCost = costs[rows[0]];
      const endProb = probs[rows[rows.length - 1]];
      const refEnd = anchorCost * Math.pow(endProb / anchorProb, exponent);
      frame.scene.line(
        [
          [frame.x.toPx(anchorProb), frame.y.toPx(anchorCost)],
          [frame.x.toPx(endProb), frame.y.toPx(refEnd)],
        ],
        style.referenceColor,
        1,
        "5,4",
      );
    }
  });
  legend(frame, entries);
  return frame.scene.build();
}

function summarySeries(
  table: Table,
  valueColumn: string,
  stdColumn: string,
): Map<string, { steps: number[]; means: number[]; stds: number[] }> {
  const samples = textColumn(table, "samples");
  const steps = column(table, "step");
  const means = column(table, valueColumn);
  const stds = column(table, stdColumn);
  const out = new Map<string, { steps: number[]; means: number[]; stds: number[] }>();
  for (const key of distinct(samples)) {
    const rows = samples
      .map((s, i) => (s === key ? i : -1))
      .filter((i) => i >= 0)
      .sort((a, b) => steps[a] - steps[b]);
    out.set(key, {
      steps: rows.map((i) => steps[i]),
      means: rows.map((i) => means[i]),
      stds: rows.map((i) => stds[i]),
    });
  }
  return out;
}

function renderSummaryBands(
  table: Table,
  style: Style,
  options: FigureOptions,
  labels: { title: string; yLabel: string },
  valueColumn: string,
  stdColumn: string,
): string {
  if (table.rows.length === 0) return emptyFigure(style, labels.title);
  const series = summarySeries(table, valueColumn, stdColumn);
  const everything: number[] = [];
  for (const { means, stds } of series.values()) {
    means.forEach((m, i) => {
      everything.push(m - stds[i], m + stds[i]);
    });
  }
  const stepValues = column(table, "step");
  const frame = chartFrame(style, extent(stepValues), extent(everything), {
    title: labels.title,
    xLabel: "time step",
    yLabel: labels.yLabel,
  });

  const entries: Array<[string, string]> = [];
  let index = 0;
  for (const [key, { steps, means, stds }] of series) {
    const color = seriesColor(style, index);
    if (options.shading ?? true) {
      const upper = steps.map(
        (s, i) =>
          [frame.x.toPx(s), frame.y.toPx(means[i] + stds[i])] as [number, number],
      );
      const lower = steps
        .map(
          (s, i) =>
            [frame.x.toPx(s), frame.y.toPx(means[i] - stds[i])] as [number, number],
        )
        .reverse();
      frame.scene.polygon([...upper, ...lower], color, style.bandOpacity);
    }
    frame.scene.line(
      steps.map((s, i) => [frame.x.toPx(s), frame.y.toPx(means[i])]),
      color,
      2,
    );
    const last = means.length - 1;
    frame.scene.text(
      frame.plotLeft + 10,
      frame.plotTop + 16 + 18 * index,
      `samples ${key}: final ${means[last].toFixed(2)} (std ${stds[last].toFixed(2)})`,
      {
        color,
        data: {
          role: `final-${key}`,
          value: fmtValue(means[last]),
          std: fmtValue(stds[last]),
        },
      },
    );
    entries.push([`samples ${key}`, color]);
    index += 1;
  }
  legend(frame, entries);
  return frame.scene.build();
}

/** Mean cumulative reward difference over time with one-sigma bands. */
export function renderReward(
  paths: string[],
  style: Style,
  options: FigureOptions,
): string {
  const table = readTable(paths[0], "qpomdp.reward_summary.v1");
  return renderSummaryBands(
    table,
    style,
    options,
    {
      title: "Cumulative reward difference (amplified minus plain)",
      yLabel: "cumulative reward difference",
    },
    "diff_mean",
    "diff_std",
  );
}

/** Mean cumulative cost difference over time with one-sigma bands. */
export function renderCost(
  paths: string[],
  style: Style,
  options: FigureOptions,
): string {
  const table = readTable(paths[0], "qpomdp.cost_summary.v1");
  return renderSummaryBands(
    table,
    style,
    options,
    {
      title: "Cumulative cost difference (amplified minus plain)",
      yLabel: "cumulative query difference",
    },
    "diff_mean",
    "diff_std",
  );
}

/** Binned total queries against final reward, one series per sampler. */
export function renderCostVsReward(
  paths: string[],
  style: Style,
  options: FigureOptions,
): string {
  const path = paths[0];
  let bins: Map<string, Array<{ meanX: number; meanY: number; stdY: number }>>;
  let table: Table;
  try {
    table = readTable(path, "qpomdp.cvr_binned.v1");
  } catch {
    table = readTable(path, "qpomdp.cvr_points.v1");
    if (table.rows.length === 0) {
      return emptyFigure(style, "Cost against reward");
    }
    const algos = textColumn(table, "algo");
    const rewards = column(table, "final_reward");
    const queries = column(table, "total_queries");
    bins = new Map();
    for (const algo of distinct(algos)) {
      const rows = algos
        .map((a, i) => (a === algo ? i : -1))
        .filter((i) => i >= 0);
      bins.set(
        algo,
        binSeries(
          rows.map((i) => rewards[i]),
          rows.map((i) => queries[i]),
          options.bins ?? 12,
        ),
      );
    }
    return drawCvr(style, bins);
  }
  if (table.rows.length === 0) {
    return emptyFigure(style, "Cost against reward");
  }
  const algos = textColumn(table, "algo");
  const meanX = column(table, "mean_reward");
  const meanY = column(table, "mean_queries");
  const stdY = column(table, "std_queries");
  bins = new Map();
  for (const algo of distinct(algos)) {
    const rows = algos.map((a, i) => (a === algo ? i : -1)).filter((i) => i >= 0);
    bins.set(
      algo,
      rows.map((i) => ({ meanX: meanX[i], meanY: meanY[i], stdY: stdY[i] })),
    );
  }
  return drawCvr(style, bins);
}

function drawCvr(
  style: Style,
  bins: Map<string, Array<{ meanX: number; meanY: number; stdY: number }>>,
): string {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const series of bins.values()) {
    for (const bin of series) {
      xs.push(bin.meanX);
      ys.push(bin.meanY - bin.stdY, bin.meanY + bin.stdY);
    }
  }
  const frame = chartFrame(style, extent(xs), extent(ys), {
    title: "Cost against achieved reward (binned)",
    xLabel: "final cumulative reward",
    yLabel: "total queries",
  });
  const entries: Array<[string, string]> = [];
  let index = 0;
  for (const [algo, series] of bins) {
    const color = seriesColor(style, index);
    const sorted = [...series].sort((a, b) => a.meanX - b.meanX);
    frame.scene.line(
      sorted.map((b) => [frame.x.toPx(b.meanX), frame.y.toPx(b.meanY)]),
      color,
      2,
    );
    for (const bin of sorted) {
      const px = frame.x.toPx(bin.meanX);
      frame.scene.circle(px, frame.y.toPx(bin.meanY), style.markerRadius, color);
      frame.scene.line(
        [
          [px, frame.y.toPx(bin.meanY - bin.stdY)],
          [px, frame.y.toPx(bin.meanY + bin.stdY)],
        ],
        color,
        1,
      );
    }
    const top = sorted[sorted.length - 1];
    frame.scene.text(
      frame.plotLeft + 10,
      frame.plotTop + 16 + 18 * index,
      `${algo}: top bin ${top.meanY.toFixed(1)} queries`,
      {
        color,
        data: { role: `topbin-${algo}`, value: fmtValue(top.meanY) },
      },
    );
    entries.push([algo, color]);
    index += 1;
  }
  legend(frame, entries);
  return frame.scene.build();
}

export type FigureKind = "pe-sweep" | "reward" | "cost" | "cost-vs-reward";

export function renderFigure(
  kind: FigureKind,
  paths: string[],
  style: Style,
  options: FigureOptions,
): string {
  switch (kind) {
    case "pe-sweep":
      return renderPeSweep(paths, style, options);
    case "reward":
      return renderReward(paths, style, options);
    case "cost":
      return renderCost(paths, style, options);
    case "cost-vs-reward":
      return renderCostVsReward(paths, style, options);
    default:
      throw new Error(`unknown figure kind ${kind}`);
  }
}
