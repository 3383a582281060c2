/** Display-transform statistics: means, deviations, least-squares slopes. */

export function mean(values: number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

export function std(values: number[]): number {
  const m = mean(values);
  let total = 0;
  for (const v of values) total += (v - m) * (v - m);
  return Math.sqrt(total / values.length);
}

/** Least-squares slope of y against x. */
export function slope(x: number[], y: number[]): number {
  const mx = mean(x);
  const my = mean(y);
  let numerator = 0;
  let denominator = 0;
  for (let i = 0; i < x.length; i++) {
    numerator += (x[i] - mx) * (y[i] - my);
    denominator += (x[i] - mx) * (x[i] - mx);
  }
  return numerator / denominator;
}

/** Least-squares slope of log(y) against log(x). */
export function loglogSlope(x: number[], y: number[]): number {
  return slope(x.map(Math.log), y.map(Math.log));
}

/**
 * Independent per-bin coordinate averages over the x range, matching
 * the harness's binning (clip into bin_count equal-width bins, omit
 * empty ones, collapse a degenerate range to one bin).
 */
export interface Bin {
  meanX: number;
  meanY: number;
  count: number;
  stdY: number;
}

export function binSeries(x: number[], y: number[], binCount: number): Bin[] {
  if (x.length === 0) return [];
  const lo = Math.min(...x);
  const hi = Math.max(...x);
  if (lo === hi || binCount === 1) {
    return [{ meanX: mean(x), meanY: mean(y), count: x.length, stdY: std(y) }];
  }
  const width = (hi - lo) / binCount;
  const members: number[][] = Array.from({ length: binCount }, () => []);
  for (let i = 0; i < x.length; i++) {
    const bin = Math.min(Math.floor((x[i] - lo) / width), binCount - 1);
    members[bin].push(i);
  }
  const bins: Bin[] = [];
  for (const indices of members) {
    if (indices.length === 0) continue;
    const xs = indices.map((i) => x[i]);
    const ys = indices.map((i) => y[i]);
    bins.push({ meanX: mean(xs), meanY: mean(ys), count: xs.length, stdY: std(ys) });
  }
  return bins;
}
