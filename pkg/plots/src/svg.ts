/**
 * Deterministic SVG scene builder: fixed formatting, no timestamps,
 * element order given by call order, style injected from the
 * checked-in style file. Re-rendering identical inputs yields
 * byte-identical files.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export interface Style {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  background: string;
  fontFamily: string;
  fontSize: number;
  titleSize: number;
  axisColor: string;
  gridColor: string;
  seriesColors: string[];
  bandOpacity: number;
  referenceColor: string;
  markerRadius: number;
}

export function loadStyle(path?: string): Style {
  const fallback = join(
    dirname(fileURLToPath(import.meta.url)),
    "..",
    "style.json",
  );
  return JSON.parse(readFileSync(path ?? fallback, "utf-8")) as Style;
}

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return v.toFixed(2);
};

export const fmtValue = (v: number): string => v.toPrecision(17);

export interface Scale {
  toPx(value: number): number;
  ticks(): number[];
  domain: [number, number];
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const multiple of [1, 2, 5, 10]) {
    if (raw <= multiple * power) return multiple * power;
  }
  return 10 * power;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  let [lo, hi] = domain;
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const scale = (range[1] - range[0]) / (hi - lo);
  return {
    domain: [lo, hi],
    toPx: (value) => range[0] + (value - lo) * scale,
    ticks: () => {
      const step = niceStep(hi - lo, 6);
      const start = Math.ceil(lo / step) * step;
      const out: number[] = [];
      for (let v = start; v <= hi + step * 1e-9; v += step) {
        out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
      }
      return out;
    },
  };
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [lo, hi] = domain;
  if (lo <= 0) throw new Error("log scale needs positive domain");
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi === lo ? lo * 10 : hi);
  const scale = (range[1] - range[0]) / (lhi - llo);
  return {
    domain: [lo, hi],
    toPx: (value) => range[0] + (Math.log10(value) - llo) * scale,
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-9); e++) {
        out.push(Math.pow(10, e));
      }
      return out.length >= 2 ? out : [lo, hi];
    },
  };
}

export class Scene {
  private parts: string[] = [];

  constructor(public style: Style) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${style.width}" ` +
        `height="${style.height}" viewBox="0 0 ${style.width} ${style.height}">`,
      `<rect width="${style.width}" height="${style.height}" ` +
        `fill="${style.background}"/>`,
    );
  }

  raw(element: string): void {
    this.parts.push(element);
  }

  line(
    points: Array<[number, number]>,
    color: string,
    width = 1.5,
    dash?: string,
  ): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${path}" fill="none" stroke="${color}" ` +
        `stroke-width="${width}"${dashAttr}/>`,
    );
  }

  polygon(points: Array<[number, number]>, fill: string, opacity: number): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polygon points="${path}" fill="${fill}" opacity="${opacity}" ` +
        `stroke="none"/>`,
    );
  }

  circle(x: number, y: number, radius: number, color: string): void {
    this.parts.push(
      `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${radius}" fill="${color}"/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    options: {
      anchor?: string;
      size?: number;
      color?: string;
      data?: Record<string, string>;
    } = {},
  ): void {
    const anchor = options.anchor ?? "start";
    const size = options.size ?? this.style.fontSize;
    const color = options.color ?? this.style.axisColor;
    const data = Object.entries(options.data ?? {})
      .map(([key, value]) => ` data-${key}="${value}"`)
      .join("");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
        `font-family="${this.style.fontFamily}" font-size="${size}" ` +
        `fill="${color}"${data}>${escapeXml(content)}</text>`,
    );
  }

  build(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e5)) {
    return value.toExponential(0);
  }
  return Number(value.toPrecision(6)).toString();
}

export interface Frame {
  scene: Scene;
  x: Scale;
  y: Scale;
  plotLeft: number;
  plotRight: number;
  plotTop: number;
  plotBottom: number;
}

export function chartFrame(
  style: Style,
  xDomain: [number, number],
  yDomain: [number, number],
  labels: { title: string; xLabel: string; yLabel: string },
  logAxes: { x?: boolean; y?: boolean } = {},
): Frame {
  const scene = new Scene(style);
  const plotLeft = style.margin.left;
  const plotRight = style.width - style.margin.right;
  const plotTop = style.margin.top;
  const plotBottom = style.height - style.margin.bottom;
  const x = (logAxes.x ? logScale : linearScale)(xDomain, [plotLeft, plotRight]);
  const y = (logAxes.y ? logScale : linearScale)(yDomain, [plotBottom, plotTop]);

  for (const tick of x.ticks()) {
    const px = x.toPx(tick);
    scene.line([[px, plotTop], [px, plotBottom]], style.gridColor, 0.5);
    scene.text(px, plotBottom + 18, tickLabel(tick), { anchor: "middle" });
  }
  for (const tick of y.ticks()) {
    const py = y.toPx(tick);
    scene.line([[plotLeft, py], [plotRight, py]], style.gridColor, 0.5);
    scene.text(plotLeft - 8, py + 4, tickLabel(tick), { anchor: "end" });
  }
  scene.line(
    [[plotLeft, plotTop], [plotLeft, plotBottom], [plotRight, plotBottom]],
    style.axisColor,
    1.2,
  );
  scene.text((plotLeft + plotRight) / 2, style.margin.top - 18, labels.title, {
    anchor: "middle",
    size: style.titleSize,
  });
  scene.text((plotLeft + plotRight) / 2, style.height - 14, labels.xLabel, {
    anchor: "middle",
  });
  scene.raw(
    `<text x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" ` +
      `font-family="${style.fontFamily}" font-size="${style.fontSize}" ` +
      `fill="${style.axisColor}" transform="rotate(-90 18 ` +
      `${(plotTop + plotBottom) / 2})">${escapeXml(labels.yLabel)}</text>`,
  );
  return { scene, x, y, plotLeft, plotRight, plotTop, plotBottom };
}
