/**
 * Figure renderer CLI.
 *
 *   render --kind <pe-sweep|reward|cost|cost-vs-reward>
 *          --in <csv...> --out <image.svg> [--log] [--bins B]
 *          [--no-shading] [--style <style.json>]
 *
 * Pure function of the CSV inputs and the style file; reruns are
 * byte-identical.
 */

import { writeFileSync } from "node:fs";

import { FigureKind, FigureOptions, renderFigure } from "./figures.js";
import { loadStyle } from "./svg.js";

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
  options: FigureOptions;
  stylePath?: string;
}

export function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  let stylePath: string | undefined;
  const options: FigureOptions = { shading: true };

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--kind":
        kind = argv[++i];
        break;
      case "--in":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          inputs.push(argv[++i]);
        }
        break;
      case "--out":
        out = argv[++i];
        break;
      case "--log":
        options.log = true;
        break;
      case "--bins":
        options.bins = Number(argv[++i]);
        break;
      case "--no-shading":
        options.shading = false;
        break;
      case "--style":
        stylePath = argv[++i];
        break;
      default:
        throw new Error(`unknown argument ${arg}`);
    }
  }
  const kinds = ["pe-sweep", "reward", "cost", "cost-vs-reward"];
  if (!kind || !kinds.includes(kind)) {
    throw new Error(`--kind must be one of ${kinds.join(", ")}`);
  }
  if (inputs.length === 0) throw new Error("--in requires at least one CSV");
  if (!out) throw new Error("--out is required");
  return { kind: kind as FigureKind, inputs, out, options, stylePath };
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const style = loadStyle(args.stylePath);
  const svg = renderFigure(args.kind, args.inputs, style, args.options);
  writeFileSync(args.out, svg, "utf-8");
  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (error) {
    process.stderr.write(`${(error as Error).message}\n`);
    process.exit(1);
  }
}
