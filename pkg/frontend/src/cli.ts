#!/usr/bin/env node
/**
 * bellgeo-plot: render bellgeo CSV outputs as SVG figures.
 *
 * Usage:
 *   bellgeo-plot --kind histogram-overlay --in a.csv b.csv --out fig.svg [--normalize]
 *   bellgeo-plot --kind volume-decay --in vol1.csv vol2.csv --out decay.svg
 *   bellgeo-plot --kind cycle-ratio --in cycle.csv --out ratio.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";

import { SchemaError } from "./csv.js";
import { PlotKind, PlotSpec, render } from "./plots.js";

const KINDS: PlotKind[] = ["histogram-overlay", "volume-decay", "cycle-ratio"];

interface Args {
  kind: PlotKind;
  inputs: string[];
  out: string;
  normalize: boolean;
  title?: string;
}

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: bellgeo-plot --kind <histogram-overlay|volume-decay|cycle-ratio> " +
      "--in <csv...> --out <file.svg> [--normalize] [--title <text>]",
  );
  process.exit(message ? 2 : 0);
}

function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  let out: string | undefined;
  let title: string | undefined;
  let normalize = false;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--help" || a === "-h") usage();
    else if (a === "--kind") kind = argv[++i];
    else if (a === "--out") out = argv[++i];
    else if (a === "--title") title = argv[++i];
    else if (a === "--normalize") normalize = true;
    else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        inputs.push(argv[++i]);
      }
    } else usage(`unknown argument ${a}`);
  }
  if (!kind || !(KINDS as string[]).includes(kind)) {
    usage(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (inputs.length === 0) usage("at least one --in CSV is required");
  if (!out) usage("--out is required");
  return { kind: kind as PlotKind, inputs, out, normalize, title };
}

export function main(argv = process.argv.slice(2)): void {
  const args = parseArgs(argv);
  let texts: string[];
  try {
    texts = args.inputs.map((p) => readFileSync(p, "utf8"));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(2);
  }
  const spec: PlotSpec = {
    kind: args.kind,
    inputs: texts,
    normalize: args.normalize ? "probability" : "counts",
    title: args.title,
  };
  try {
    const { svg, checks } = render(spec);
    writeFileSync(args.out, svg);
    for (const c of checks) {
      console.error(`# ${c.label}: series sum ${c.sum.toPrecision(8)}`);
    }
    console.error(`wrote ${args.out}`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      process.exit(2);
    }
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}

main();
