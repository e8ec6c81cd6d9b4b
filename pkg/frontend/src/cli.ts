#!/usr/bin/env node
/**
 * render --spec <file.json>
 * render --csv <glob> --kind <figure-kind> --out <file.svg> [--linear-y] [--title t]
 *
 * Renders simulation trace CSVs to SVG figures.  Output bytes depend only
 * on the input files.
 */

import { writeFileSync } from "node:fs";
import { readFileSync } from "node:fs";

import type { FigureKind } from "./figures.js";
import { PlotSpec, renderSpec } from "./render.js";

function parseArgs(argv: string[]): PlotSpec {
  const args = [...argv];
  const command = args.shift();
  if (command !== "render") {
    throw new Error("usage: bldsim-render render (--spec file | --csv glob --kind k --out f)");
  }
  let specFile: string | null = null;
  const flags = new Map<string, string | boolean>();
  while (args.length > 0) {
    const arg = args.shift()!;
    switch (arg) {
      case "--spec":
        specFile = args.shift() ?? null;
        break;
      case "--csv":
      case "--kind":
      case "--out":
      case "--title":
        flags.set(arg.slice(2), args.shift() ?? "");
        break;
      case "--linear-y":
        flags.set("linearY", true);
        break;
      case "--log-x":
        flags.set("logX", true);
        break;
      case "--inset":
        flags.set("inset", true);
        break;
      default:
        throw new Error(`unknown argument '${arg}'`);
    }
  }
  if (specFile) {
    return JSON.parse(readFileSync(specFile, "utf-8")) as PlotSpec;
  }
  const spec: PlotSpec = {
    csv: String(flags.get("csv") ?? ""),
    kind: String(flags.get("kind") ?? "") as FigureKind,
    out: String(flags.get("out") ?? ""),
  };
  if (flags.get("linearY")) spec.logY = false;
  if (flags.get("logX")) spec.logX = true;
  if (flags.get("inset")) spec.inset = true;
  if (flags.has("title")) spec.title = String(flags.get("title"));
  return spec;
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const svg = renderSpec(spec);
    writeFileSync(spec.out, svg);
    console.log(`wrote ${spec.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
