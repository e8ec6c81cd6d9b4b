/**
 * PlotSpec handling: resolve input CSVs, validate, build series, render.
 */

import { readFileSync, readdirSync, statSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import { FIGURE_KINDS, FigureKind, buildSeries, selectionGapByBlockCount } from "./figures.js";
import { parseTraceCsv, TraceRow } from "./schema.js";
import { renderChart } from "./svg.js";

export interface PlotSpec {
  csv: string | string[];
  kind: FigureKind;
  out: string;
  logY?: boolean;
  logX?: boolean;
  title?: string;
  inset?: boolean;
}

const KIND_TITLES: Record<FigureKind, string> = {
  "kl-vs-time": "KL divergence vs simulated time",
  "kl-vs-cycles": "KL divergence vs time rescaled by block count",
  "kl-vs-step": "KL divergence per cycle for varying block duration",
  "kl-vs-perturbation": "KL divergence under device variation",
};

/** Expand a path that may contain '*' wildcards in its basename. */
export function expandGlob(pattern: string): string[] {
  if (!pattern.includes("*")) {
    return [pattern];
  }
  const dir = dirname(pattern);
  const name = basename(pattern);
  const regex = new RegExp(
    "^" + name.split("*").map(escapeRegex).join(".*") + "$",
  );
  return readdirSync(dir)
    .filter((f) => regex.test(f))
    .sort()
    .map((f) => join(dir, f));
}

function escapeRegex(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function loadRows(csv: string | string[]): TraceRow[] {
  const patterns = Array.isArray(csv) ? csv : [csv];
  const files = patterns.flatMap(expandGlob);
  if (files.length === 0) {
    throw new Error(`no CSV files match ${patterns.join(", ")}`);
  }
  const rows: TraceRow[] = [];
  for (const file of files) {
    statSync(file); // fail early with a clear ENOENT
    rows.push(...parseTraceCsv(readFileSync(file, "utf-8"), file));
  }
  return rows;
}

export function validateSpec(spec: PlotSpec): void {
  if (!(spec.kind in FIGURE_KINDS)) {
    throw new Error(
      `unknown figure kind '${spec.kind}' (expected one of ${Object.keys(FIGURE_KINDS).join(", ")})`,
    );
  }
  if (!spec.csv || (Array.isArray(spec.csv) && spec.csv.length === 0)) {
    throw new Error("spec needs a 'csv' input pattern");
  }
  if (!spec.out) {
    throw new Error("spec needs an 'out' image path");
  }
}

/** Render a spec to an SVG string (pure given the rows on disk). */
export function renderSpec(spec: PlotSpec): string {
  validateSpec(spec);
  const rows = loadRows(spec.csv);
  const series = buildSeries(spec.kind, rows);
  const kindSpec = FIGURE_KINDS[spec.kind];
  const algos = new Set(rows.map((r) => r.algo));
  const wantInset =
    spec.inset ?? (spec.kind === "kl-vs-time" && algos.has("rbld") && algos.has("cbld"));
  return renderChart(series, {
    title: spec.title ?? KIND_TITLES[spec.kind],
    xLabel: kindSpec.xLabel,
    yLabel: "KL divergence",
    logY: spec.logY ?? true,
    logX: spec.logX ?? false,
    inset: wantInset ? selectionGapByBlockCount(rows) : undefined,
  });
}
