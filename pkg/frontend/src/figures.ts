/**
 * Figure kinds: which columns they need, how runs map to series, and the
 * x-axis transform each applies.
 *
 * kl-vs-time          KL against simulated time, one series per run.
 * kl-vs-cycles        same data with x rescaled by the block count b
 *                     (x = sim_time / b), which collapses block counts.
 * kl-vs-step          KL against whole-problem cycles, series keyed by the
 *                     block duration lambda.
 * kl-vs-perturbation  KL against time, series keyed by perturbation
 *                     strength delta.
 */

import type { ColumnName, TraceRow } from "./schema.js";

export type FigureKind =
  | "kl-vs-time"
  | "kl-vs-cycles"
  | "kl-vs-step"
  | "kl-vs-perturbation";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  runId: string;
  points: Point[];
  boundPoints: Point[];
  divergedAt: number | null;
}

interface KindSpec {
  xColumn: ColumnName;
  xLabel: string;
  xOf(row: TraceRow): number;
  labelOf(row: TraceRow): string;
}

export const FIGURE_KINDS: Record<FigureKind, KindSpec> = {
  "kl-vs-time": {
    xColumn: "sim_time",
    xLabel: "simulated time",
    xOf: (row) => row.sim_time,
    labelOf: (row) => `${row.algo} b=${row.b}`,
  },
  "kl-vs-cycles": {
    xColumn: "sim_time",
    xLabel: "simulated time / b",
    xOf: (row) => row.sim_time / row.b,
    labelOf: (row) => `${row.algo} b=${row.b}`,
  },
  "kl-vs-step": {
    xColumn: "cycle",
    xLabel: "cycles",
    xOf: (row) => row.cycle,
    labelOf: (row) => `lambda=${row.lambda.toPrecision(3)}`,
  },
  "kl-vs-perturbation": {
    xColumn: "sim_time",
    xLabel: "simulated time",
    xOf: (row) => row.sim_time,
    labelOf: (row) => `delta=${row.delta}`,
  },
};

/** Group rows into per-run series under the given figure kind. */
export function buildSeries(kind: FigureKind, rows: TraceRow[]): Series[] {
  const spec = FIGURE_KINDS[kind];
  const byRun = new Map<string, TraceRow[]>();
  for (const row of rows) {
    const bucket = byRun.get(row.run_id);
    if (bucket) {
      bucket.push(row);
    } else {
      byRun.set(row.run_id, [row]);
    }
  }
  const series: Series[] = [];
  for (const runId of [...byRun.keys()].sort()) {
    const runRows = byRun.get(runId)!;
    runRows.sort((a, b) => a.step_k - b.step_k);
    const points: Point[] = [];
    const boundPoints: Point[] = [];
    let divergedAt: number | null = null;
    for (const row of runRows) {
      const x = spec.xOf(row);
      if (row.diverged && divergedAt === null) {
        divergedAt = x;
      }
      if (row.kl !== null && row.kl > 0) {
        points.push({ x, y: row.kl });
      }
      if (row.kl_bound !== null && row.kl_bound > 0) {
        boundPoints.push({ x, y: row.kl_bound });
      }
    }
    series.push({
      label: spec.labelOf(runRows[0]),
      runId,
      points,
      boundPoints,
      divergedAt,
    });
  }
  return series;
}

/**
 * Inset data for paired-selection figures: the mean absolute KL difference
 * between the randomized and cyclic run of each block count.
 */
export function selectionGapByBlockCount(
  rows: TraceRow[],
): { b: number; meanAbsDiff: number }[] {
  const byKey = new Map<string, Map<number, number>>();
  const blockCounts = new Set<number>();
  for (const row of rows) {
    if (row.kl === null) continue;
    blockCounts.add(row.b);
    const key = `${row.algo}|${row.b}`;
    if (!byKey.has(key)) byKey.set(key, new Map());
    byKey.get(key)!.set(row.step_k, row.kl);
  }
  const result: { b: number; meanAbsDiff: number }[] = [];
  for (const b of [...blockCounts].sort((p, q) => p - q)) {
    const rand = byKey.get(`rbld|${b}`);
    const cyc = byKey.get(`cbld|${b}`);
    if (!rand || !cyc) continue;
    let sum = 0;
    let count = 0;
    for (const [step, kl] of rand) {
      const other = cyc.get(step);
      if (other !== undefined) {
        sum += Math.abs(kl - other);
        count += 1;
      }
    }
    if (count > 0) {
      result.push({ b, meanAbsDiff: sum / count });
    }
  }
  return result;
}
