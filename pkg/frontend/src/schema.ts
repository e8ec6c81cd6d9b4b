/**
 * Trace CSV schema: parsing and validation.
 *
 * The simulation harness pins this header exactly; empty metric cells mean
 * "unavailable" (degenerate estimate or post-divergence row).
 */

export const CSV_HEADER = [
  "run_id",
  "algo",
  "b",
  "lambda",
  "delta",
  "seed",
  "step_k",
  "cycle",
  "sim_time",
  "device_time_s",
  "kl",
  "w2",
  "kl_bound",
  "diverged",
] as const;

export type ColumnName = (typeof CSV_HEADER)[number];

export interface TraceRow {
  run_id: string;
  algo: string;
  b: number;
  lambda: number;
  delta: number;
  seed: number;
  step_k: number;
  cycle: number;
  sim_time: number;
  device_time_s: number;
  kl: number | null;
  w2: number | null;
  kl_bound: number | null;
  diverged: boolean;
}

function parseOptional(cell: string): number | null {
  return cell === "" ? null : Number(cell);
}

/** Parse one CSV file's text; throws naming any missing column. */
export function parseTraceCsv(text: string, source = "<csv>"): TraceRow[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  for (const required of CSV_HEADER) {
    if (!header.includes(required)) {
      throw new Error(`${source}: missing column '${required}'`);
    }
  }
  const col = new Map(header.map((name, i) => [name, i]));
  const rows: TraceRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const at = (name: ColumnName) => cells[col.get(name)!];
    rows.push({
      run_id: at("run_id"),
      algo: at("algo"),
      b: Number(at("b")),
      lambda: Number(at("lambda")),
      delta: Number(at("delta")),
      seed: Number(at("seed")),
      step_k: Number(at("step_k")),
      cycle: Number(at("cycle")),
      sim_time: Number(at("sim_time")),
      device_time_s: Number(at("device_time_s")),
      kl: parseOptional(at("kl")),
      w2: parseOptional(at("w2")),
      kl_bound: parseOptional(at("kl_bound")),
      diverged: at("diverged") === "true",
    });
  }
  return rows;
}
