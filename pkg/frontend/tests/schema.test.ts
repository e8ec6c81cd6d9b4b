import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseTraceCsv } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");

describe("trace CSV parsing", () => {
  it("parses a harness-produced file", () => {
    const rows = parseTraceCsv(
      readFileSync(join(FIXTURES, "fig2_cbld_b2.csv"), "utf-8"),
    );
    expect(rows.length).toBeGreaterThan(10);
    const first = rows[0];
    expect(first.algo).toBe("cbld");
    expect(first.b).toBe(2);
    expect(first.step_k).toBe(0);
    expect(first.kl).toBeGreaterThan(0);
    expect(first.diverged).toBe(false);
    // device time column is sim time scaled by the device constant
    const later = rows[rows.length - 1];
    expect(later.device_time_s).toBeCloseTo(later.sim_time * 1.55e-8, 18);
  });

  it("names the missing column", () => {
    const text = "run_id,algo,b\nx,cbld,1\n";
    expect(() => parseTraceCsv(text, "broken.csv")).toThrow(
      /broken\.csv: missing column 'lambda'/,
    );
  });

  it("treats empty metric cells as unavailable", () => {
    const rows = parseTraceCsv(
      readFileSync(join(FIXTURES, "fig3b_delta0.8.csv"), "utf-8"),
    );
    const last = rows[rows.length - 1];
    expect(last.diverged).toBe(true);
    expect(last.kl).toBeNull();
    expect(last.w2).toBeNull();
  });

  it("rejects an empty file", () => {
    expect(() => parseTraceCsv("", "empty.csv")).toThrow(/empty\.csv: empty/);
  });
});
