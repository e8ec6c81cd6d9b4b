/**
 * Minimal deterministic SVG line charts.
 *
 * Pure string construction: no timestamps, no randomness, fixed styling and
 * number formatting, so identical inputs give identical bytes.
 */

import type { Point, Series } from "./figures.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 200, bottom: 52, left: 72 };
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
  "#bcbd22",
  "#e377c2",
];

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  logX: boolean;
  inset?: { b: number; meanAbsDiff: number }[];
}

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

function fmtTick(v: number): string {
  const a = Math.abs(v);
  if (a === 0) return "0";
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(4)).toString();
}

class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly outLo: number,
    readonly outHi: number,
    readonly log: boolean,
  ) {}

  at(v: number): number {
    const t = this.log
      ? (Math.log10(v) - Math.log10(this.lo)) /
        (Math.log10(this.hi) - Math.log10(this.lo) || 1)
      : (v - this.lo) / (this.hi - this.lo || 1);
    return this.outLo + t * (this.outHi - this.outLo);
  }

  ticks(): number[] {
    if (this.log) {
      const lo = Math.floor(Math.log10(this.lo));
      const hi = Math.ceil(Math.log10(this.hi));
      const step = Math.max(1, Math.ceil((hi - lo) / 8));
      const out: number[] = [];
      for (let e = lo; e <= hi; e += step) out.push(10 ** e);
      return out;
    }
    const span = this.hi - this.lo || 1;
    const raw = span / 6;
    const mag = 10 ** Math.floor(Math.log10(raw));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 7) ?? mag * 10;
    const start = Math.ceil(this.lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= this.hi + 1e-12 * span; v += step) out.push(v);
    return out;
  }
}

function extent(values: number[], log: boolean): [number, number] {
  const usable = log ? values.filter((v) => v > 0) : values;
  if (usable.length === 0) return log ? [1e-3, 1] : [0, 1];
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  return [lo, hi];
}

function polyline(points: Point[], xs: Scale, ys: Scale): string {
  return points
    .filter((p) => (!ys.log || p.y > 0) && (!xs.log || p.x > 0))
    .map((p) => `${fmt(xs.at(p.x))},${fmt(ys.at(p.y))}`)
    .join(" ");
}

function insetPanel(data: { b: number; meanAbsDiff: number }[]): string {
  const x0 = WIDTH - MARGIN.right - 180;
  const y0 = MARGIN.top + 8;
  const w = 160;
  const h = 110;
  const xs = new Scale(0, data.length - 1 || 1, x0 + 34, x0 + w - 10, false);
  const [lo, hi] = extent(data.map((d) => d.meanAbsDiff), true);
  const ys = new Scale(lo, hi, y0 + h - 22, y0 + 16, true);
  const pieces = [
    `<rect x="${x0}" y="${y0}" width="${w}" height="${h}" fill="#ffffff" stroke="#999999"/>`,
    `<text x="${x0 + w / 2}" y="${y0 + 12}" font-size="10" text-anchor="middle">mean |randomized - cyclic|</text>`,
  ];
  const pts = data.map((d, i) => `${fmt(xs.at(i))},${fmt(ys.at(d.meanAbsDiff))}`);
  pieces.push(
    `<polyline points="${pts.join(" ")}" fill="none" stroke="#333333" stroke-width="1.5"/>`,
  );
  data.forEach((d, i) => {
    pieces.push(
      `<circle cx="${fmt(xs.at(i))}" cy="${fmt(ys.at(d.meanAbsDiff))}" r="2.5" fill="#333333"/>`,
      `<text x="${fmt(xs.at(i))}" y="${y0 + h - 8}" font-size="9" text-anchor="middle">b=${d.b}</text>`,
    );
  });
  return pieces.join("\n");
}

/** Render series to a complete SVG document string. */
export function renderChart(series: Series[], options: ChartOptions): string {
  const xsAll = series.flatMap((s) => s.points.map((p) => p.x));
  const ysAll = series.flatMap((s) => [
    ...s.points.map((p) => p.y),
    ...s.boundPoints.map((p) => p.y),
  ]);
  const [xLo, xHi] = extent(xsAll, options.logX);
  const [yLo, yHi] = extent(ysAll, options.logY);
  const xs = new Scale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right, options.logX);
  const ys = new Scale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top, options.logY);

  const body: string[] = [];
  body.push(
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="24" font-size="15" text-anchor="middle">${options.title}</text>`,
  );

  for (const tick of xs.ticks()) {
    const px = xs.at(tick);
    body.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top}" x2="${fmt(px)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eeeeee"/>`,
      `<text x="${fmt(px)}" y="${HEIGHT - MARGIN.bottom + 16}" font-size="10" text-anchor="middle">${fmtTick(tick)}</text>`,
    );
  }
  for (const tick of ys.ticks()) {
    const py = ys.at(tick);
    body.push(
      `<line x1="${MARGIN.left}" y1="${fmt(py)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(py)}" stroke="#eeeeee"/>`,
      `<text x="${MARGIN.left - 6}" y="${fmt(py)}" font-size="10" text-anchor="end" dominant-baseline="middle">${fmtTick(tick)}</text>`,
    );
  }
  body.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#333333"/>`,
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 14}" font-size="12" text-anchor="middle">${options.xLabel}</text>`,
    `<text x="20" y="${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 20 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})">${options.yLabel}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (s.boundPoints.length > 1) {
      body.push(
        `<polyline points="${polyline(s.boundPoints, xs, ys)}" fill="none" stroke="${color}" stroke-width="1" stroke-dasharray="5,4" opacity="0.7"/>`,
      );
    }
    if (s.points.length > 0) {
      body.push(
        `<polyline points="${polyline(s.points, xs, ys)}" fill="none" stroke="${color}" stroke-width="1.6"/>`,
      );
    }
    if (s.divergedAt !== null && (!xs.log || s.divergedAt > 0)) {
      const px = fmt(xs.at(s.divergedAt));
      body.push(
        `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${HEIGHT - MARGIN.bottom}" stroke="${color}" stroke-width="1" stroke-dasharray="2,3"/>`,
        `<text x="${px}" y="${MARGIN.top + 12}" font-size="10" fill="${color}" text-anchor="middle">diverged</text>`,
      );
    }
    const ly = MARGIN.top + 14 + i * 16;
    const lx = WIDTH - MARGIN.right + 12;
    body.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${lx + 28}" y="${ly}" font-size="11">${s.label}</text>`,
    );
  });

  if (options.inset && options.inset.length > 0) {
    body.push(insetPanel(options.inset));
  }

  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
