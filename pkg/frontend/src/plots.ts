/** Plot builders: histogram overlays, volume-decay curves, cycle ratios. */

import {
  HistogramData,
  VolumeRow,
  CycleRow,
  parseCycleAnalyticCsv,
  parseHistogramCsv,
  parseVolumeCsv,
} from "./csv.js";
import { SERIES_COLORS, SvgScene } from "./svg.js";

export type PlotKind = "histogram-overlay" | "volume-decay" | "cycle-ratio";
export type Normalization = "counts" | "probability";

export interface PlotSpec {
  kind: PlotKind;
  inputs: string[]; // CSV file contents, in input order
  labels?: string[];
  normalize?: Normalization;
  title?: string;
}

export interface SeriesCheck {
  label: string;
  sum: number;
  expected: number;
}

export interface RenderResult {
  svg: string;
  checks: SeriesCheck[];
}

function seriesLabel(h: HistogramData, fallback: string): string {
  const spec = h.spec;
  if (spec) {
    const kind = spec["scenario_kind"];
    if (kind === "2m2" || kind === "22d") {
      const key = kind === "2m2" ? "m" : "d";
      return `${kind === "2m2" ? "m" : "d"}=${spec[key]} (${spec["framework"]})`;
    }
    if (kind === "N22") return `N=${spec["N"]} (${spec["framework"]})`;
    if (kind === "cycle") return `n=${spec["n"]} (${spec["framework"]})`;
  }
  return fallback;
}

/**
 * Overlaid NL-distance histograms, one series per input CSV.
 *
 * Probability normalization divides by the series' total sample count, so
 * each normalized series sums to 1 - local_fraction.
 */
export function renderHistogramOverlay(spec: PlotSpec): RenderResult {
  const series = spec.inputs.map((text, i) =>
    parseHistogramCsv(text, `input ${i}`),
  );
  const normalize = spec.normalize === "probability";
  const scene = new SvgScene();
  scene.title(spec.title ?? "Distance distribution of nonlocal samples");

  const checks: SeriesCheck[] = [];
  const labels = series.map(
    (h, i) => spec.labels?.[i] ?? seriesLabel(h, `series ${i + 1}`),
  );
  const allEmpty = series.every((h) => h.counts.every((c) => c === 0));
  const values = series.map((h, i) => {
    const v = normalize ? h.counts.map((c) => c / h.total) : h.counts.slice();
    checks.push({
      label: labels[i],
      sum: v.reduce((a, b) => a + b, 0),
      expected: normalize
        ? (h.total - h.localCount) / h.total
        : h.total - h.localCount,
    });
    return v;
  });

  const xMax = Math.max(...series.map((h) => h.binHi[h.binHi.length - 1]));
  const yMax = Math.max(1e-12, ...values.flat());
  const x = scene.xScale([0, xMax]);
  const y = scene.yScale([0, yMax * 1.05]);
  scene.axes(x, y, "NL distance", normalize ? "probability" : "count");
  series.forEach((h, i) => {
    scene.bars(x, y, h.binLo, h.binHi, values[i], SERIES_COLORS[i % SERIES_COLORS.length]);
  });
  scene.legend(labels, series.map((_, i) => SERIES_COLORS[i % SERIES_COLORS.length]));
  if (allEmpty) {
    scene.annotation("all samples local: empty nonlocal set");
  }
  return { svg: scene.render(), checks };
}

function volumeX(row: VolumeRow, index: number): number {
  // scenario strings look like "(2,m,2)/fw", "(N,2,2)/fw" or "cycle-n/fw"
  const bi = /^\((\d+),(\d+),(\d+)\)/.exec(row.scenario);
  if (bi) {
    const [, a, b] = bi;
    return a === "2" ? Number(b) : Number(a);
  }
  const cy = /^cycle-(\d+)/.exec(row.scenario);
  if (cy) return Number(cy[1]);
  return index + 2;
}

/** Local-fraction decay versus scenario size, log-scale y. */
export function renderVolumeDecay(spec: PlotSpec): RenderResult {
  const rows = spec.inputs.flatMap((text, i) => parseVolumeCsv(text, `input ${i}`));
  if (rows.length === 0) {
    throw new Error("volume-decay needs at least one volume CSV row");
  }
  const pts = rows
    .map((r, i) => ({ x: volumeX(r, i), y: r.localFraction, row: r }))
    .sort((a, b) => a.x - b.x);
  const scene = new SvgScene();
  scene.title(spec.title ?? "Local volume fraction");
  const yPos = pts.map((p) => Math.max(p.y, 1e-8));
  const x = scene.xScale([pts[0].x - 0.3, pts[pts.length - 1].x + 0.3]);
  const y = scene.yScale(
    [Math.min(...yPos) / 2, 1],
    true,
  );
  scene.axes(x, y, "scenario size", "local fraction (log)");
  scene.polyline(x, y, pts.map((p) => p.x), yPos, SERIES_COLORS[0], true);
  return {
    svg: scene.render(),
    checks: pts.map((p) => ({
      label: p.row.scenario,
      sum: p.row.localFraction,
      expected: p.row.localCount / p.row.nSamples,
    })),
  };
}

/** Analytic cycle local-volume ratio versus n. */
export function renderCycleRatio(spec: PlotSpec): RenderResult {
  const rows: CycleRow[] = spec.inputs.flatMap((text, i) =>
    parseCycleAnalyticCsv(text, `input ${i}`),
  );
  if (rows.length === 0) {
    throw new Error("cycle-ratio needs at least one cycle-analytic CSV row");
  }
  const scene = new SvgScene();
  scene.title(spec.title ?? "Cycle scenario: local volume ratio");
  const ns = rows.map((r) => r.n);
  const x = scene.xScale([Math.min(...ns) - 0.3, Math.max(...ns) + 0.3]);
  const y = scene.yScale([0, 1.05]);
  scene.axes(x, y, "cycle length n", "local ratio");
  scene.polyline(x, y, ns, rows.map((r) => r.localRatio), SERIES_COLORS[0], true);
  return {
    svg: scene.render(),
    checks: rows.map((r) => ({
      label: `n=${r.n}`,
      sum: r.localRatio,
      expected: r.localRatio,
    })),
  };
}

export function render(spec: PlotSpec): RenderResult {
  switch (spec.kind) {
    case "histogram-overlay":
      return renderHistogramOverlay(spec);
    case "volume-decay":
      return renderVolumeDecay(spec);
    case "cycle-ratio":
      return renderCycleRatio(spec);
  }
}
