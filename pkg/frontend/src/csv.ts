/**
 * Parsers for the CSV files emitted by the `bellgeo` CLI.
 *
 * Every parser validates the documented header schema and reports the
 * offending column by name on mismatch.
 */

export class SchemaError extends Error {
  constructor(file: string, message: string) {
    super(`${file}: ${message}`);
    this.name = "SchemaError";
  }
}

export interface HistogramData {
  spec: Record<string, unknown> | null;
  total: number;
  localCount: number;
  modeBin: number;
  binLo: number[];
  binHi: number[];
  counts: number[];
}

export interface VolumeRow {
  scenario: string;
  nSamples: number;
  localCount: number;
  localFraction: number;
  nsAcceptance: number | null;
}

export interface CycleRow {
  n: number;
  pyramidVolume: number;
  localRatio: number;
}

export interface DistanceData {
  scenario: string | null;
  eps: number | null;
  seed: number | null;
  nl: number[];
}

export interface SampleData {
  config: Record<string, unknown> | null;
  samples: number[][];
}

export interface NormsRow {
  m: number;
  nSamples: number;
  fracPiLe1: number;
  fracGamma2Le1: number;
  medianRatio: number;
  meanFlatness: number;
}

interface Parsed {
  comments: string[];
  header: string[];
  rows: string[][];
}

function splitCsv(text: string): { comments: string[]; lines: string[] } {
  const comments: string[] = [];
  const lines: string[] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trimEnd();
    if (line.length === 0) continue;
    if (line.startsWith("#")) comments.push(line);
    else lines.push(line);
  }
  return { comments, lines };
}

/** Split one CSV row; double quotes protect embedded commas. */
export function splitRow(line: string): string[] {
  const out: string[] = [];
  let cur = "";
  let quoted = false;
  for (const ch of line) {
    if (ch === '"') quoted = !quoted;
    else if (ch === "," && !quoted) {
      out.push(cur);
      cur = "";
    } else cur += ch;
  }
  out.push(cur);
  return out;
}

function parseTable(file: string, text: string, expected: string[]): Parsed {
  const { comments, lines } = splitCsv(text);
  if (lines.length === 0) throw new SchemaError(file, "no header row");
  const header = lines[0].split(",");
  for (let i = 0; i < expected.length; i++) {
    if (header[i] !== expected[i]) {
      throw new SchemaError(
        file,
        `expected column ${i} to be "${expected[i]}", found "${header[i] ?? "<missing>"}"`,
      );
    }
  }
  const rows = lines.slice(1).map(splitRow);
  return { comments, header, rows };
}

function num(file: string, column: string, value: string | undefined): number {
  if (value === undefined || value === "") {
    throw new SchemaError(file, `missing value in column "${column}"`);
  }
  const v = Number(value);
  if (!Number.isFinite(v)) {
    throw new SchemaError(file, `non-numeric value "${value}" in column "${column}"`);
  }
  return v;
}

function commentJson(comments: string[], prefix: string): Record<string, unknown> | null {
  for (const c of comments) {
    const body = c.replace(/^#\s*/, "");
    if (body.startsWith(prefix)) {
      try {
        return JSON.parse(body.slice(prefix.length)) as Record<string, unknown>;
      } catch {
        return null;
      }
    }
  }
  return null;
}

export function parseHistogramCsv(text: string, file = "histogram.csv"): HistogramData {
  const { comments, rows } = parseTable(file, text, [
    "bin_index",
    "bin_lo",
    "bin_hi",
    "count",
  ]);
  const spec = commentJson(comments, "spec: ");
  const summary = commentJson(comments, "summary: ");
  if (summary === null) throw new SchemaError(file, "missing '# summary:' comment");
  const binLo: number[] = [];
  const binHi: number[] = [];
  const counts: number[] = [];
  rows.forEach((r, i) => {
    const idx = num(file, "bin_index", r[0]);
    if (idx !== i) throw new SchemaError(file, `bin_index ${idx} out of order at row ${i}`);
    binLo.push(num(file, "bin_lo", r[1]));
    binHi.push(num(file, "bin_hi", r[2]));
    counts.push(num(file, "count", r[3]));
  });
  const total = Number(summary["total"]);
  const localCount = Number(summary["local_count"]);
  const counted = counts.reduce((a, b) => a + b, 0);
  if (counted + localCount !== total) {
    throw new SchemaError(
      file,
      `count total ${counted} + local_count ${localCount} != total ${total}`,
    );
  }
  return {
    spec,
    total,
    localCount,
    modeBin: Number(summary["mode_bin"]),
    binLo,
    binHi,
    counts,
  };
}

export function parseVolumeCsv(text: string, file = "volume.csv"): VolumeRow[] {
  const { rows } = parseTable(file, text, [
    "scenario",
    "n_samples",
    "local_count",
    "local_fraction",
    "ns_acceptance",
  ]);
  return rows.map((r) => ({
    scenario: r[0],
    nSamples: num(file, "n_samples", r[1]),
    localCount: num(file, "local_count", r[2]),
    localFraction: num(file, "local_fraction", r[3]),
    nsAcceptance: r[4] === undefined || r[4] === "" ? null : num(file, "ns_acceptance", r[4]),
  }));
}

export function parseCycleAnalyticCsv(text: string, file = "cycle.csv"): CycleRow[] {
  const { rows } = parseTable(file, text, ["n", "pyramid_volume", "local_ratio"]);
  return rows.map((r) => ({
    n: num(file, "n", r[0]),
    pyramidVolume: num(file, "pyramid_volume", r[1]),
    localRatio: num(file, "local_ratio", r[2]),
  }));
}

export function parseDistanceCsv(text: string, file = "distance.csv"): DistanceData {
  const { comments, rows } = parseTable(file, text, ["sample_index", "nl"]);
  const meta: Record<string, string> = {};
  for (const c of comments) {
    const m = /^#\s*(\w+):\s*(.*)$/.exec(c);
    if (m) meta[m[1]] = m[2];
  }
  return {
    scenario: meta["scenario"] ?? null,
    eps: meta["eps"] !== undefined ? Number(meta["eps"]) : null,
    seed: meta["seed"] !== undefined ? Number(meta["seed"]) : null,
    nl: rows.map((r) => num(file, "nl", r[1])),
  };
}

export function parseSampleCsv(text: string, file = "samples.csv"): SampleData {
  const { comments, lines } = splitCsv(text);
  if (lines.length === 0) throw new SchemaError(file, "no header row");
  const header = lines[0].split(",");
  if (header[0] !== "sample_index") {
    throw new SchemaError(file, `expected column 0 to be "sample_index", found "${header[0]}"`);
  }
  header.slice(1).forEach((h, i) => {
    if (h !== `coord_${i}`) {
      throw new SchemaError(file, `expected column ${i + 1} to be "coord_${i}", found "${h}"`);
    }
  });
  let config: Record<string, unknown> | null = null;
  if (comments.length > 0) {
    try {
      config = JSON.parse(comments[0].replace(/^#\s*/, "")) as Record<string, unknown>;
    } catch {
      config = null;
    }
  }
  const dim = header.length - 1;
  const samples = lines.slice(1).map((l) => {
    const parts = l.split(",");
    if (parts.length !== dim + 1) {
      throw new SchemaError(file, `row has ${parts.length - 1} coords, expected ${dim}`);
    }
    return parts.slice(1).map((v, i) => num(file, `coord_${i}`, v));
  });
  return { config, samples };
}

export function parseNormsCsv(text: string, file = "norms.csv"): NormsRow[] {
  const { rows } = parseTable(file, text, [
    "m",
    "n_samples",
    "frac_pi_le_1",
    "frac_gamma2_le_1",
    "median_ratio",
    "mean_flatness",
  ]);
  return rows.map((r) => ({
    m: num(file, "m", r[0]),
    nSamples: num(file, "n_samples", r[1]),
    fracPiLe1: num(file, "frac_pi_le_1", r[2]),
    fracGamma2Le1: num(file, "frac_gamma2_le_1", r[3]),
    medianRatio: num(file, "median_ratio", r[4]),
    meanFlatness: num(file, "mean_flatness", r[5]),
  }));
}
