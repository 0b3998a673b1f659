import { describe, expect, it } from "vitest";

import { render, renderHistogramOverlay } from "../src/plots.js";

function histCsv(m: number, counts: number[], localCount: number): string {
  const total = counts.reduce((a, b) => a + b, 0) + localCount;
  const mode = counts.indexOf(Math.max(...counts));
  const lines = [
    `# spec: {"framework": "full", "m": ${m}, "method": "iid", "scenario_kind": "2m2", "seed": 1}`,
    `# summary: {"local_count": ${localCount}, "mode_bin": ${mode}, "total": ${total}}`,
    "bin_index,bin_lo,bin_hi,count",
  ];
  counts.forEach((c, i) => {
    lines.push(`${i},${i * 0.05},${(i + 1) * 0.05},${c}`);
  });
  return lines.join("\n") + "\n";
}

describe("histogram overlay", () => {
  it("renders one series per input with a legend", () => {
    const { svg } = render({
      kind: "histogram-overlay",
      inputs: [histCsv(3, [5, 9, 2], 4), histCsv(4, [1, 6, 13], 0)],
    });
    expect(svg).toContain("<svg");
    expect(svg).toContain("m=3 (full)");
    expect(svg).toContain("m=4 (full)");
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThan(5);
  });

  it("probability normalization sums to 1 - local_fraction within 1e-9", () => {
    const { checks } = renderHistogramOverlay({
      kind: "histogram-overlay",
      inputs: [histCsv(3, [7, 11, 3], 9), histCsv(5, [2, 4, 8], 1)],
      normalize: "probability",
    });
    for (const c of checks) {
      expect(Math.abs(c.sum - c.expected)).toBeLessThan(1e-9);
    }
    expect(checks[0].expected).toBeCloseTo(21 / 30, 12);
  });

  it("annotates an all-local input instead of failing", () => {
    const { svg } = render({
      kind: "histogram-overlay",
      inputs: [histCsv(2, [0, 0, 0], 50)],
    });
    expect(svg).toContain("all samples local");
  });

  it("is idempotent", () => {
    const spec = {
      kind: "histogram-overlay" as const,
      inputs: [histCsv(3, [5, 9, 2], 4)],
    };
    expect(render(spec).svg).toBe(render(spec).svg);
  });
});

describe("volume decay", () => {
  const vol = (scenario: string, frac: number): string =>
    "scenario,n_samples,local_count,local_fraction,ns_acceptance\n" +
    `"${scenario}",100000,${Math.round(frac * 100000)},${frac},\n`;

  it("plots fractions against scenario size on a log axis", () => {
    const { svg, checks } = render({
      kind: "volume-decay",
      inputs: [
        vol("(2,2,2)/full", 0.6666),
        vol("(2,3,2)/full", 0.1401),
        vol("(2,4,2)/full", 0.00847),
      ],
    });
    expect(svg).toContain("<polyline");
    expect(checks.map((c) => c.label)).toEqual([
      "(2,2,2)/full",
      "(2,3,2)/full",
      "(2,4,2)/full",
    ]);
    for (const c of checks) {
      expect(Math.abs(c.sum - c.expected)).toBeLessThan(1e-9);
    }
  });

  it("fails on an empty CSV", () => {
    expect(() =>
      render({
        kind: "volume-decay",
        inputs: ["scenario,n_samples,local_count,local_fraction,ns_acceptance\n"],
      }),
    ).toThrowError(/at least one/);
  });
});

describe("cycle ratio", () => {
  it("plots n against the analytic ratio", () => {
    const csv =
      "n,pyramid_volume,local_ratio\n" +
      "2,0.66666666666666663,0.66666666666666663\n" +
      "3,0.088888888888888892,0.9555555555555556\n" +
      "4,0.0063492063492063492,0.99682539682539684\n";
    const { svg, checks } = render({ kind: "cycle-ratio", inputs: [csv] });
    expect(svg).toContain("<circle");
    expect(checks).toHaveLength(3);
    expect(checks[2].sum).toBeCloseTo(0.99682539682539684, 15);
  });
});
