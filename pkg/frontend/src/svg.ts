/** Minimal SVG scene builder: axes, bars, polylines, legend. */

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const DEFAULT_MARGINS: Margins = { top: 40, right: 30, bottom: 50, left: 70 };

export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class LinearScale {
  constructor(
    readonly domain: [number, number],
    readonly range: [number, number],
    readonly log = false,
  ) {}

  map(v: number): number {
    const [d0, d1] = this.domain;
    const [r0, r1] = this.range;
    const t = this.log
      ? (Math.log10(v) - Math.log10(d0)) / (Math.log10(d1) - Math.log10(d0))
      : (v - d0) / (d1 - d0);
    return r0 + t * (r1 - r0);
  }

  ticks(count = 6): number[] {
    const [d0, d1] = this.domain;
    if (this.log) {
      const lo = Math.ceil(Math.log10(d0));
      const hi = Math.floor(Math.log10(d1));
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(10 ** e);
      return out.length >= 2 ? out : [d0, d1];
    }
    const span = d1 - d0;
    const step = 10 ** Math.floor(Math.log10(span / count));
    const mult = [1, 2, 5, 10].find((k) => span / (k * step) <= count) ?? 10;
    const s = mult * step;
    const out: number[] = [];
    for (let v = Math.ceil(d0 / s) * s; v <= d1 + 1e-12; v += s) out.push(v);
    return out;
  }
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(6)));
  return v.toExponential(0);
}

export class SvgScene {
  private parts: string[] = [];

  constructor(
    readonly width = 720,
    readonly height = 480,
    readonly margins: Margins = DEFAULT_MARGINS,
  ) {}

  get plotLeft(): number {
    return this.margins.left;
  }
  get plotRight(): number {
    return this.width - this.margins.right;
  }
  get plotTop(): number {
    return this.margins.top;
  }
  get plotBottom(): number {
    return this.height - this.margins.bottom;
  }

  xScale(domain: [number, number], log = false): LinearScale {
    return new LinearScale(domain, [this.plotLeft, this.plotRight], log);
  }

  yScale(domain: [number, number], log = false): LinearScale {
    return new LinearScale(domain, [this.plotBottom, this.plotTop], log);
  }

  title(text: string): void {
    this.parts.push(
      `<text x="${this.width / 2}" y="22" text-anchor="middle" font-size="16" ` +
        `font-family="sans-serif">${esc(text)}</text>`,
    );
  }

  axes(x: LinearScale, y: LinearScale, xLabel: string, yLabel: string): void {
    const b = this.plotBottom;
    const l = this.plotLeft;
    this.parts.push(
      `<line x1="${l}" y1="${b}" x2="${this.plotRight}" y2="${b}" stroke="black"/>`,
      `<line x1="${l}" y1="${b}" x2="${l}" y2="${this.plotTop}" stroke="black"/>`,
    );
    for (const t of x.ticks()) {
      const px = x.map(t);
      this.parts.push(
        `<line x1="${px.toFixed(2)}" y1="${b}" x2="${px.toFixed(2)}" y2="${b + 5}" stroke="black"/>`,
        `<text x="${px.toFixed(2)}" y="${b + 18}" text-anchor="middle" font-size="11" ` +
          `font-family="sans-serif">${esc(fmtTick(t))}</text>`,
      );
    }
    for (const t of y.ticks()) {
      const py = y.map(t);
      this.parts.push(
        `<line x1="${l - 5}" y1="${py.toFixed(2)}" x2="${l}" y2="${py.toFixed(2)}" stroke="black"/>`,
        `<text x="${l - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11" ` +
          `font-family="sans-serif">${esc(fmtTick(t))}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(l + this.plotRight) / 2}" y="${this.height - 10}" text-anchor="middle" ` +
        `font-size="13" font-family="sans-serif">${esc(xLabel)}</text>`,
      `<text x="18" y="${(b + this.plotTop) / 2}" text-anchor="middle" font-size="13" ` +
        `font-family="sans-serif" transform="rotate(-90 18 ${(b + this.plotTop) / 2})">` +
        `${esc(yLabel)}</text>`,
    );
  }

  bars(
    x: LinearScale,
    y: LinearScale,
    lo: number[],
    hi: number[],
    values: number[],
    color: string,
    opacity = 0.55,
  ): void {
    for (let i = 0; i < values.length; i++) {
      if (values[i] <= 0) continue;
      const x0 = x.map(lo[i]);
      const x1 = x.map(hi[i]);
      const y1 = y.map(values[i]);
      this.parts.push(
        `<rect x="${x0.toFixed(2)}" y="${y1.toFixed(2)}" width="${(x1 - x0).toFixed(2)}" ` +
          `height="${(this.plotBottom - y1).toFixed(2)}" fill="${color}" ` +
          `fill-opacity="${opacity}"/>`,
      );
    }
  }

  polyline(
    x: LinearScale,
    y: LinearScale,
    xs: number[],
    ys: number[],
    color: string,
    withMarkers = false,
  ): void {
    const pts = xs
      .map((v, i) => `${x.map(v).toFixed(2)},${y.map(ys[i]).toFixed(2)}`)
      .join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    if (withMarkers) {
      xs.forEach((v, i) => {
        this.parts.push(
          `<circle cx="${x.map(v).toFixed(2)}" cy="${y.map(ys[i]).toFixed(2)}" r="3.5" ` +
            `fill="${color}"/>`,
        );
      });
    }
  }

  legend(labels: string[], colors: string[]): void {
    labels.forEach((label, i) => {
      const yPos = this.plotTop + 8 + 18 * i;
      const xPos = this.plotRight - 150;
      this.parts.push(
        `<rect x="${xPos}" y="${yPos - 9}" width="12" height="12" fill="${colors[i]}" ` +
          `fill-opacity="0.8"/>`,
        `<text x="${xPos + 18}" y="${yPos + 1}" font-size="12" font-family="sans-serif">` +
          `${esc(label)}</text>`,
      );
    });
  }

  annotation(text: string): void {
    this.parts.push(
      `<text x="${(this.plotLeft + this.plotRight) / 2}" ` +
        `y="${(this.plotTop + this.plotBottom) / 2}" text-anchor="middle" font-size="14" ` +
        `font-family="sans-serif" fill="#666">${esc(text)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}
