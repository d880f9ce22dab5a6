/** Deterministic SVG chart primitives: fixed canvas, fixed fonts, no state. */

export const WIDTH = 840;
export const HEIGHT = 520;
export const MARGIN = { top: 40, right: 200, bottom: 56, left: 80 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export interface Scale {
  (value: number): number;
  ticks: number[];
}

const FONT = 'font-family="Helvetica, Arial, sans-serif"';

export function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((value: number) => rLo + ((value - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  const step = niceStep(hi - lo);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    ticks.push(round10(t));
  }
  f.ticks = ticks;
  return f;
}

export function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi <= lo ? lo * 10 : hi);
  const f = ((value: number) => rLo + ((Math.log10(value) - llo) / (lhi - llo)) * (rHi - rLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.floor(llo); e <= Math.ceil(lhi); e++) {
    const t = Math.pow(10, e);
    if (t >= lo / 1.0001 && t <= hi * 1.0001) {
      ticks.push(t);
    }
  }
  f.ticks = ticks;
  return f;
}

function niceStep(span: number): number {
  const raw = span / 6;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return step * mag;
}

function round10(x: number): number {
  return Number(x.toPrecision(10));
}

export function fmtTick(x: number): string {
  if (x !== 0 && (Math.abs(x) < 1e-3 || Math.abs(x) >= 1e5)) {
    return x.toExponential(0);
  }
  return String(round10(x));
}

export class SvgChart {
  private parts: string[] = [];

  constructor(readonly title: string, readonly xLabel: string, readonly yLabel: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="24" text-anchor="middle" ${FONT} font-size="16">${esc(title)}</text>`,
      `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 12}" text-anchor="middle" ${FONT} font-size="13">${esc(xLabel)}</text>`,
      `<text x="20" y="${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2}" text-anchor="middle" ${FONT} font-size="13" transform="rotate(-90 20 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})">${esc(yLabel)}</text>`,
    );
  }

  axes(x: Scale, y: Scale): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
    );
    for (const t of x.ticks) {
      const px = x(t);
      this.parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
        `<text x="${px}" y="${y0 + 20}" text-anchor="middle" ${FONT} font-size="11">${fmtTick(t)}</text>`,
      );
    }
    for (const t of y.ticks) {
      const py = y(t);
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
        `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#dddddd"/>`,
        `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end" ${FONT} font-size="11">${fmtTick(t)}</text>`,
      );
    }
  }

  polyline(points: Array<[number, number]>, color: string): void {
    if (points.length === 0) {
      return;
    }
    const d = points.map(([px, py]) => `${px.toFixed(2)},${py.toFixed(2)}`).join(" ");
    this.parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    for (const [px, py] of points) {
      this.parts.push(`<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="2.4" fill="${color}"/>`);
    }
  }

  bar(px: number, py: number, w: number, h: number, color: string): void {
    this.parts.push(
      `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${color}"/>`,
    );
  }

  legend(labels: string[], colors: string[]): void {
    const x = WIDTH - MARGIN.right + 16;
    labels.forEach((label, i) => {
      const y = MARGIN.top + 10 + i * 20;
      this.parts.push(
        `<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${colors[i]}"/>`,
        `<text x="${x + 18}" y="${y + 2}" ${FONT} font-size="12">${esc(label)}</text>`,
      );
    });
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
