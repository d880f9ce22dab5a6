/** Figure definitions: which CSV columns each figure needs, how its series are
 * grouped, and whether the value axis is logarithmic. */

import { columns, CsvError, Table } from "./csv.js";
import { HEIGHT, linearScale, logScale, MARGIN, PALETTE, SvgChart, WIDTH } from "./svg.js";

export const FIGURE_IDS = [5, 6, 7, 8, 9, 10, 11] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

const SIM_COLUMNS = ["scheduler", "cbr", "num_ues", "prob_keep", "churn", "rc_la",
  "seed", "t_seconds", "collision_prob", "ci95"];

export function requiredColumns(id: FigureId): string[] {
  switch (id) {
    case 5:
      return ["n_subch", "bits_no_offset", "bits_with_offset"];
    case 6:
      return ["cbr", "p_col_sps", "p_col_spsla"];
    default:
      return SIM_COLUMNS;
  }
}

export function logYAxis(id: FigureId): boolean {
  // time-series and closed-form comparisons span orders of magnitude;
  // the sweep bar charts read better on a linear value axis
  return id === 6 || id === 7 || id === 8;
}

interface Series {
  label: string;
  points: Array<[number, number]>;
}

function num(v: string, what: string): number {
  const x = Number(v);
  if (!Number.isFinite(x)) {
    throw new CsvError(`non-numeric value ${JSON.stringify(v)} in column ${what}`);
  }
  return x;
}

function lineSeries(table: Table, xCol: string, yCols: string[]): Series[] {
  const idx = columns(table, [xCol, ...yCols]);
  return yCols.map((yCol) => ({
    label: yCol,
    points: table.rows.map((r): [number, number] => [
      num(r[idx.get(xCol)!], xCol),
      num(r[idx.get(yCol)!], yCol),
    ]),
  }));
}

/** Aggregate rows of the simulator's series output, one line per
 * (scheduler, parameter group). */
function simSeries(table: Table, groupCols: string[], xCol: string): Series[] {
  const idx = columns(table, SIM_COLUMNS);
  const groups = new Map<string, Array<[number, number]>>();
  for (const row of table.rows) {
    if (row[idx.get("seed")!] !== "agg") {
      continue;
    }
    const label = groupCols
      .map((c) => `${c}=${row[idx.get(c)!]}`)
      .join(" ");
    const x = num(row[idx.get(xCol)!], xCol);
    const y = num(row[idx.get("collision_prob")!], "collision_prob");
    if (!groups.has(label)) {
      groups.set(label, []);
    }
    groups.get(label)!.push([x, y]);
  }
  return [...groups.entries()].map(([label, points]) => ({
    label,
    points: points.sort((a, b) => a[0] - b[0]),
  }));
}

function drawLines(title: string, xLabel: string, yLabel: string, series: Series[],
                   logY: boolean): string {
  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    throw new CsvError("no data rows to plot");
  }
  const xs = all.map((p) => p[0]);
  const positives = all.map((p) => p[1]).filter((v) => v > 0);
  const chart = new SvgChart(title, xLabel, yLabel);
  const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, WIDTH - MARGIN.right);
  let y;
  if (logY) {
    // log axis cannot carry zeros; series that never collided are legended as such
    const lo = positives.length ? Math.min(...positives) : 1e-7;
    const hi = positives.length ? Math.max(...positives) : 1;
    y = logScale(lo, hi, HEIGHT - MARGIN.bottom, MARGIN.top);
  } else {
    const ys = all.map((p) => p[1]);
    y = linearScale(Math.min(0, ...ys), Math.max(...ys), HEIGHT - MARGIN.bottom, MARGIN.top);
  }
  chart.axes(x, y);
  const labels: string[] = [];
  const colors: string[] = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = (logY ? s.points.filter(([, v]) => v > 0) : s.points)
      .map(([px, py]): [number, number] => [x(px), y(py)]);
    chart.polyline(pts, color);
    labels.push(logY && pts.length === 0 ? `${s.label} (all zero)` : s.label);
    colors.push(color);
  });
  chart.legend(labels, colors);
  return chart.render();
}

/** Bars grouped along x by one column, one colored bar per series label. */
function drawGroupedBars(title: string, xLabel: string, yLabel: string,
                         table: Table, groupCol: string, seriesCols: string[]): string {
  const idx = columns(table, SIM_COLUMNS);
  const agg = table.rows.filter((r) => r[idx.get("seed")!] === "agg");
  if (agg.length === 0) {
    throw new CsvError("no aggregate data rows to plot");
  }
  const groupValues = [...new Set(agg.map((r) => r[idx.get(groupCol)!]))]
    .sort((a, b) => Number(a) - Number(b));
  const seriesLabels = [...new Set(agg.map((r) =>
    seriesCols.map((c) => `${c}=${r[idx.get(c)!]}`).join(" ")))].sort();
  const values = new Map<string, number>();
  for (const row of agg) {
    const key = row[idx.get(groupCol)!] + "|" +
      seriesCols.map((c) => `${c}=${row[idx.get(c)!]}`).join(" ");
    values.set(key, num(row[idx.get("collision_prob")!], "collision_prob"));
  }
  const chart = new SvgChart(title, xLabel, yLabel);
  const maxY = Math.max(...values.values(), 0);
  const y = linearScale(0, maxY || 1, HEIGHT - MARGIN.bottom, MARGIN.top);
  const x0 = MARGIN.left;
  const span = WIDTH - MARGIN.right - x0;
  const groupW = span / groupValues.length;
  const barW = (groupW * 0.8) / seriesLabels.length;
  const x = linearScale(0, 1, 0, 1);
  x.ticks = [];
  chart.axes(x, y);
  groupValues.forEach((g, gi) => {
    const cx = x0 + gi * groupW + groupW / 2;
    seriesLabels.forEach((label, si) => {
      const v = values.get(`${g}|${label}`);
      if (v === undefined) {
        return;
      }
      const px = cx - (seriesLabels.length * barW) / 2 + si * barW;
      chart.bar(px, y(v), barW - 1, HEIGHT - MARGIN.bottom - y(v), PALETTE[si % PALETTE.length]);
    });
  });
  // group tick labels
  const labelParts = groupValues.map((g, gi) => {
    const cx = x0 + gi * groupW + groupW / 2;
    return { g, cx };
  });
  const extra = labelParts.map(({ g, cx }) =>
    `<text x="${cx}" y="${HEIGHT - MARGIN.bottom + 20}" text-anchor="middle" ` +
    `font-family="Helvetica, Arial, sans-serif" font-size="11">${g}</text>`).join("\n");
  chart.legend(seriesLabels, seriesLabels.map((_, i) => PALETTE[i % PALETTE.length]));
  return chart.render().replace("</svg>", extra + "\n</svg>");
}

export function renderFigure(id: FigureId, table: Table): string {
  switch (id) {
    case 5:
      return drawLines("Control-message bits to carry a lookahead", "subchannels",
        "additional bits", lineSeries(table, "n_subch", ["bits_no_offset", "bits_with_offset"]),
        false);
    case 6:
      return drawLines("Reselection collision probability (closed form)",
        "channel busy ratio", "collision probability",
        lineSeries(table, "cbr", ["p_col_sps", "p_col_spsla"]), true);
    case 7:
      return drawLines("Collision probability over time, light load",
        "time (s)", "collision probability",
        simSeries(table, ["scheduler", "cbr"], "t_seconds"), true);
    case 8:
      return drawLines("Collision probability over time, heavy load",
        "time (s)", "collision probability",
        simSeries(table, ["scheduler", "cbr"], "t_seconds"), true);
    case 9:
      return drawGroupedBars("Keep-probability sweep, light load",
        "channel busy ratio (%)", "collision probability", table, "cbr",
        ["scheduler", "prob_keep"]);
    case 10:
      return drawGroupedBars("Keep-probability sweep, heavy load",
        "channel busy ratio (%)", "collision probability", table, "cbr",
        ["scheduler", "prob_keep"]);
    case 11:
      return drawGroupedBars("Collision probability under population churn",
        "churn rate (fraction/s)", "collision probability", table, "churn",
        ["scheduler"]);
    default: {
      const never: never = id;
      throw new CsvError(`unknown figure id ${never}`);
    }
  }
}
