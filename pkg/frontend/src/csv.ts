/** Minimal CSV reader for the simulator's outputs (plain comma-separated,
 * no quoting, first row is the header). */

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new CsvError(`row ${i + 2} has ${row.length} fields, expected ${header.length}`);
    }
  }
  return { header, rows };
}

/** Column accessor that names every missing column in one diagnostic. */
export function columns(table: Table, names: string[]): Map<string, number> {
  const index = new Map<string, number>();
  const missing: string[] = [];
  for (const name of names) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      missing.push(name);
    } else {
      index.set(name, i);
    }
  }
  if (missing.length > 0) {
    throw new CsvError(
      `missing required column(s): ${missing.join(", ")} (header: ${table.header.join(", ")})`,
    );
  }
  return index;
}
