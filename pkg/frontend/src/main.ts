/** CLI: figures <figure-id> <csv> <out-image>
 *
 * Reads one of the simulator's CSV outputs and writes a deterministic SVG.
 * Exits 1 with a column diagnosis on schema mismatches; writes nothing then.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, CsvError } from "./csv.js";
import { FIGURE_IDS, FigureId, renderFigure } from "./figures.js";

export function run(argv: string[]): number {
  if (argv.length !== 3) {
    console.error("usage: figures <figure-id 5..11> <input.csv> <output.svg>");
    return 1;
  }
  const [idArg, csvPath, outPath] = argv;
  const id = Number(idArg);
  if (!FIGURE_IDS.includes(id as FigureId)) {
    console.error(`unknown figure id ${idArg} (expected one of ${FIGURE_IDS.join(", ")})`);
    return 1;
  }
  let text: string;
  try {
    text = readFileSync(csvPath, "utf8");
  } catch (err) {
    console.error(`cannot read ${csvPath}: ${(err as Error).message}`);
    return 1;
  }
  let svg: string;
  try {
    svg = renderFigure(id as FigureId, parseCsv(text));
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`fig${id}: ${err.message}`);
      return 1;
    }
    throw err;
  }
  writeFileSync(outPath, svg);
  console.log(`fig${id}: wrote ${outPath}`);
  return 0;
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
