/**
 * Minimal CSV handling for the benchmark output schemas.
 *
 * The inputs are machine-written (no quoting, no embedded commas), so a
 * plain split is exact. Schema validation reports the first missing column
 * by name.
 */

export interface Csv {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Csv {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    return cells;
  });
  return { header, rows };
}

/** Map of column name to index; throws naming the first missing column. */
export function requireColumns(csv: Csv, needed: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of needed) {
    const at = csv.header.indexOf(name);
    if (at < 0) {
      throw new Error(`missing column: ${name}`);
    }
    index.set(name, at);
  }
  return index;
}
