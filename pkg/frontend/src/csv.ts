/**
 * Strict CSV reading for the gfseq result schemas.
 *
 * Every file is a plain comma-separated table with one header row and
 * numeric cells; each figure kind accepts exactly one header layout, so
 * schema mismatches fail loudly here rather than rendering nonsense.
 */

export class PlotError extends Error {}

export interface Table {
  /** Source path, echoed in error messages. */
  path: string;
  columns: string[];
  /** Row-major numeric cells, aligned with `columns`. */
  rows: number[][];
}

export function parseCsv(text: string, path: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new PlotError(`${path}: empty CSV`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (lines.length === 1) {
    throw new PlotError(`${path}: empty CSV (header only)`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new PlotError(
        `${path}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`
      );
    }
    rows.push(cells.map((c) => Number(c)));
  }
  return { path, columns, rows };
}

/** Check the header against the allowed layouts for a figure kind. */
export function matchSchema(table: Table, allowed: string[][], kind: string): string[] {
  for (const layout of allowed) {
    if (layout.length === table.columns.length && layout.every((c, i) => table.columns[i] === c)) {
      return layout;
    }
  }
  // Name what is missing from the closest layout for a useful message.
  for (const layout of allowed) {
    const missing = layout.filter((c) => !table.columns.includes(c));
    if (missing.length > 0 && missing.length < layout.length) {
      throw new PlotError(`${table.path}: missing column ${missing.join(", ")} for ${kind}`);
    }
  }
  throw new PlotError(
    `${table.path}: header "${table.columns.join(",")}" does not match the ${kind} schema ` +
    `(expected ${allowed.map((l) => l.join(",")).join(" or ")})`
  );
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new PlotError(`${table.path}: missing column ${name}`);
  }
  return table.rows.map((r) => r[idx]);
}
