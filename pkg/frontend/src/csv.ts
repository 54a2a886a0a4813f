import { readFileSync } from "node:fs";

/** A named column was absent from the CSV header. */
export class MissingColumnError extends Error {
  constructor(
    readonly column: string,
    readonly path: string,
  ) {
    super(`column '${column}' not found in ${path}`);
    this.name = "MissingColumnError";
  }
}

export interface Table {
  path: string;
  header: string[];
  columns: Map<string, number[]>;
  rowCount: number;
}

/** Parse a numeric CSV (header row + float cells, LF or CRLF endings). */
export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length < 2) {
    throw new Error(`${path}: expected a header row and at least one data row`);
  }
  const header = lines[0].split(",").map((name) => name.trim());
  const columns = new Map<string, number[]>(header.map((name) => [name, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`${path}: row has ${cells.length} cells, header has ${header.length}`);
    }
    cells.forEach((cell, i) => {
      const value = Number(cell);
      if (Number.isNaN(value)) {
        throw new Error(`${path}: non-numeric cell '${cell}' in column ${header[i]}`);
      }
      columns.get(header[i])!.push(value);
    });
  }
  return { path, header, columns, rowCount: lines.length - 1 };
}

/** Fetch one column, throwing MissingColumnError with the column name. */
export function getColumn(table: Table, name: string): number[] {
  const column = table.columns.get(name);
  if (column === undefined) {
    throw new MissingColumnError(name, table.path);
  }
  return column;
}
