/** Minimal CSV reading for the simulator's numeric outputs. */

import { existsSync, readFileSync } from "node:fs";

export type Table = Record<string, number[]>;

export class MissingInputError extends Error {}
export class EmptyCsvError extends Error {}

/** Parse a headered numeric CSV into column arrays. */
export function readCsv(path: string): Table {
  if (!existsSync(path)) {
    throw new MissingInputError(`input not found: ${path}`);
  }
  const text = readFileSync(path, "utf-8").trim();
  if (text.length === 0) {
    throw new EmptyCsvError(`empty CSV: ${path}`);
  }
  const lines = text.split(/\r?\n/);
  const header = splitLine(lines[0]);
  if (lines.length < 2) {
    throw new EmptyCsvError(`no data rows in ${path}`);
  }
  const columns: Table = {};
  for (const name of header) columns[name] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i].trim() === "") continue;
    const fields = splitLine(lines[i]);
    header.forEach((name, j) => {
      const value = Number(fields[j]);
      columns[name].push(Number.isNaN(value) ? NaN : value);
    });
  }
  return columns;
}

function splitLine(line: string): string[] {
  return line.split(",").map((s) => s.trim());
}

export function requireColumns(table: Table, names: string[], source: string): void {
  for (const name of names) {
    if (!(name in table)) {
      throw new MissingInputError(`column '${name}' missing from ${source}`);
    }
  }
}
