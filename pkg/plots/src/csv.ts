/**
 * Reader for the benchmark's schema-tagged CSV files.
 *
 * Layout: a `# schema=qpomdp.<name>.v1` comment line, a header row,
 * then comma-separated data rows (UTF-8, LF). Readers declare the
 * schema and the columns they need; anything else is an error.
 */

import { readFileSync } from "node:fs";

export class SchemaMismatch extends Error {}
export class MissingColumn extends Error {}

export interface Table {
  schema: string;
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0 || !lines[0].startsWith("# schema=")) {
    throw new SchemaMismatch("missing schema comment line");
  }
  const schema = lines[0].slice("# schema=".length).trim();
  if (lines.length < 2) {
    throw new SchemaMismatch("missing header row");
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaMismatch(
        `row width ${row.length} does not match header width ${columns.length}`,
      );
    }
  }
  return { schema, columns, rows };
}

export function readTable(path: string, expectedSchema: string): Table {
  const table = parseCsv(readFileSync(path, "utf-8"));
  if (table.schema !== expectedSchema) {
    throw new SchemaMismatch(
      `expected schema ${expectedSchema}, found ${table.schema} in ${path}`,
    );
  }
  return table;
}

/** Numeric column accessor; throws MissingColumn when absent. */
export function column(table: Table, name: string): number[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new MissingColumn(`column ${name} not present in ${table.schema}`);
  }
  return table.rows.map((row) => Number(row[index]));
}

export function textColumn(table: Table, name: string): string[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new MissingColumn(`column ${name} not present in ${table.schema}`);
  }
  return table.rows.map((row) => row[index]);
}

/** Distinct values of a column, in first-appearance order. */
export function distinct(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const value of values) {
    if (!seen.has(value)) {
      seen.add(value);
      out.push(value);
    }
  }
  return out;
}
