import { readFileSync, readdirSync, statSync } from "fs";
import path from "path";
import Papa from "papaparse";
import type { Table } from "./types.js";

/** Expand a list of paths/globs (only `*` in the basename is supported). */
export function expandInputs(patterns: string[]): string[] {
  const files: string[] = [];
  for (const pattern of patterns) {
    const matches = expandOne(pattern);
    if (matches.length === 0) {
      throw new Error(`no files match input pattern '${pattern}'`);
    }
    files.push(...matches);
  }
  return files;
}

function expandOne(pattern: string): string[] {
  const base = path.basename(pattern);
  if (!base.includes("*")) {
    try {
      statSync(pattern);
      return [pattern];
    } catch {
      return [];
    }
  }
  const dir = path.dirname(pattern);
  const re = new RegExp(
    "^" + base.split("*").map(escapeRe).join(".*") + "$"
  );
  let entries: string[];
  try {
    entries = readdirSync(dir);
  } catch {
    return [];
  }
  return entries
    .filter((e) => re.test(e))
    .sort()
    .map((e) => path.join(dir, e));
}

function escapeRe(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function readTable(file: string): Table {
  const text = readFileSync(file, "utf-8");
  const parsed = Papa.parse<Record<string, number | string>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`${file}: ${parsed.errors[0].message}`);
  }
  if (parsed.data.length === 0) {
    throw new Error(`${file}: empty CSV (no data rows)`);
  }
  return { path: file, rows: parsed.data };
}

export function numericColumn(table: Table, name: string): number[] {
  if (!(name in table.rows[0])) {
    throw new Error(`${table.path}: missing required column '${name}'`);
  }
  return table.rows.map((r) => Number(r[name]));
}
