/**
 * Corpus input: UTF-8 text, one document per line, optional leading
 * "id<TAB>" prefix. Lines without a tab get ids d0, d1, ... by position.
 */

import { readFileSync } from "node:fs";

export interface CorpusLine {
  id: string;
  text: string;
  /** zero-based line number in the source file */
  line: number;
}

export function parseCorpus(content: string): CorpusLine[] {
  const out: CorpusLine[] = [];
  const lines = content.split("\n");
  // a trailing newline produces one empty trailing element, not a document
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  lines.forEach((line, i) => {
    const tab = line.indexOf("\t");
    if (tab >= 0) {
      out.push({ id: line.slice(0, tab), text: line.slice(tab + 1), line: i });
    } else {
      out.push({ id: `d${i}`, text: line, line: i });
    }
  });
  return out;
}

export function readCorpus(path: string): CorpusLine[] {
  return parseCorpus(readFileSync(path, "utf-8"));
}
