/**
 * Summarize an EMB1 file: document count, dimension, per-dimension
 * mean/std and the NaN count (which must be zero for a healthy file).
 */

import { readEmb1 } from "./emb1.js";

export interface VerifySummary {
  nDocs: number;
  dim: number;
  nanCount: number;
  perDimMean: number[];
  perDimStd: number[];
}

export function verifyFile(path: string): VerifySummary {
  const { ids, dim, values } = readEmb1(path);
  const nDocs = ids.length;
  const mean = new Array<number>(dim).fill(0);
  const std = new Array<number>(dim).fill(0);
  let nanCount = 0;

  for (let r = 0; r < nDocs; r++) {
    for (let c = 0; c < dim; c++) {
      const v = values[r * dim + c];
      if (Number.isNaN(v)) {
        nanCount += 1;
      } else {
        mean[c] += v;
      }
    }
  }
  if (nDocs > 0) {
    for (let c = 0; c < dim; c++) mean[c] /= nDocs;
    for (let r = 0; r < nDocs; r++) {
      for (let c = 0; c < dim; c++) {
        const v = values[r * dim + c];
        if (!Number.isNaN(v)) {
          std[c] += (v - mean[c]) ** 2;
        }
      }
    }
    for (let c = 0; c < dim; c++) std[c] = Math.sqrt(std[c] / nDocs);
  }
  return { nDocs, dim, nanCount, perDimMean: mean, perDimStd: std };
}

export function formatSummary(summary: VerifySummary): string {
  const lines = [
    `n_docs: ${summary.nDocs}`,
    `dim: ${summary.dim}`,
    `nan_count: ${summary.nanCount}`,
  ];
  for (let c = 0; c < summary.dim; c++) {
    lines.push(
      `dim ${c}: mean=${summary.perDimMean[c].toFixed(6)} std=${summary.perDimStd[c].toFixed(6)}`,
    );
  }
  return lines.join("\n");
}
