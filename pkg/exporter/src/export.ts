/**
 * Export job: encode corpus lines in batches and write one EMB1 row per
 * input line, preserving order.
 */

import { readCorpus } from "./corpus.js";
import { Encoder } from "./encoder.js";
import { writeEmb1 } from "./emb1.js";

export class EncodeFailure extends Error {}

export interface ExportJob {
  inputPath: string;
  outputPath: string;
  batchSize: number;
}

export interface ExportSummary {
  nDocs: number;
  dim: number;
  outputPath: string;
}

function checkRow(vector: number[], line: number, dim: number | null): number {
  if (dim !== null && vector.length !== dim) {
    throw new EncodeFailure(
      `line ${line}: encoder returned dimension ${vector.length}, expected ${dim}`,
    );
  }
  for (const v of vector) {
    if (!Number.isFinite(v)) {
      throw new EncodeFailure(`line ${line}: encoder produced a non-finite value`);
    }
  }
  return vector.length;
}

export async function runExport(job: ExportJob, encode: Encoder): Promise<ExportSummary> {
  if (job.batchSize < 1) {
    throw new EncodeFailure(`batch size must be at least 1, got ${job.batchSize}`);
  }
  const docs = readCorpus(job.inputPath);
  const ids = docs.map((d) => d.id);
  const rows: Float32Array[] = [];
  let dim: number | null = null;

  for (let start = 0; start < docs.length; start += job.batchSize) {
    const batch = docs.slice(start, start + job.batchSize);
    let vectors: number[][];
    try {
      vectors = await encode(batch.map((d) => d.text));
    } catch (err) {
      // re-encode one by one to pin down the offending line
      vectors = [];
      for (const doc of batch) {
        try {
          const single = await encode([doc.text]);
          vectors.push(single[0]);
        } catch (inner) {
          throw new EncodeFailure(
            `line ${doc.line}: encoding failed: ${(inner as Error).message}`,
          );
        }
      }
    }
    if (vectors.length !== batch.length) {
      throw new EncodeFailure(
        `line ${batch[0].line}: encoder returned ${vectors.length} rows for a ` +
          `batch of ${batch.length}`,
      );
    }
    vectors.forEach((vector, i) => {
      dim = dim ?? vector.length;
      checkRow(vector, batch[i].line, dim);
      rows.push(Float32Array.from(vector));
    });
  }

  writeEmb1(job.outputPath, ids, rows);
  return { nDocs: ids.length, dim: dim ?? 0, outputPath: job.outputPath };
}
