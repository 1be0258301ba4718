/**
 * EMB1 binary embedding files, little-endian:
 *
 *   bytes 0-3  magic "EMB1"
 *   u32        n_docs
 *   u32        dim
 *   f32 * n_docs * dim  row-major payload
 *   per doc:   u16 id byte length + UTF-8 id bytes
 */

import { readFileSync, writeFileSync } from "node:fs";

export const MAGIC = "EMB1";
const HEADER_BYTES = 12;

export interface Emb1File {
  ids: string[];
  dim: number;
  /** row-major payload, ids.length * dim values */
  values: Float32Array;
}

export class Emb1FormatError extends Error {}

export function writeEmb1(path: string, ids: string[], rows: Float32Array[]): void {
  const dim = rows.length > 0 ? rows[0].length : 0;
  if (ids.length !== rows.length) {
    throw new Emb1FormatError(`id count ${ids.length} does not match row count ${rows.length}`);
  }
  const idBuffers = ids.map((id) => {
    const raw = Buffer.from(id, "utf-8");
    if (raw.length > 0xffff) {
      throw new Emb1FormatError(`document id too long to encode: ${id.slice(0, 32)}...`);
    }
    const buf = Buffer.alloc(2 + raw.length);
    buf.writeUInt16LE(raw.length, 0);
    raw.copy(buf, 2);
    return buf;
  });

  const header = Buffer.alloc(HEADER_BYTES);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt32LE(ids.length, 4);
  header.writeUInt32LE(dim, 8);

  const payload = Buffer.alloc(4 * ids.length * dim);
  rows.forEach((row, r) => {
    if (row.length !== dim) {
      throw new Emb1FormatError(`row ${r} has length ${row.length}, expected ${dim}`);
    }
    for (let c = 0; c < dim; c++) {
      payload.writeFloatLE(row[c], 4 * (r * dim + c));
    }
  });

  writeFileSync(path, Buffer.concat([header, payload, ...idBuffers]));
}

export function readEmb1(path: string): Emb1File {
  const blob = readFileSync(path);
  if (blob.length < HEADER_BYTES) {
    throw new Emb1FormatError(`${path}: header incomplete at byte ${blob.length}`);
  }
  const magic = blob.subarray(0, 4).toString("ascii");
  if (magic !== MAGIC) {
    throw new Emb1FormatError(`${path}: expected "${MAGIC}" at byte 0, found "${magic}"`);
  }
  const nDocs = blob.readUInt32LE(4);
  const dim = blob.readUInt32LE(8);
  const payloadBytes = 4 * nDocs * dim;
  if (blob.length < HEADER_BYTES + payloadBytes) {
    throw new Emb1FormatError(
      `${path}: payload of ${payloadBytes} bytes truncated at byte ${blob.length}`,
    );
  }
  const values = new Float32Array(nDocs * dim);
  for (let i = 0; i < values.length; i++) {
    values[i] = blob.readFloatLE(HEADER_BYTES + 4 * i);
  }

  const ids: string[] = [];
  let pos = HEADER_BYTES + payloadBytes;
  for (let i = 0; i < nDocs; i++) {
    if (blob.length < pos + 2) {
      throw new Emb1FormatError(`${path}: id length for doc ${i} truncated at byte ${blob.length}`);
    }
    const idLen = blob.readUInt16LE(pos);
    pos += 2;
    if (blob.length < pos + idLen) {
      throw new Emb1FormatError(`${path}: id bytes for doc ${i} truncated at byte ${blob.length}`);
    }
    ids.push(blob.subarray(pos, pos + idLen).toString("utf-8"));
    pos += idLen;
  }
  return { ids, dim, values };
}
