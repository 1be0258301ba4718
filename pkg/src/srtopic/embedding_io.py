"""Binary I/O for document embedding matrices.

File layout (little-endian, "EMB1"):

    bytes 0-3   magic "EMB1"
    u32         n_docs
    u32         dim
    f32 * n_docs * dim   row-major payload
    per doc:    u16 id byte length, then UTF-8 id bytes

Values are stored as 32-bit floats; a read/write cycle is bit-exact for
any matrix whose values are f32-representable (in particular anything
previously read from a file).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagic, NonFiniteValue, TruncatedFile, ZeroRow

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass
class EmbeddingMatrix:
    doc_ids: list[str]
    rows: np.ndarray  # (n_docs, dim) float64

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        if len(self.doc_ids) != self.rows.shape[0]:
            raise ValueError("doc_ids length must match the number of rows")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("embedding rows must be finite")

    @property
    def n_docs(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


def read_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Parse an EMB1 file, validating magic, completeness and finiteness."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise TruncatedFile(f"{path}: header incomplete at byte {len(blob)}")
    magic, n_docs, dim = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise BadMagic(f"{path}: expected {MAGIC!r} at byte 0, found {magic!r}")

    payload_bytes = 4 * n_docs * dim
    payload_end = _HEADER.size + payload_bytes
    if len(blob) < payload_end:
        raise TruncatedFile(
            f"{path}: payload of {payload_bytes} bytes truncated at byte {len(blob)}"
        )
    values = np.frombuffer(blob, dtype="<f4", count=n_docs * dim, offset=_HEADER.size)
    bad = np.where(~np.isfinite(values))[0]
    if bad.size:
        offset = _HEADER.size + 4 * int(bad[0])
        raise NonFiniteValue(f"{path}: non-finite value at byte {offset}")

    doc_ids = []
    pos = payload_end
    for i in range(n_docs):
        if len(blob) < pos + 2:
            raise TruncatedFile(f"{path}: id length for doc {i} truncated at byte {len(blob)}")
        (id_len,) = struct.unpack_from("<H", blob, pos)
        pos += 2
        if len(blob) < pos + id_len:
            raise TruncatedFile(f"{path}: id bytes for doc {i} truncated at byte {len(blob)}")
        doc_ids.append(blob[pos : pos + id_len].decode("utf-8"))
        pos += id_len

    rows = values.astype(np.float64).reshape(n_docs, dim)
    return EmbeddingMatrix(doc_ids=doc_ids, rows=rows)


def write_embeddings(m: EmbeddingMatrix, path: str | Path) -> None:
    """Write an EMB1 file; values are cast to float32."""
    parts = [_HEADER.pack(MAGIC, m.n_docs, m.dim)]
    parts.append(np.ascontiguousarray(m.rows, dtype="<f4").tobytes())
    for doc_id in m.doc_ids:
        raw = doc_id.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"document id too long to encode: {doc_id[:32]!r}...")
        parts.append(struct.pack("<H", len(raw)) + raw)
    Path(path).write_bytes(b"".join(parts))


def l2_normalize(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit Euclidean norm."""
    norms = np.linalg.norm(m.rows, axis=1)
    zero = np.where(norms == 0.0)[0]
    if zero.size:
        raise ZeroRow(f"row {int(zero[0])} has zero norm")
    return EmbeddingMatrix(doc_ids=list(m.doc_ids), rows=m.rows / norms[:, np.newaxis])
