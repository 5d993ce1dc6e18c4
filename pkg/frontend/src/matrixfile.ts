/**
 * Binary matrix interchange, byte-compatible with the engine's reader.
 *
 * Layout: magic "TNTM" | version u8 (=1) | dtype u8 (0=f32, 1=f64) |
 * 2 reserved zero bytes | rows u64 LE | cols u64 LE | row-major LE payload.
 */

import { promises as fs } from 'node:fs';

const MAGIC = Buffer.from('TNTM', 'ascii');
const HEADER_BYTES = 24;

export type MatrixDtype = 'float32' | 'float64';

export interface Matrix {
  rows: number;
  cols: number;
  /** row-major values, length rows * cols */
  data: Float64Array;
}

export function matrixOf(rows: number, cols: number): Matrix {
  return { rows, cols, data: new Float64Array(rows * cols) };
}

export function encodeMatrix(matrix: Matrix, dtype: MatrixDtype = 'float64'): Buffer {
  const { rows, cols, data } = matrix;
  if (rows < 1 || cols < 1) {
    throw new Error(`matrix must be at least 1x1, got ${rows}x${cols}`);
  }
  if (data.length !== rows * cols) {
    throw new Error(`payload length ${data.length} != ${rows}x${cols}`);
  }
  for (const v of data) {
    if (!Number.isFinite(v)) throw new Error('matrix contains NaN or Inf');
  }
  const itemSize = dtype === 'float32' ? 4 : 8;
  const buf = Buffer.alloc(HEADER_BYTES + rows * cols * itemSize);
  MAGIC.copy(buf, 0);
  buf.writeUInt8(1, 4); // version
  buf.writeUInt8(dtype === 'float32' ? 0 : 1, 5);
  buf.writeUInt16LE(0, 6); // reserved
  buf.writeBigUInt64LE(BigInt(rows), 8);
  buf.writeBigUInt64LE(BigInt(cols), 16);
  let off = HEADER_BYTES;
  if (dtype === 'float32') {
    for (const v of data) {
      buf.writeFloatLE(Math.fround(v), off);
      off += 4;
    }
  } else {
    for (const v of data) {
      buf.writeDoubleLE(v, off);
      off += 8;
    }
  }
  return buf;
}

export async function writeMatrix(
  path: string,
  matrix: Matrix,
  dtype: MatrixDtype = 'float64',
): Promise<void> {
  await fs.writeFile(path, encodeMatrix(matrix, dtype));
}

/** Strict reader (used by the tests); mirrors the engine's validation. */
export function decodeMatrix(buf: Buffer): Matrix {
  if (buf.length < HEADER_BYTES) throw new Error('file shorter than header');
  if (!buf.subarray(0, 4).equals(MAGIC)) throw new Error('bad magic');
  const version = buf.readUInt8(4);
  if (version !== 1) throw new Error(`unsupported version ${version}`);
  const dtypeCode = buf.readUInt8(5);
  if (dtypeCode !== 0 && dtypeCode !== 1) throw new Error(`unknown dtype ${dtypeCode}`);
  const rows = Number(buf.readBigUInt64LE(8));
  const cols = Number(buf.readBigUInt64LE(16));
  const itemSize = dtypeCode === 0 ? 4 : 8;
  if (buf.length !== HEADER_BYTES + rows * cols * itemSize) {
    throw new Error('declared size disagrees with file length');
  }
  const data = new Float64Array(rows * cols);
  for (let i = 0; i < rows * cols; i += 1) {
    const v =
      dtypeCode === 0
        ? buf.readFloatLE(HEADER_BYTES + 4 * i)
        : buf.readDoubleLE(HEADER_BYTES + 8 * i);
    if (!Number.isFinite(v)) throw new Error('payload contains NaN or Inf');
    data[i] = v;
  }
  return { rows, cols, data };
}

export async function readMatrix(path: string): Promise<Matrix> {
  return decodeMatrix(await fs.readFile(path));
}

export function getRow(matrix: Matrix, row: number): Float64Array {
  return matrix.data.subarray(row * matrix.cols, (row + 1) * matrix.cols);
}
