/**
 * Canonical 2-D array files (.npy v1.0) as consumed by the semfuse toolkit:
 * magic \x93NUMPY, version 1.0, little-endian header length, ASCII header
 * dict with keys descr/fortran_order/shape in that order, space-padded so
 * the preamble is 64-byte aligned, then raw little-endian float32 elements.
 */

const MAGIC = Buffer.from([0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59]); // \x93NUMPY
const HEADER_ALIGN = 64;

export class ArrayFormatError extends Error {
  constructor(public field: string, message: string) {
    super(message);
    this.name = "ArrayFormatError";
  }
}

export interface Matrix {
  rows: number;
  cols: number;
  /** row-major values */
  values: Float64Array;
}

export function matrixFromRows(rows: number[][]): Matrix {
  const r = rows.length;
  const c = rows[0]?.length ?? 0;
  const values = new Float64Array(r * c);
  rows.forEach((row, i) => {
    if (row.length !== c) throw new Error(`ragged row ${i}: ${row.length} != ${c}`);
    row.forEach((v, j) => (values[i * c + j] = v));
  });
  return { rows: r, cols: c, values };
}

export function encodeArray(m: Matrix): Buffer {
  if (m.rows < 1 || m.cols < 1) {
    throw new ArrayFormatError("shape", `matrix must be at least 1x1, got ${m.rows}x${m.cols}`);
  }
  for (const v of m.values) {
    if (!Number.isFinite(v)) throw new Error("matrix contains non-finite values");
  }
  const headerText = `{'descr': '<f4', 'fortran_order': False, 'shape': (${m.rows}, ${m.cols}), }`;
  const unpadded = MAGIC.length + 2 + 2 + headerText.length + 1;
  const pad = (HEADER_ALIGN - (unpadded % HEADER_ALIGN)) % HEADER_ALIGN;
  const header = Buffer.from(headerText + " ".repeat(pad) + "\n", "ascii");

  const preamble = Buffer.alloc(MAGIC.length + 4);
  MAGIC.copy(preamble, 0);
  preamble[6] = 1; // version 1.0
  preamble[7] = 0;
  preamble.writeUInt16LE(header.length, 8);

  const payload = Buffer.alloc(m.rows * m.cols * 4);
  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  for (let i = 0; i < m.values.length; i++) {
    view.setFloat32(i * 4, m.values[i], true);
  }
  return Buffer.concat([preamble, header, payload]);
}

export function decodeArray(data: Buffer): Matrix {
  if (data.length < 10 || !data.subarray(0, 6).equals(MAGIC)) {
    throw new ArrayFormatError("magic", "not an array file (bad magic bytes)");
  }
  if (data[6] !== 1 || data[7] !== 0) {
    throw new ArrayFormatError("version", `unsupported format version ${data[6]}.${data[7]}`);
  }
  const headerLen = data.readUInt16LE(8);
  const headerEnd = 10 + headerLen;
  const header = data.subarray(10, headerEnd).toString("ascii");

  const descr = /'descr':\s*'([^']*)'/.exec(header)?.[1];
  if (descr !== "<f4" && descr !== "<f8") {
    throw new ArrayFormatError("descr", `unsupported descr ${descr ?? "(missing)"}`);
  }
  const fortran = /'fortran_order':\s*(True|False)/.exec(header)?.[1];
  if (fortran !== "False") {
    throw new ArrayFormatError("fortran_order", "only C-order arrays are supported");
  }
  const shapeMatch = /'shape':\s*\((\d+),\s*(\d+)\)/.exec(header);
  if (!shapeMatch) {
    throw new ArrayFormatError("shape", "shape is not a 2-D shape");
  }
  const rows = parseInt(shapeMatch[1], 10);
  const cols = parseInt(shapeMatch[2], 10);
  const itemSize = descr === "<f4" ? 4 : 8;
  const payload = data.subarray(headerEnd);
  if (payload.length !== rows * cols * itemSize) {
    throw new ArrayFormatError(
      "shape",
      `payload is ${payload.length} bytes, shape (${rows}, ${cols}) needs ${rows * cols * itemSize}`,
    );
  }
  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  const values = new Float64Array(rows * cols);
  for (let i = 0; i < values.length; i++) {
    values[i] = descr === "<f4" ? view.getFloat32(i * 4, true) : view.getFloat64(i * 8, true);
  }
  return { rows, cols, values };
}
