import { describe, expect, it } from "vitest";

import { ArrayFormatError, decodeArray, encodeArray, matrixFromRows } from "../src/npy.js";

describe("array container", () => {
  it("lays out the header per the format contract", () => {
    const blob = encodeArray(matrixFromRows([[1, 2, 3, 4, 5], [6, 7, 8, 9, 10], [11, 12, 13, 14, 15]]));
    expect(blob.subarray(0, 6)).toEqual(Buffer.from([0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59]));
    expect(blob[6]).toBe(1);
    expect(blob[7]).toBe(0);
    const headerLen = blob.readUInt16LE(8);
    expect((10 + headerLen) % 64).toBe(0);
    const header = blob.subarray(10, 10 + headerLen).toString("ascii");
    expect(header).toContain("'descr': '<f4'");
    expect(header).toContain("'fortran_order': False");
    expect(header).toContain("'shape': (3, 5)");
    expect(header.endsWith("\n")).toBe(true);
  });

  it("round-trips values through encode/decode", () => {
    const rows = [[0.5, -1.25], [3.75, 0], [1e-3, 42]];
    const back = decodeArray(encodeArray(matrixFromRows(rows)));
    expect(back.rows).toBe(3);
    expect(back.cols).toBe(2);
    rows.flat().forEach((v, i) => expect(back.values[i]).toBeCloseTo(v, 6));
  });

  it("is canonical: same matrix, same bytes", () => {
    const m = matrixFromRows([[1.5, 2.5]]);
    expect(encodeArray(m).equals(encodeArray(m))).toBe(true);
  });

  it("handles a 1x1 matrix", () => {
    const back = decodeArray(encodeArray(matrixFromRows([[0]])));
    expect(back.rows).toBe(1);
    expect(back.values[0]).toBe(0);
  });

  it("rejects bad magic, naming the field", () => {
    const blob = encodeArray(matrixFromRows([[1]]));
    blob[0] = 0;
    let caught: unknown;
    try {
      decodeArray(blob);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(ArrayFormatError);
    expect((caught as ArrayFormatError).field).toBe("magic");
  });

  it("rejects non-finite values before writing", () => {
    expect(() => encodeArray(matrixFromRows([[Number.NaN]]))).toThrow(/non-finite/);
  });
});
