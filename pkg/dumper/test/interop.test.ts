/**
 * Cross-component round-trip: everything this dumper writes must be
 * consumable by the semfuse toolkit through its public surfaces (array
 * files, manifests, CLI subcommands).
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { defaultJob, runDump } from "../src/dump.js";
import { writeManifest } from "../src/manifest.js";

const python = spawnSync("python3", ["-c", "import semfuse"]).status === 0 ? "python3" : null;

function freshManifest(): string {
  const dir = mkdtempSync(path.join(tmpdir(), "interop-"));
  const manifest = path.join(dir, "manifest.jsonl");
  writeManifest(
    [
      { utt_id: "i1", transcript: "A calm reminder to close the door.", phonemes: "k aa m" },
      { utt_id: "i2", transcript: "This is absolutely fantastic news!" },
    ],
    manifest,
  );
  return manifest;
}

describe.skipIf(python === null)("semfuse interop", () => {
  it("toolkit reads a dumped matrix and reports the dumped shape", () => {
    const manifest = freshManifest();
    const out = path.join(path.dirname(manifest), "text");
    runDump(defaultJob({ model: "toy-16", kind: "text", manifestPath: manifest, outDir: out }));
    const probe = spawnSync(python!, [
      "-c",
      "import sys, semfuse; m = semfuse.read_array(sys.argv[1]); print(m.shape)",
      path.join(out, "i1.hs_text.npy"),
    ], { encoding: "utf-8" });
    expect(probe.status, probe.stderr).toBe(0);
    expect(probe.stdout.trim()).toBe("(8, 16)"); // 7 words + final period
  });

  it("toolkit extract-token consumes dumped manifests end to end", () => {
    const manifest = freshManifest();
    const base = path.dirname(manifest);
    const textOut = path.join(base, "text");
    runDump(defaultJob({ model: "toy-16", kind: "text", manifestPath: manifest, outDir: textOut }));
    const eisOut = path.join(base, "eis");
    runDump(defaultJob({
      model: "toy-16", kind: "eis-word",
      manifestPath: path.join(textOut, "manifest.jsonl"), outDir: eisOut,
    }));

    for (const strategy of ["ave", "eis-word"]) {
      const tokOut = path.join(base, `tok_${strategy}`);
      const proc = spawnSync(python!, [
        "-m", "semfuse.cli", "extract-token",
        "--manifest", path.join(eisOut, "manifest.jsonl"),
        "--out-dir", tokOut,
        "--strategy", strategy,
      ], { encoding: "utf-8" });
      expect(proc.status, proc.stderr).toBe(0);
      const width = spawnSync(python!, [
        "-c",
        "import sys, semfuse; print(semfuse.read_array(sys.argv[1]).shape[1])",
        path.join(tokOut, `i1.${strategy.replace("-", "_")}.npy`),
      ], { encoding: "utf-8" });
      expect(width.stdout.trim()).toBe("16");
    }
  });
});
