import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { defaultJob, runDump } from "../src/dump.js";
import { readManifest, writeManifest, UtteranceRecord } from "../src/manifest.js";
import { tokenize } from "../src/model.js";
import { decodeArray } from "../src/npy.js";
import { DEFAULT_EMOTION_LABELS } from "../src/prompts.js";

function freshManifest(records?: UtteranceRecord[]): string {
  const dir = mkdtempSync(path.join(tmpdir(), "dump-"));
  const manifest = path.join(dir, "manifest.jsonl");
  writeManifest(
    records ?? [
      { utt_id: "a1", transcript: "A bright start to the day.", phonemes: "ah b r ay t" },
      { utt_id: "a2", transcript: "Why would you do that?" },
    ],
    manifest,
  );
  return manifest;
}

function outDirFor(manifest: string, name: string): string {
  return path.join(path.dirname(manifest), name);
}

describe("text and phoneme dumps", () => {
  it("writes one parseable matrix per utterance and records the width", () => {
    const manifest = freshManifest();
    const out = outDirFor(manifest, "text");
    const result = runDump(defaultJob({ model: "toy-16", kind: "text", manifestPath: manifest, outDir: out }));
    expect(result.failures).toEqual([]);
    const records = readManifest(result.manifestPath);
    for (const record of records) {
      expect(record.hidden_width).toBe(16);
      const matrix = decodeArray(readFileSync(path.join(out, record.hs_text_path as string)));
      expect(matrix.cols).toBe(16);
      expect(matrix.rows).toBeGreaterThan(0);
    }
  });

  it("row count equals the token count", () => {
    const manifest = freshManifest([{ utt_id: "t", transcript: "one two three four" }]);
    const out = outDirFor(manifest, "counted");
    runDump(defaultJob({ model: "toy-8", kind: "text", manifestPath: manifest, outDir: out }));
    const [record] = readManifest(path.join(out, "manifest.jsonl"));
    const matrix = decodeArray(readFileSync(path.join(out, record.hs_text_path as string)));
    expect(matrix.rows).toBe(4);
  });

  it("phoneme dumps use the phoneme string", () => {
    const manifest = freshManifest([{ utt_id: "p", transcript: "irrelevant", phonemes: "aa bb cc" }]);
    const out = outDirFor(manifest, "pho");
    runDump(defaultJob({ model: "toy-8", kind: "phoneme", manifestPath: manifest, outDir: out }));
    const [record] = readManifest(path.join(out, "manifest.jsonl"));
    const matrix = decodeArray(readFileSync(path.join(out, record.hs_phoneme_path as string)));
    expect(matrix.rows).toBe(3);
  });

  it("re-dump produces identical bytes", () => {
    const manifest = freshManifest();
    const out1 = outDirFor(manifest, "r1");
    const out2 = outDirFor(manifest, "r2");
    runDump(defaultJob({ model: "toy-16", kind: "text", manifestPath: manifest, outDir: out1 }));
    runDump(defaultJob({ model: "toy-16", kind: "text", manifestPath: manifest, outDir: out2 }));
    const a = readFileSync(path.join(out1, "a1.hs_text.npy"));
    const b = readFileSync(path.join(out2, "a1.hs_text.npy"));
    expect(a.equals(b)).toBe(true);
  });

  it("rows without a transcript fail individually", () => {
    const manifest = freshManifest([
      { utt_id: "ok", transcript: "fine here" },
      { utt_id: "bad", transcript: "" },
    ]);
    const out = outDirFor(manifest, "partial");
    const result = runDump(defaultJob({ model: "toy-8", kind: "text", manifestPath: manifest, outDir: out }));
    expect(result.failures.map((f) => f.uttId)).toEqual(["bad"]);
    const records = readManifest(result.manifestPath);
    expect(records.find((r) => r.utt_id === "ok")?.hs_text_path).toBeDefined();
    expect(records.find((r) => r.utt_id === "bad")?.hs_text_path).toBeUndefined();
  });
});

describe("EIS dumps", () => {
  it("word kind writes exactly three one-row tensors and a three-word answer", () => {
    const manifest = freshManifest();
    const out = outDirFor(manifest, "eisw");
    const result = runDump(defaultJob({ model: "toy-16", kind: "eis-word", manifestPath: manifest, outDir: out }));
    expect(result.failures).toEqual([]);
    for (const record of readManifest(result.manifestPath)) {
      const slots = [record.hs_eis_e_path, record.hs_eis_i_path, record.hs_eis_s_path];
      expect(slots.every((s) => typeof s === "string")).toBe(true);
      for (const slot of slots) {
        const matrix = decodeArray(readFileSync(path.join(out, slot as string)));
        expect(matrix.rows).toBe(1);
        expect(matrix.cols).toBe(16);
      }
      const words = (record.eis_word_answer as string).split(" ");
      expect(words.length).toBe(3);
      expect(new Set(words).size).toBe(3); // three separate words
    }
  });

  it("sentence kind writes answer-token rows matching the answer length", () => {
    const manifest = freshManifest();
    const out = outDirFor(manifest, "eiss");
    const result = runDump(defaultJob({
      model: "toy-16", kind: "eis-sentence", manifestPath: manifest, outDir: out, maxAnswerTokens: 6,
    }));
    expect(result.failures).toEqual([]);
    for (const record of readManifest(result.manifestPath)) {
      const matrix = decodeArray(readFileSync(path.join(out, record.hs_eis_sentence_path as string)));
      expect(matrix.rows).toBeGreaterThan(0);
      expect(matrix.rows).toBeLessThanOrEqual(6);
      const answer = record.eis_sentence_answer as string;
      expect(answer.length).toBeGreaterThan(0);
      // answer-token count equals the dumped row count
      expect(tokenize(answer).length).toBe(matrix.rows);
    }
  });

  it("greedy answers are stable across reruns", () => {
    const manifest = freshManifest();
    const a = runDump(defaultJob({
      model: "toy-16", kind: "eis-word", manifestPath: manifest, outDir: outDirFor(manifest, "g1"),
    }));
    const b = runDump(defaultJob({
      model: "toy-16", kind: "eis-word", manifestPath: manifest, outDir: outDirFor(manifest, "g2"),
    }));
    const answersA = readManifest(a.manifestPath).map((r) => r.eis_word_answer);
    const answersB = readManifest(b.manifestPath).map((r) => r.eis_word_answer);
    expect(answersA).toEqual(answersB);
  });
});

describe("emotion prediction", () => {
  it("predictions always come from the label set", () => {
    const manifest = freshManifest();
    const out = outDirFor(manifest, "emo");
    const result = runDump(defaultJob({ model: "toy-16", kind: "emotion", manifestPath: manifest, outDir: out }));
    expect(result.failures).toEqual([]);
    for (const record of readManifest(result.manifestPath)) {
      expect(DEFAULT_EMOTION_LABELS).toContain(record.emotion_predicted);
    }
  });

  it("a single-label set always predicts that label", () => {
    const manifest = freshManifest();
    const out = outDirFor(manifest, "emo1");
    runDump(defaultJob({
      model: "toy-8", kind: "emotion", manifestPath: manifest, outDir: out, labels: ["neutral"],
    }));
    for (const record of readManifest(path.join(out, "manifest.jsonl"))) {
      expect(record.emotion_predicted).toBe("neutral");
    }
  });

  it("reruns give identical labels", () => {
    const manifest = freshManifest();
    const a = runDump(defaultJob({
      model: "toy-16", kind: "emotion", manifestPath: manifest, outDir: outDirFor(manifest, "e1"),
    }));
    const b = runDump(defaultJob({
      model: "toy-16", kind: "emotion", manifestPath: manifest, outDir: outDirFor(manifest, "e2"),
    }));
    expect(readManifest(a.manifestPath).map((r) => r.emotion_predicted))
      .toEqual(readManifest(b.manifestPath).map((r) => r.emotion_predicted));
  });
});

describe("full-scale profile", () => {
  it("a 7-token sentence at the 13B-class width dumps a 7x5120 matrix", () => {
    const manifest = freshManifest([
      { utt_id: "wide", transcript: "seven distinct tokens are right here now" },
    ]);
    const out = outDirFor(manifest, "wide");
    const result = runDump(defaultJob({
      model: "llama2-13b-sim", kind: "text", manifestPath: manifest, outDir: out,
    }));
    expect(result.failures).toEqual([]);
    const [record] = readManifest(result.manifestPath);
    expect(record.hidden_width).toBe(5120);
    const matrix = decodeArray(readFileSync(path.join(out, record.hs_text_path as string)));
    expect(matrix.rows).toBe(7);
    expect(matrix.cols).toBe(5120);
  });
});
