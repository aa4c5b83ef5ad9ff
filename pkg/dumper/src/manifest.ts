/**
 * Line-delimited utterance manifests: one JSON object per line, unknown
 * fields preserved verbatim, utt_id unique. Relative *_path fields resolve
 * against the manifest's own directory, so copies written elsewhere get
 * their pre-existing paths re-anchored.
 */

import { readFileSync, writeFileSync } from "node:fs";
import * as path from "node:path";

export interface UtteranceRecord {
  utt_id: string;
  transcript?: string;
  phonemes?: string;
  audio_path?: string;
  hs_text_path?: string;
  hs_phoneme_path?: string;
  hs_eis_e_path?: string;
  hs_eis_i_path?: string;
  hs_eis_s_path?: string;
  hs_eis_sentence_path?: string;
  emotion_annotated?: string;
  emotion_predicted?: string;
  [key: string]: unknown;
}

export function readManifest(manifestPath: string): UtteranceRecord[] {
  const text = readFileSync(manifestPath, "utf-8");
  const records: UtteranceRecord[] = [];
  const seen = new Set<string>();
  text.split("\n").forEach((line, index) => {
    if (!line.trim()) return;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new Error(`${manifestPath}:${index + 1}: malformed JSON line`);
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      throw new Error(`${manifestPath}:${index + 1}: line is not a JSON object`);
    }
    const record = obj as UtteranceRecord;
    if (typeof record.utt_id !== "string" || !record.utt_id) {
      throw new Error(`${manifestPath}:${index + 1}: missing utt_id`);
    }
    if (seen.has(record.utt_id)) {
      throw new Error(`${manifestPath}:${index + 1}: duplicate utt_id ${record.utt_id}`);
    }
    seen.add(record.utt_id);
    records.push(record);
  });
  return records;
}

export function writeManifest(records: UtteranceRecord[], manifestPath: string): void {
  const seen = new Set<string>();
  const lines = records.map((record) => {
    if (seen.has(record.utt_id)) throw new Error(`duplicate utt_id ${record.utt_id}`);
    seen.add(record.utt_id);
    return JSON.stringify(record);
  });
  writeFileSync(manifestPath, lines.map((l) => l + "\n").join(""), "utf-8");
}

/** Re-anchor relative *_path fields when a manifest copy moves directories. */
export function rebasePaths(record: UtteranceRecord, srcDir: string, dstDir: string): void {
  for (const key of Object.keys(record)) {
    if (!key.endsWith("_path")) continue;
    const value = record[key];
    if (typeof value !== "string" || path.isAbsolute(value)) continue;
    record[key] = path.relative(dstDir, path.join(srcDir, value)).split(path.sep).join("/");
  }
}
