/**
 * Dump operations: per-utterance final-layer hidden states, EIS answers
 * (word and sentence form, answer tokens only), and predicted emotion
 * labels. Every run writes arrays plus a manifest copy into the output
 * directory; the input manifest is never touched.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import * as path from "node:path";

import { readManifest, writeManifest, rebasePaths, UtteranceRecord } from "./manifest.js";
import { encodeArray, Matrix } from "./npy.js";
import { ToyLM, getProfile, tokenize } from "./model.js";
import {
  EIS_SENTENCE_TEMPLATE,
  EIS_WORD_TEMPLATE,
  EMOTION_LABEL_TEMPLATE,
  DEFAULT_EMOTION_LABELS,
  buildPrompt,
} from "./prompts.js";

export type DumpKind = "text" | "phoneme" | "eis-word" | "eis-sentence" | "emotion";

export interface DumpJob {
  model: string;
  kind: DumpKind;
  manifestPath: string;
  outDir: string;
  maxAnswerTokens: number;
  labels: string[];
  template?: string;
}

export interface DumpResult {
  manifestPath: string;
  failures: { uttId: string; error: string }[];
}

// answer vocabulary for constrained greedy decoding; the emotion/intention/
// style words the prompts ask for, plus filler for sentence form
const EIS_WORDS = [
  "amused", "angry", "calm", "cheerful", "curious", "disgusted", "eager",
  "firm", "gentle", "greeting", "hesitant", "hopeful", "neutral", "playful",
  "pleading", "question", "request", "sad", "sleepy", "soft", "statement",
  "stern", "tired", "warm", "warning", "whisper",
];
const SENTENCE_WORDS = [
  ...EIS_WORDS, "the", "speaker", "sounds", "and", "wants", "something",
  "tone", "voice", "slow", "fast", "quiet", "loud", "a", "with",
];

function statesToMatrix(states: Float64Array[]): Matrix {
  const rows = states.length;
  const cols = states[0].length;
  const values = new Float64Array(rows * cols);
  states.forEach((row, i) => values.set(row, i * cols));
  // storage is float32; keep the in-memory copy identical to what readers see
  for (let i = 0; i < values.length; i++) values[i] = Math.fround(values[i]);
  return { rows, cols, values };
}

function writeMatrix(states: Float64Array[], target: string): Matrix {
  const matrix = statesToMatrix(states);
  writeFileSync(target, encodeArray(matrix));
  return matrix;
}

export function runDump(job: DumpJob): DumpResult {
  const profile = getProfile(job.model);
  const lm = new ToyLM(profile);
  const records = readManifest(job.manifestPath);
  mkdirSync(job.outDir, { recursive: true });
  const srcDir = path.dirname(job.manifestPath);
  const failures: { uttId: string; error: string }[] = [];

  for (const record of records) {
    rebasePaths(record, srcDir, job.outDir);
    try {
      dumpOne(lm, job, record);
      record.hidden_width = profile.hiddenWidth;
    } catch (err) {
      failures.push({ uttId: record.utt_id, error: String(err) });
      console.error(`error: ${record.utt_id}: ${err}`);
    }
  }
  const outManifest = path.join(job.outDir, "manifest.jsonl");
  writeManifest(records, outManifest);
  return { manifestPath: outManifest, failures };
}

function requireTranscript(record: UtteranceRecord): string {
  const transcript = record.transcript;
  if (typeof transcript !== "string" || !transcript.trim()) {
    throw new Error("record has no transcript");
  }
  return transcript;
}

function dumpOne(lm: ToyLM, job: DumpJob, record: UtteranceRecord): void {
  switch (job.kind) {
    case "text": {
      const tokens = tokenize(requireTranscript(record));
      if (tokens.length === 0) throw new Error("transcript tokenizes to nothing");
      const name = `${record.utt_id}.hs_text.npy`;
      writeMatrix(lm.hiddenStates(tokens), path.join(job.outDir, name));
      record.hs_text_path = name;
      break;
    }
    case "phoneme": {
      // phoneme strings go through the same tokenizer as plain text
      const source = typeof record.phonemes === "string" && record.phonemes.trim()
        ? record.phonemes
        : requireTranscript(record);
      const tokens = tokenize(source);
      if (tokens.length === 0) throw new Error("phoneme string tokenizes to nothing");
      const name = `${record.utt_id}.hs_phoneme.npy`;
      writeMatrix(lm.hiddenStates(tokens), path.join(job.outDir, name));
      record.hs_phoneme_path = name;
      break;
    }
    case "eis-word": {
      const prompt = buildPrompt(job.template ?? EIS_WORD_TEMPLATE, requireTranscript(record));
      const promptTokens = tokenize(prompt);
      // three separate words: each pick excludes the ones already chosen
      const answer: string[] = [];
      const context = [...promptTokens];
      let pool = [...EIS_WORDS];
      for (let i = 0; i < 3; i++) {
        const word = lm.pick(context, pool);
        answer.push(word);
        context.push(word);
        pool = pool.filter((w) => w !== word);
      }
      if (answer.length !== 3) {
        throw new Error(`answer is not three words: ${answer.join(" ")}`);
      }
      // hidden states over prompt + answer, keeping answer rows only
      const states = lm.hiddenStates([...promptTokens, ...answer]);
      const answerStates = states.slice(promptTokens.length);
      const slots: ["hs_eis_e_path", "hs_eis_i_path", "hs_eis_s_path"] = [
        "hs_eis_e_path", "hs_eis_i_path", "hs_eis_s_path",
      ];
      slots.forEach((slot, i) => {
        const name = `${record.utt_id}.${slot.replace("_path", "")}.npy`;
        writeMatrix([answerStates[i]], path.join(job.outDir, name));
        record[slot] = name;
      });
      record.eis_word_answer = answer.join(" ");
      break;
    }
    case "eis-sentence": {
      const prompt = buildPrompt(job.template ?? EIS_SENTENCE_TEMPLATE, requireTranscript(record));
      const promptTokens = tokenize(prompt);
      const answer = lm.generate(promptTokens, SENTENCE_WORDS, job.maxAnswerTokens, ".");
      if (answer.length === 0) throw new Error("empty answer sentence");
      const states = lm.hiddenStates([...promptTokens, ...answer]);
      const name = `${record.utt_id}.hs_eis_sentence.npy`;
      writeMatrix(states.slice(promptTokens.length), path.join(job.outDir, name));
      record.hs_eis_sentence_path = name;
      // render exactly the generated tokens so answer length == dumped rows
      const words = answer.filter((t) => t !== ".");
      record.eis_sentence_answer = words.join(" ") + (answer.at(-1) === "." ? "." : "");
      break;
    }
    case "emotion": {
      const prompt = buildPrompt(
        job.template ?? EMOTION_LABEL_TEMPLATE,
        requireTranscript(record),
        job.labels,
      );
      // zero-shot labeling: score each candidate label, take the best
      const promptTokens = tokenize(prompt);
      const [label] = lm.generate(promptTokens, job.labels.map((l) => l.toLowerCase()), 1);
      record.emotion_predicted = label;
      break;
    }
  }
}

export function defaultJob(partial: Partial<DumpJob> & Pick<DumpJob, "model" | "kind" | "manifestPath" | "outDir">): DumpJob {
  return {
    maxAnswerTokens: 16,
    labels: DEFAULT_EMOTION_LABELS,
    ...partial,
  };
}
