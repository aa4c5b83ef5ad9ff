/**
 * Prompt templates mirroring the semfuse prompt contract: literal
 * {transcript} splicing (and {labels} for label prediction), overridable
 * from UTF-8 template files.
 */

import { readFileSync } from "node:fs";

export const DEFAULT_EMOTION_LABELS = ["amused", "angry", "disgusted", "neutral", "sleepy"];

export const EIS_WORD_TEMPLATE =
  "Read the following transcript and answer with exactly three words, " +
  "separated by spaces: one word for the Emotion it carries, one word " +
  "for the Intention behind it, and one word for the speaking Style it " +
  "suggests. Answer with the three words only.\n" +
  "Transcript: {transcript}\n" +
  "Answer:";

export const EIS_SENTENCE_TEMPLATE =
  "Read the following transcript and describe, in one short, " +
  "easy-to-understand sentence, the Emotion it carries, the Intention " +
  "behind it, and the speaking Style it suggests.\n" +
  "Transcript: {transcript}\n" +
  "Answer:";

export const EMOTION_LABEL_TEMPLATE =
  "Pick the single emotion label that best matches the following " +
  "transcript. Answer with exactly one label from this list: {labels}.\n" +
  "Transcript: {transcript}\n" +
  "Answer:";

export function loadTemplate(path: string): string {
  return readFileSync(path, "utf-8");
}

export function buildPrompt(template: string, transcript: string, labels?: string[]): string {
  if (!transcript) throw new Error("transcript must be non-empty");
  if (template.split("{transcript}").length !== 2) {
    throw new Error("template must contain {transcript} exactly once");
  }
  let text = template;
  if (labels !== undefined) {
    text = text.replace("{labels}", labels.join(", "));
  }
  return text.replace("{transcript}", transcript);
}
