#!/usr/bin/env node
/**
 * hs-dumper: produce hidden-state matrices, EIS answers, and emotion labels
 * for the semfuse toolkit.
 *
 *   hs-dumper dump --model toy-16 --kind text --manifest m.jsonl --out-dir out/
 *   hs-dumper models
 *
 * Kinds: text | phoneme | eis-word | eis-sentence | emotion.
 * Exit codes: 0 success, 1 row failures, 2 usage error.
 */

import { PROFILES } from "./model.js";
import { defaultJob, runDump, DumpKind } from "./dump.js";
import { loadTemplate, DEFAULT_EMOTION_LABELS } from "./prompts.js";

const KINDS: DumpKind[] = ["text", "phoneme", "eis-word", "eis-sentence", "emotion"];

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${arg}`);
    }
    const eq = arg.indexOf("=");
    if (eq >= 0) {
      flags.set(arg.slice(2, eq), arg.slice(eq + 1));
    } else {
      const value = argv[i + 1];
      if (value === undefined || value.startsWith("--")) {
        throw new Error(`flag ${arg} needs a value`);
      }
      flags.set(arg.slice(2), value);
      i++;
    }
  }
  return flags;
}

function usage(): void {
  console.error(
    "usage: hs-dumper dump --model <profile> --kind <text|phoneme|eis-word|eis-sentence|emotion>\n" +
      "                 --manifest <file> --out-dir <dir>\n" +
      "                 [--max-answer-tokens N] [--labels a,b,c] [--template file]\n" +
      "       hs-dumper models",
  );
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command === "models") {
    console.log(JSON.stringify(PROFILES, null, 2));
    return 0;
  }
  if (command !== "dump") {
    usage();
    return 2;
  }
  let flags: Map<string, string>;
  try {
    flags = parseFlags(rest);
  } catch (err) {
    console.error(String(err));
    usage();
    return 2;
  }
  const model = flags.get("model");
  const kind = flags.get("kind") as DumpKind | undefined;
  const manifestPath = flags.get("manifest");
  const outDir = flags.get("out-dir");
  if (!model || !kind || !manifestPath || !outDir || !KINDS.includes(kind)) {
    usage();
    return 2;
  }
  try {
    const job = defaultJob({
      model,
      kind,
      manifestPath,
      outDir,
      maxAnswerTokens: parseInt(flags.get("max-answer-tokens") ?? "16", 10),
      labels: (flags.get("labels") ?? DEFAULT_EMOTION_LABELS.join(",")).split(","),
      template: flags.has("template") ? loadTemplate(flags.get("template")!) : undefined,
    });
    const result = runDump(job);
    console.log(`wrote ${result.manifestPath}`);
    return result.failures.length > 0 ? 1 : 0;
  } catch (err) {
    console.error(String(err));
    return 2;
  }
}

process.exitCode = main(process.argv.slice(2));
