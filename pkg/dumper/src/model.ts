/**
 * Deterministic stand-in language models for offline dumping.
 *
 * Real checkpoint weights are not available (or loadable) in this
 * environment, so the dumper ships a tiny causal transformer-style mixer
 * whose weights are generated procedurally from a seeded hash. It is not a
 * trained model; what matters here is that it has the same observable
 * surface as one: a tokenizer, per-token final-layer hidden states of a
 * fixed width, causal (or bidirectional) context mixing, and greedy
 * decoding that is bit-for-bit reproducible.
 */

export interface ModelProfile {
  name: string;
  hiddenWidth: number;
  layers: number;
  causal: boolean;
  description: string;
}

export const PROFILES: ModelProfile[] = [
  { name: "toy-8", hiddenWidth: 8, layers: 2, causal: true,
    description: "smallest causal profile, for fast tests" },
  { name: "toy-16", hiddenWidth: 16, layers: 2, causal: true,
    description: "default desk-scale causal profile" },
  { name: "toy-64", hiddenWidth: 64, layers: 2, causal: true,
    description: "wider causal profile" },
  { name: "llama2-13b-sim", hiddenWidth: 5120, layers: 2, causal: true,
    description: "stand-in matching the 13B-class production dump width" },
  { name: "mlm-base-sim", hiddenWidth: 768, layers: 2, causal: false,
    description: "stand-in matching the masked-LM baseline width" },
];

export function getProfile(name: string): ModelProfile {
  const profile = PROFILES.find((p) => p.name === name);
  if (!profile) {
    const known = PROFILES.map((p) => p.name).join(", ");
    throw new Error(`unknown model ${name}; known profiles: ${known}`);
  }
  return profile;
}

/** Lowercased word / number / punctuation tokens. */
export function tokenize(text: string): string[] {
  const matches = text.toLowerCase().match(/[a-z']+|[0-9]+|[^\sa-z0-9']/g);
  return matches ?? [];
}

// fnv-1a over a string, then one avalanche round; cheap and stable
function hash32(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  h ^= h >>> 16;
  h = Math.imul(h, 0x7feb352d);
  h ^= h >>> 15;
  h = Math.imul(h, 0x846ca68b);
  h ^= h >>> 16;
  return h >>> 0;
}

/** One deterministic float in [-1, 1) from a seed string. */
function seededFloat(seed: string): number {
  return (hash32(seed) / 0x100000000) * 2 - 1;
}

export class ToyLM {
  constructor(public profile: ModelProfile, private seed = "hs-dumper-v1") {}

  private embedding(token: string): Float64Array {
    const d = this.profile.hiddenWidth;
    const vec = new Float64Array(d);
    const base = `${this.seed}|${this.profile.name}|emb|${token}|`;
    for (let j = 0; j < d; j++) vec[j] = seededFloat(base + j);
    return vec;
  }

  private gate(layer: number): Float64Array {
    const d = this.profile.hiddenWidth;
    const vec = new Float64Array(d);
    const base = `${this.seed}|${this.profile.name}|gate${layer}|`;
    for (let j = 0; j < d; j++) vec[j] = seededFloat(base + j);
    return vec;
  }

  /**
   * Final-layer hidden states, one row per token.
   *
   * Each layer mixes every position with its visible context through
   * softmax-weighted dot-product attention (the gate plays the value
   * projection), adds it back, and renormalizes. Causal profiles only see
   * positions at or before their own.
   */
  hiddenStates(tokens: string[]): Float64Array[] {
    if (tokens.length === 0) throw new Error("cannot run the model on zero tokens");
    const d = this.profile.hiddenWidth;
    const scale = Math.sqrt(d);
    let states = tokens.map((t) => this.embedding(t));

    for (let layer = 0; layer < this.profile.layers; layer++) {
      const gate = this.gate(layer);
      const next: Float64Array[] = [];
      for (let i = 0; i < states.length; i++) {
        const visible = this.profile.causal ? i + 1 : states.length;
        const scores = new Float64Array(visible);
        let maxScore = -Infinity;
        for (let j = 0; j < visible; j++) {
          let dot = 0;
          for (let k = 0; k < d; k++) dot += states[i][k] * states[j][k];
          scores[j] = dot / scale;
          if (scores[j] > maxScore) maxScore = scores[j];
        }
        let total = 0;
        for (let j = 0; j < visible; j++) {
          scores[j] = Math.exp(scores[j] - maxScore);
          total += scores[j];
        }
        const mixed = new Float64Array(d);
        for (let j = 0; j < visible; j++) {
          const w = scores[j] / total;
          for (let k = 0; k < d; k++) mixed[k] += w * states[j][k] * gate[k];
        }
        let norm = 0;
        for (let k = 0; k < d; k++) {
          mixed[k] += states[i][k];
          norm += mixed[k] * mixed[k];
        }
        norm = Math.sqrt(norm) || 1;
        for (let k = 0; k < d; k++) mixed[k] = (mixed[k] / norm) * scale;
        next.push(mixed);
      }
      states = next;
    }
    return states;
  }

  /** Greedy pick of the candidate whose embedding best matches the pooled state. */
  pick(context: string[], candidates: string[]): string {
    const states = this.hiddenStates(context);
    const d = this.profile.hiddenWidth;
    const pooled = new Float64Array(d);
    for (const row of states) {
      for (let k = 0; k < d; k++) pooled[k] += row[k];
    }
    for (let k = 0; k < d; k++) pooled[k] /= states.length;
    let best = candidates[0];
    let bestScore = -Infinity;
    for (const candidate of candidates) {
      const emb = this.embedding(candidate);
      let dot = 0;
      for (let k = 0; k < d; k++) dot += pooled[k] * emb[k];
      if (dot > bestScore) {
        bestScore = dot;
        best = candidate;
      }
    }
    return best;
  }

  /**
   * Greedy decoding constrained to a candidate vocabulary.
   *
   * Generates until `stop` is chosen (never first) or maxTokens is hit;
   * the same prompt always yields the same answer tokens.
   */
  generate(promptTokens: string[], candidates: string[], maxTokens: number, stop?: string): string[] {
    const context = [...promptTokens];
    const answer: string[] = [];
    while (answer.length < maxTokens) {
      const pool = stop !== undefined && answer.length > 0 ? [...candidates, stop] : candidates;
      const token = this.pick(context, pool);
      context.push(token);
      answer.push(token);
      if (token === stop) break;
    }
    return answer;
  }
}
