/**
 * Sentence encoders behind a common interface.
 *
 * The built-in "hash-v1" model is fully deterministic: each whitespace
 * token expands into a pseudo-random Gaussian direction seeded from its
 * SHA-256 digest, and a sentence embeds as the normalized sum of its
 * token vectors. Texts sharing tokens therefore get higher cosine,
 * which is all the engine needs; a transformer-backed encoder can be
 * registered under a new model name without touching the protocol.
 */

import { createHash } from "node:crypto";

export interface Encoder {
  readonly name: string;
  /** Returns one unit-norm vector of length `dim` per input text. */
  encode(texts: string[], dim: number): number[][];
}

/** Deterministic PRNG over a 32-bit seed (mulberry32). */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function normalize(vec: Float64Array): Float64Array {
  let sumSquares = 0;
  for (const x of vec) sumSquares += x * x;
  const norm = Math.sqrt(sumSquares);
  if (norm === 0) {
    throw new Error("cannot normalize zero vector");
  }
  for (let i = 0; i < vec.length; i++) vec[i] /= norm;
  return vec;
}

export class HashEncoder implements Encoder {
  readonly name = "hash-v1";
  private readonly cache = new Map<string, Float64Array>();

  private tokenVector(token: string, dim: number): Float64Array {
    const key = `${dim}:${token}`;
    const cached = this.cache.get(key);
    if (cached !== undefined) return cached;

    const digest = createHash("sha256").update(token, "utf8").digest();
    const rand = mulberry32(digest.readUInt32LE(0));
    const vec = new Float64Array(dim);
    for (let i = 0; i < dim; i += 2) {
      // Box-Muller transform for Gaussian components.
      const u1 = Math.max(rand(), 1e-12);
      const u2 = rand();
      const radius = Math.sqrt(-2 * Math.log(u1));
      vec[i] = radius * Math.cos(2 * Math.PI * u2);
      if (i + 1 < dim) vec[i + 1] = radius * Math.sin(2 * Math.PI * u2);
    }
    normalize(vec);
    this.cache.set(key, vec);
    return vec;
  }

  encode(texts: string[], dim: number): number[][] {
    return texts.map((text) => {
      const tokens = text.split(/\s+/).filter(Boolean);
      // An empty text still embeds deterministically, as the "" token.
      const effective = tokens.length > 0 ? tokens : [""];
      const sum = new Float64Array(dim);
      for (const token of effective) {
        const tv = this.tokenVector(token, dim);
        for (let i = 0; i < dim; i++) sum[i] += tv[i];
      }
      return Array.from(normalize(sum));
    });
  }
}

const REGISTRY = new Map<string, () => Encoder>([["hash-v1", () => new HashEncoder()]]);

export function availableModels(): string[] {
  return [...REGISTRY.keys()];
}

export function loadEncoder(model: string): Encoder {
  const factory = REGISTRY.get(model);
  if (factory === undefined) {
    throw new Error(`unknown model "${model}" (available: ${availableModels().join(", ")})`);
  }
  return factory();
}
