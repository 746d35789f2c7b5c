/**
 * Deterministic phrase embeddings: signed character-trigram hashing.
 *
 * Each token is wrapped in boundary markers and its trigrams are hashed
 * (FNV-1a, 32-bit) into a fixed number of buckets with a hash-derived sign;
 * the accumulated vector is L2-normalized. Pure integer arithmetic, so the
 * sidecar is byte-identical across runs and platforms. No pretrained model
 * is downloadable in the build environment; this bundled model is named and
 * versioned in the sidecar header and output manifest so a heavier encoder
 * can be swapped in behind the same file contract.
 */

export const MODEL_NAME = 'char-ngram-hash-v1';
export const DIMENSION = 64;

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i += 1) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

export function embedPhrase(phrase: string, dimension: number = DIMENSION): number[] {
  const vec = new Array<number>(dimension).fill(0);
  for (const token of phrase.split(' ')) {
    const wrapped = `^${token}$`;
    for (let i = 0; i + 3 <= wrapped.length; i += 1) {
      const hash = fnv1a(wrapped.slice(i, i + 3));
      const bucket = hash % dimension;
      const sign = (hash >>> 31) === 0 ? 1 : -1;
      vec[bucket] += sign;
    }
  }
  const norm = Math.sqrt(vec.reduce((acc, v) => acc + v * v, 0));
  return norm > 0 ? vec.map((v) => v / norm) : vec;
}

export function cosine(a: number[], b: number[]): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i += 1) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return na > 0 && nb > 0 ? dot / Math.sqrt(na * nb) : 0;
}

/** One vector per distinct phrase, sorted for stable output. */
export function embedPhrases(phrases: Iterable<string>): Map<string, number[]> {
  const out = new Map<string, number[]>();
  for (const phrase of [...new Set(phrases)].sort()) {
    if (phrase) out.set(phrase, embedPhrase(phrase));
  }
  return out;
}
