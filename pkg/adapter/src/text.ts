/**
 * Text normalization mirroring the downstream loader's contract:
 * lowercase, whitespace-collapsed, punctuation stripped at token
 * boundaries. Emitting already-normalized phrases keeps every adapter
 * output byte-stable under the loader's defensive re-normalization.
 */

const BOUNDARY_PUNCT = /^[!-/:-@[-`{-~]+|[!-/:-@[-`{-~]+$/g;

export function tokenizeClean(text: string): string[] {
  const tokens: string[] = [];
  for (const raw of text.toLowerCase().split(/\s+/)) {
    const tok = raw.replace(BOUNDARY_PUNCT, '');
    if (tok) tokens.push(tok);
  }
  return tokens;
}

export function normalizePhrase(text: string): string {
  return tokenizeClean(text).join(' ');
}

/** Last token of the normalized phrase (right-headed noun phrases). */
export function lastToken(phrase: string): string {
  const tokens = phrase.split(' ');
  return tokens[tokens.length - 1];
}
