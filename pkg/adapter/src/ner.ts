/**
 * Named-entity seed extraction: proper-noun spans, acronyms and
 * letter-digit terms (5G, Covid-19), lowercased and counted across the
 * corpus. Multi-word names contribute each member token, so the seed list
 * feeds the downstream token-level contextual grouping directly.
 */

import nlp from 'compromise';

import { normalizePhrase } from './text.js';
import type { RawDocument } from './types.js';

const ENTITY_TAGS = ['ProperNoun', 'Acronym', 'Organization', 'Person', 'Place'];

function isEntityTerm(term: any): boolean {
  const tags: string[] = term.tags ?? [];
  if (ENTITY_TAGS.some((t) => tags.includes(t))) return true;
  // alphanumeric coinages such as 5G or Covid-19
  return /[a-zA-Z]/.test(term.text) && /\d/.test(term.text);
}

export function nerSeedList(docs: RawDocument[]): Map<string, number> {
  const counts = new Map<string, number>();
  for (const doc of docs) {
    if (!doc.text || !doc.text.trim()) continue;
    for (const sentence of nlp(doc.text).json()) {
      for (const term of sentence.terms) {
        if (!isEntityTerm(term)) continue;
        const token = normalizePhrase(term.text);
        if (!token || token.length < 2) continue;
        counts.set(token, (counts.get(token) ?? 0) + 1);
      }
    }
  }
  return new Map([...counts.entries()].sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1)));
}
