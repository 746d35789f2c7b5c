/**
 * Relationship-tuple extraction.
 *
 * Sentences are POS-tagged (compromise) and mined with a small documented
 * pattern set built around finite verb groups:
 *
 *   P1  NP  VG  that-CLAUSE   -> (subject NP, verb group, full complement)
 *   P2  NP  VG  OBJ-SPAN      -> (subject NP, verb group, object span)
 *
 * The object span starts at the first noun phrase after the verb group and
 * greedily absorbs attached material (prepositional phrases, infinitive
 * purpose clauses, noun conjunctions) until clause punctuation or an
 * unattachable token, so "invented 5G to depopulate the world" survives as
 * one argument. Headwords: last noun of the subject NP, last verb of the
 * verb group, last noun of the object's leading NP.
 */

import nlp from 'compromise';

import { normalizePhrase, lastToken } from './text.js';
import type { ExtractionStats, RawDocument, TupleRecord } from './types.js';

interface Term {
  text: string;
  lower: string;
  tags: Set<string>;
  clauseEnd: boolean; // term is followed by clause punctuation
}

const PREPOSITIONS = new Set([
  'of', 'in', 'for', 'with', 'on', 'at', 'from', 'by', 'about',
  'over', 'under', 'against', 'into', 'through', 'during', 'across',
]);

const NOUNISH = ['Noun', 'ProperNoun', 'Value', 'Acronym', 'Pronoun'];

function isNounish(t: Term): boolean {
  return NOUNISH.some((tag) => t.tags.has(tag));
}

function isNpToken(t: Term): boolean {
  return (
    isNounish(t) ||
    t.tags.has('Determiner') ||
    t.tags.has('Adjective') ||
    t.tags.has('Possessive')
  );
}

function isVerb(t: Term): boolean {
  return t.tags.has('Verb');
}

function sentenceTerms(sentence: any): Term[] {
  return sentence.terms.map((t: any) => ({
    text: t.text,
    lower: t.text.toLowerCase(),
    tags: new Set<string>(t.tags ?? []),
    clauseEnd: /[,.;:!?]/.test(t.post ?? ''),
  }));
}

/** Maximal verb runs; a run immediately preceded by "to" is an infinitive
 * and cannot anchor a relation. */
function verbGroups(terms: Term[]): Array<[number, number]> {
  const groups: Array<[number, number]> = [];
  let i = 0;
  while (i < terms.length) {
    if (isVerb(terms[i])) {
      let j = i;
      while (
        j + 1 < terms.length &&
        !terms[j].clauseEnd &&
        (isVerb(terms[j + 1]) || terms[j + 1].tags.has('Negative'))
      ) {
        j += 1;
      }
      if (i === 0 || terms[i - 1].lower !== 'to') {
        groups.push([i, j]);
      }
      i = j + 1;
    } else {
      i += 1;
    }
  }
  return groups;
}

function subjectSpan(terms: Term[], verbStart: number): [number, number] | null {
  let end = verbStart - 1;
  while (end >= 0 && (terms[end].tags.has('Adverb') || terms[end].tags.has('Negative'))) {
    end -= 1;
  }
  if (end < 0 || !isNpToken(terms[end]) || terms[end].clauseEnd) return null;
  let start = end;
  while (start - 1 >= 0 && isNpToken(terms[start - 1]) && !terms[start - 1].clauseEnd) {
    start -= 1;
  }
  for (let k = start; k <= end; k += 1) {
    if (isNounish(terms[k])) return [start, end];
  }
  return null;
}

function objectSpan(terms: Term[], verbEnd: number): [number, number] | null {
  let i = verbEnd + 1;
  while (i < terms.length && terms[i].tags.has('Adverb') && !terms[i].clauseEnd) {
    i += 1;
  }
  if (i >= terms.length) return null;
  if (terms[i].lower === 'that') {
    // clausal complement: keep everything to the end of the sentence
    return i < terms.length - 1 ? [i, terms.length - 1] : null;
  }
  if (!isNpToken(terms[i])) return null;
  const start = i;
  let end = -1;
  while (i < terms.length) {
    const t = terms[i];
    let take = false;
    if (isNpToken(t)) {
      take = true;
    } else if (PREPOSITIONS.has(t.lower)) {
      take = true;
    } else if (t.lower === 'to' && i + 1 < terms.length && isVerb(terms[i + 1])) {
      take = true;
    } else if (isVerb(t) && i > 0 && terms[i - 1].lower === 'to') {
      take = true;
    } else if ((t.lower === 'and' || t.lower === 'or') && i + 1 < terms.length && isNpToken(terms[i + 1])) {
      take = true;
    }
    if (!take) break;
    if (isNounish(t)) end = i;
    if (t.clauseEnd) break;
    i += 1;
  }
  return end >= start ? [start, end] : null;
}

function spanText(terms: Term[], span: [number, number]): string {
  return normalizePhrase(terms.slice(span[0], span[1] + 1).map((t) => t.text).join(' '));
}

function nounHead(terms: Term[], span: [number, number]): string | null {
  for (let k = span[1]; k >= span[0]; k -= 1) {
    if (isNounish(terms[k])) {
      const head = normalizePhrase(terms[k].text);
      if (head) return head;
    }
  }
  return null;
}

/** Head of the object's leading noun phrase (before attached material). */
function leadingNounHead(terms: Term[], span: [number, number]): string | null {
  let i = span[0];
  if (terms[i].lower === 'that') i += 1;
  let last: string | null = null;
  for (; i <= span[1]; i += 1) {
    const t = terms[i];
    if (isNounish(t)) {
      const head = normalizePhrase(t.text);
      if (head) last = head;
    } else if (!t.tags.has('Determiner') && !t.tags.has('Adjective') && !t.tags.has('Possessive')) {
      break;
    }
    if (t.clauseEnd) break;
  }
  return last;
}

export function extractFromSentence(sentence: any): Array<Omit<TupleRecord, 'doc_id' | 'source' | 'date'>> {
  const terms = sentenceTerms(sentence);
  const out: Array<Omit<TupleRecord, 'doc_id' | 'source' | 'date'>> = [];
  for (const [vs, ve] of verbGroups(terms)) {
    const subj = subjectSpan(terms, vs);
    const obj = objectSpan(terms, ve);
    if (!subj || !obj) continue;
    const arg1 = spanText(terms, subj);
    const arg2 = spanText(terms, obj);
    const rel = spanText(terms, [vs, ve]);
    if (!arg1 || !arg2 || !rel) continue;
    const relVerbs = terms.slice(vs, ve + 1).filter(isVerb);
    const relHead = normalizePhrase(relVerbs[relVerbs.length - 1].text) || lastToken(rel);
    out.push({
      arg1,
      arg1_head: nounHead(terms, subj) ?? lastToken(arg1),
      rel,
      rel_head: relHead,
      arg2,
      arg2_head: leadingNounHead(terms, obj) ?? lastToken(arg2),
    });
  }
  return out;
}

export function extractTuples(docs: RawDocument[]): { tuples: TupleRecord[]; stats: ExtractionStats } {
  const tuples: TupleRecord[] = [];
  const stats: ExtractionStats = { documents: 0, sentences: 0, tuples: 0, skipped_sentences: 0 };
  for (const doc of docs) {
    if (!doc.text || !doc.text.trim()) continue;
    stats.documents += 1;
    let sentences: any[];
    try {
      sentences = nlp(doc.text).json();
    } catch {
      stats.skipped_sentences += 1;
      continue;
    }
    for (const sentence of sentences) {
      stats.sentences += 1;
      let records: ReturnType<typeof extractFromSentence>;
      try {
        records = extractFromSentence(sentence);
      } catch {
        stats.skipped_sentences += 1;
        continue;
      }
      if (records.length === 0) {
        stats.skipped_sentences += 1;
        continue;
      }
      for (const rec of records) {
        tuples.push({
          doc_id: doc.doc_id,
          source: doc.source,
          date: doc.date ?? null,
          ...rec,
        });
      }
    }
  }
  stats.tuples = tuples.length;
  return { tuples, stats };
}
