/**
 * Writers for the downstream file contracts: tuple JSONL, embedding TSV
 * sidecar (header "d=<int>", with the model recorded after the dimension),
 * seed list and a run manifest.
 */

import { createHash } from 'node:crypto';
import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { DIMENSION, MODEL_NAME, embedPhrases } from './embed.js';
import { nerSeedList } from './ner.js';
import { extractTuples } from './extract.js';
import type { RawDocument, TupleRecord } from './types.js';

export interface AdapterOutput {
  tuples: string;
  embeddings: string;
  seeds: string;
  manifest: string;
}

function tupleLine(t: TupleRecord): string {
  return JSON.stringify({
    arg1: t.arg1,
    arg1_head: t.arg1_head,
    arg2: t.arg2,
    arg2_head: t.arg2_head,
    date: t.date,
    doc_id: t.doc_id,
    rel: t.rel,
    rel_head: t.rel_head,
    source: t.source,
  });
}

export function runAdapter(docs: RawDocument[], outDir: string): AdapterOutput {
  mkdirSync(outDir, { recursive: true });
  const { tuples, stats } = extractTuples(docs);

  const tuplesPath = join(outDir, 'tuples.jsonl');
  const tuplesText = tuples.map(tupleLine).join('\n') + (tuples.length ? '\n' : '');
  writeFileSync(tuplesPath, tuplesText, 'utf-8');

  const phrases = new Set<string>();
  for (const t of tuples) {
    phrases.add(t.arg1);
    phrases.add(t.arg2);
    phrases.add(t.rel);
    for (const token of `${t.arg1} ${t.arg2}`.split(' ')) phrases.add(token);
  }
  const vectors = embedPhrases(phrases);
  const lines = [`d=${DIMENSION}\tmodel=${MODEL_NAME}`];
  for (const [phrase, vec] of vectors) {
    lines.push(`${phrase}\t${vec.map((v) => v.toString()).join('\t')}`);
  }
  const embeddingsPath = join(outDir, 'embeddings.tsv');
  writeFileSync(embeddingsPath, lines.join('\n') + '\n', 'utf-8');

  const seeds = nerSeedList(docs);
  const seedsPath = join(outDir, 'seeds.txt');
  const seedsText =
    [...seeds.entries()].map(([entity, freq]) => `${entity}\t${freq}`).join('\n') +
    (seeds.size ? '\n' : '');
  writeFileSync(seedsPath, seedsText, 'utf-8');

  const manifestPath = join(outDir, 'manifest.json');
  const manifest = {
    embedding_dimension: DIMENSION,
    embedding_model: MODEL_NAME,
    entities: seeds.size,
    input_sha256: createHash('sha256')
      .update(docs.map((d) => JSON.stringify(d)).join('\n'))
      .digest('hex'),
    stats: {
      documents: stats.documents,
      sentences: stats.sentences,
      skipped_sentences: stats.skipped_sentences,
      tuples: stats.tuples,
    },
  };
  writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n', 'utf-8');

  return { tuples: tuplesPath, embeddings: embeddingsPath, seeds: seedsPath, manifest: manifestPath };
}
