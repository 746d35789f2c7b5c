#!/usr/bin/env node
/**
 * narranet-adapter <in_dir> <out_dir> --source {social,news}
 *
 * Reads every *.jsonl file in <in_dir> (one RawDocument per line: doc_id,
 * source, date, text) and writes tuples.jsonl, embeddings.tsv, seeds.txt
 * and manifest.json into <out_dir>.
 */

import { readdirSync, readFileSync } from 'node:fs';
import { join } from 'node:path';

import { runAdapter } from './output.js';
import type { RawDocument } from './types.js';

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(1);
}

export function loadDocuments(inDir: string, source: 'social' | 'news'): RawDocument[] {
  let names: string[];
  try {
    names = readdirSync(inDir).filter((n) => n.endsWith('.jsonl')).sort();
  } catch (exc) {
    fail(`cannot read input directory ${inDir}: ${exc}`);
  }
  if (names.length === 0) fail(`no .jsonl files in ${inDir}`);
  const docs: RawDocument[] = [];
  for (const name of names) {
    const lines = readFileSync(join(inDir, name), 'utf-8').split('\n');
    lines.forEach((line, idx) => {
      if (!line.trim()) return;
      let record: any;
      try {
        record = JSON.parse(line);
      } catch {
        fail(`${name}:${idx + 1} is not valid JSON`);
      }
      if (typeof record.doc_id !== 'string' || typeof record.text !== 'string') {
        fail(`${name}:${idx + 1} needs string doc_id and text fields`);
      }
      if (source === 'news' && !record.date) {
        fail(`${name}:${idx + 1} news documents must carry a date`);
      }
      docs.push({
        doc_id: record.doc_id,
        source,
        date: record.date ?? null,
        text: record.text,
      });
    });
  }
  return docs;
}

export function main(argv: string[]): void {
  const positional: string[] = [];
  let source: string | null = null;
  for (let i = 0; i < argv.length; i += 1) {
    if (argv[i] === '--source') {
      source = argv[i + 1];
      i += 1;
    } else if (argv[i].startsWith('--source=')) {
      source = argv[i].slice('--source='.length);
    } else {
      positional.push(argv[i]);
    }
  }
  if (positional.length !== 2 || (source !== 'social' && source !== 'news')) {
    fail('usage: narranet-adapter <in_dir> <out_dir> --source {social,news}');
  }
  const docs = loadDocuments(positional[0], source as 'social' | 'news');
  const paths = runAdapter(docs, positional[1]);
  for (const [name, path] of Object.entries(paths)) {
    process.stdout.write(`${name}: ${path}\n`);
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('cli.ts')) {
  main(process.argv.slice(2));
}
