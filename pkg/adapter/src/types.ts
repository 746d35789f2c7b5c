/** A cleaned input document (one JSONL record in the input directory). */
export interface RawDocument {
  doc_id: string;
  source: 'social' | 'news';
  date?: string | null; // ISO-8601 day; required for news
  text: string;
}

/** One extracted relationship record, matching the tuple JSONL schema. */
export interface TupleRecord {
  doc_id: string;
  source: 'social' | 'news';
  date: string | null;
  arg1: string;
  arg1_head: string;
  rel: string;
  rel_head: string;
  arg2: string;
  arg2_head: string;
}

export interface ExtractionStats {
  documents: number;
  sentences: number;
  tuples: number;
  skipped_sentences: number;
}
