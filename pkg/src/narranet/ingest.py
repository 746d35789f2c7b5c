"""Loading, validation and indexing of relationship tuples and sidecar files.

All downstream stages consume the immutable :class:`Corpus` built here, plus
the embedding table, the named-entity seed list, the stop-word list and the
alias map. Input formats:

  * tuples: JSONL, one record per line with fields ``doc_id``, ``source``,
    ``date`` (ISO-8601 day or null), ``arg1``, ``arg1_head``, ``rel``,
    ``rel_head``, ``arg2``, ``arg2_head``;
  * embeddings: one header line ``d=<int>`` (extra tab-separated metadata
    after the dimension is ignored), then TSV rows ``phrase\\tv1...vd``;
  * seed list: one entry per line, ``entity`` or ``entity<TAB>frequency``;
  * stop list: one token per line;
  * alias map: ``alias<TAB>canonical`` per line.

Tokenization is deliberately simple and documented here because it defines
equality everywhere else in the pipeline: lowercase, split on whitespace,
strip punctuation from token boundaries, drop tokens that become empty.
"""

from __future__ import annotations

import json
import logging
import string
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

SOURCES = ("social", "news")

_PUNCT = string.punctuation


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace and strip boundary punctuation."""
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(_PUNCT)
        if tok:
            tokens.append(tok)
    return tokens


def normalize_phrase(text: str) -> str:
    """Canonical phrase form: normalized tokens joined by single spaces."""
    return " ".join(tokenize(text))


@dataclass(frozen=True)
class RelationTuple:
    """One extracted (arg1, rel, arg2) event, the atomic observation."""

    doc_id: str
    source: str
    date: date | None
    arg1_text: str
    arg1_head: str
    rel_text: str
    rel_head: str
    arg2_text: str
    arg2_head: str


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of tuples with a derived vocabulary and date span.

    ``vocabulary`` maps each token appearing in an argument phrase to its
    occurrence count over all arg1/arg2 phrases. ``t_min``/``t_max`` span the
    dated tuples; both are None when no tuple carries a date.
    """

    tuples: tuple[RelationTuple, ...]
    vocabulary: dict[str, int] = field(default_factory=dict)
    t_min: date | None = None
    t_max: date | None = None
    malformed_count: int = 0

    def phrase_counts(self) -> Counter[str]:
        """Occurrence count of each distinct argument phrase."""
        counts: Counter[str] = Counter()
        for t in self.tuples:
            counts[t.arg1_text] += 1
            counts[t.arg2_text] += 1
        return counts

    def phrases(self) -> set[str]:
        out: set[str] = set()
        for t in self.tuples:
            out.add(t.arg1_text)
            out.add(t.arg2_text)
        return out

    def dated(self) -> list[RelationTuple]:
        return [t for t in self.tuples if t.date is not None]


@dataclass
class EmbeddingTable:
    """Phrase -> fixed-dimension vector map with helper lookups."""

    dimension: int
    entries: dict[str, np.ndarray]
    duplicate_count: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def vector(self, phrase: str) -> np.ndarray | None:
        return self.entries.get(phrase)

    def phrase_vector(self, phrase: str) -> np.ndarray | None:
        """Direct lookup, falling back to the mean of member-token vectors."""
        vec = self.entries.get(phrase)
        if vec is not None:
            return vec
        token_vecs = [self.entries[t] for t in phrase.split() if t in self.entries]
        if token_vecs:
            return np.mean(token_vecs, axis=0)
        return None


@dataclass
class SeedEntityList:
    """Ordered, unique lowercase entities with corpus frequencies (>= 1)."""

    entities: dict[str, int]

    def __contains__(self, entity: str) -> bool:
        return entity in self.entities

    def __iter__(self):
        return iter(self.entities)

    def __len__(self) -> int:
        return len(self.entities)

    def tokens(self) -> set[str]:
        return set(self.entities)


class AliasMap:
    """Surface-form -> canonical actant mapping; canonicals are fixed points."""

    def __init__(self, mapping: dict[str, str] | None = None):
        self._map: dict[str, str] = {}
        for alias, canonical in (mapping or {}).items():
            self.add(alias, canonical)

    def add(self, alias: str, canonical: str) -> None:
        alias = normalize_phrase(alias)
        canonical = normalize_phrase(canonical)
        if canonical in self._map and self._map[canonical] != canonical:
            raise ValueError(
                f"canonical name {canonical!r} is itself aliased to "
                f"{self._map[canonical]!r}"
            )
        if alias != canonical and self._map.get(alias) == alias:
            raise ValueError(
                f"{alias!r} is already a canonical name; aliasing it to "
                f"{canonical!r} would break the fixed-point invariant"
            )
        if alias in self._map and self._map[alias] != canonical:
            logger.warning("alias %r remapped from %r to %r", alias, self._map[alias], canonical)
        self._map[alias] = canonical
        self._map[canonical] = canonical

    def apply(self, term: str) -> str:
        return self._map.get(term, term)

    def __len__(self) -> int:
        return len(self._map)

    def items(self):
        return self._map.items()


def _resolve_head(head: str | None, phrase: str) -> str:
    """A head must be a single whitespace-free token of its phrase.

    Falls back to the last token (English noun phrases are right-headed).
    """
    tokens = phrase.split()
    if head:
        cand = normalize_phrase(head)
        if cand and " " not in cand and cand in tokens:
            return cand
    return tokens[-1]


def _parse_record(record: dict, source: str) -> RelationTuple:
    arg1 = normalize_phrase(str(record["arg1"]))
    arg2 = normalize_phrase(str(record["arg2"]))
    rel = normalize_phrase(str(record["rel"]))
    if not arg1 or not arg2 or not rel:
        raise ValueError("empty phrase after normalization")
    rec_source = record.get("source")
    if rec_source is not None and rec_source != source:
        raise ValueError(f"record source {rec_source!r} does not match {source!r}")
    raw_date = record.get("date")
    parsed: date | None = None
    if raw_date is not None:
        parsed = date.fromisoformat(str(raw_date)[:10])
    if source == "news" and parsed is None:
        raise ValueError("news tuple without a date")
    return RelationTuple(
        doc_id=str(record["doc_id"]),
        source=source,
        date=parsed,
        arg1_text=arg1,
        arg1_head=_resolve_head(record.get("arg1_head"), arg1),
        rel_text=rel,
        rel_head=_resolve_head(record.get("rel_head"), rel),
        arg2_text=arg2,
        arg2_head=_resolve_head(record.get("arg2_head"), arg2),
    )


def build_corpus(tuples: list[RelationTuple], malformed_count: int = 0) -> Corpus:
    vocabulary: Counter[str] = Counter()
    for t in tuples:
        vocabulary.update(t.arg1_text.split())
        vocabulary.update(t.arg2_text.split())
    dates = [t.date for t in tuples if t.date is not None]
    return Corpus(
        tuples=tuple(tuples),
        vocabulary=dict(vocabulary),
        t_min=min(dates) if dates else None,
        t_max=max(dates) if dates else None,
        malformed_count=malformed_count,
    )


def load_tuples(path: str | Path, source: str) -> Corpus:
    """Load a JSONL tuple file into a Corpus.

    Malformed lines are skipped and counted; more than 50% malformed lines is
    treated as a fatal wrong-file signal.
    """
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}, got {source!r}")
    path = Path(path)
    tuples: list[RelationTuple] = []
    malformed = 0
    total = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                record = json.loads(line)
                tuples.append(_parse_record(record, source))
            except (ValueError, KeyError, TypeError) as exc:
                malformed += 1
                logger.warning("%s:%d malformed tuple record: %s", path, lineno, exc)
    if total and malformed * 2 > total:
        raise ValueError(
            f"{path}: {malformed}/{total} lines malformed; this does not look "
            "like a tuple file"
        )
    return build_corpus(tuples, malformed_count=malformed)


def save_tuples(corpus: Corpus, path: str | Path) -> None:
    """Serialize a Corpus back to the JSONL tuple format (round-trippable)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for t in corpus.tuples:
            record = {
                "doc_id": t.doc_id,
                "source": t.source,
                "date": t.date.isoformat() if t.date else None,
                "arg1": t.arg1_text,
                "arg1_head": t.arg1_head,
                "rel": t.rel_text,
                "rel_head": t.rel_head,
                "arg2": t.arg2_text,
                "arg2_head": t.arg2_head,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def build_vocabulary(corpus: Corpus) -> dict[str, int]:
    """Token -> occurrence count over all argument phrases.

    A token appearing in both arg slots of one tuple counts twice. The size of
    the returned map is the entity-vocabulary size reported by the pipeline.
    """
    counts: Counter[str] = Counter()
    for t in corpus.tuples:
        counts.update(t.arg1_text.split())
        counts.update(t.arg2_text.split())
    return dict(counts)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load the embedding sidecar: header ``d=<int>``, then TSV rows.

    Any row whose value count disagrees with the header, or that contains a
    NaN/Inf component, is fatal. Duplicate phrases keep the last row and are
    counted with a warning.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    duplicates = 0
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        head_field = header.split("\t")[0]
        if not head_field.startswith("d="):
            raise ValueError(f"{path}:1 expected header 'd=<int>', got {header!r}")
        dimension = int(head_field[2:])
        if dimension < 1:
            raise ValueError(f"{path}:1 dimension must be positive, got {dimension}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            phrase = normalize_phrase(parts[0])
            values = parts[1:]
            if len(values) != dimension:
                raise ValueError(
                    f"{path}:{lineno} expected {dimension} values, got {len(values)}"
                )
            vec = np.array([float(v) for v in values], dtype=np.float64)
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}:{lineno} non-finite embedding component")
            if phrase in entries:
                duplicates += 1
                logger.warning("%s:%d duplicate phrase %r, last row wins", path, lineno, phrase)
            entries[phrase] = vec
    return EmbeddingTable(dimension=dimension, entries=entries, duplicate_count=duplicates)


def save_embeddings(table: EmbeddingTable, path: str | Path, metadata: str | None = None) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        header = f"d={table.dimension}"
        if metadata:
            header += f"\t{metadata}"
        fh.write(header + "\n")
        for phrase in sorted(table.entries):
            values = "\t".join(repr(float(v)) for v in table.entries[phrase])
            fh.write(f"{phrase}\t{values}\n")


def load_seed_entities(path: str | Path) -> SeedEntityList:
    """Load the NER seed list; duplicate entries merge by summing frequencies."""
    path = Path(path)
    entities: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            entity = normalize_phrase(parts[0])
            if not entity:
                continue
            freq = int(parts[1]) if len(parts) > 1 else 1
            if freq < 1:
                raise ValueError(f"{path}:{lineno} frequency must be >= 1, got {freq}")
            if entity in entities:
                logger.warning("%s:%d duplicate seed entity %r merged", path, lineno, entity)
                entities[entity] += freq
            else:
                entities[entity] = freq
    return SeedEntityList(entities=entities)


def save_seed_entities(seeds: SeedEntityList, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for entity, freq in seeds.entities.items():
            fh.write(f"{entity}\t{freq}\n")


def load_stop_words(path: str | Path) -> set[str]:
    path = Path(path)
    out: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            tok = normalize_phrase(line)
            if tok:
                out.add(tok)
    return out


def default_stop_words() -> set[str]:
    """Stop list shipped with the package (user-replaceable via config)."""
    from importlib import resources

    text = resources.files("narranet").joinpath("data/stopwords.txt").read_text("utf-8")
    return {tok for tok in (normalize_phrase(l) for l in text.splitlines()) if tok}


def load_aliases(path: str | Path) -> AliasMap:
    path = Path(path)
    amap = AliasMap()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno} expected 'alias<TAB>canonical'")
            amap.add(parts[0], parts[1])
    return amap


def save_aliases(amap: AliasMap, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for alias, canonical in sorted(amap.items()):
            if alias != canonical:
                fh.write(f"{alias}\t{canonical}\n")
