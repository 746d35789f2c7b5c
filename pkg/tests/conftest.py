from __future__ import annotations

from narranet.ingest import RelationTuple, build_corpus


def make_tuple(
    arg1,
    rel,
    arg2,
    doc_id="d0",
    source="social",
    day=None,
    arg1_head=None,
    rel_head=None,
    arg2_head=None,
):
    return RelationTuple(
        doc_id=doc_id,
        source=source,
        date=day,
        arg1_text=arg1,
        arg1_head=arg1_head or arg1.split()[-1],
        rel_text=rel,
        rel_head=rel_head or rel.split()[-1],
        arg2_text=arg2,
        arg2_head=arg2_head or arg2.split()[-1],
    )


def corpus_of(*triples):
    return build_corpus([make_tuple(*t) for t in triples])
