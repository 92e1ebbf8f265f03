import json

import pytest

from koslinker.corpus import Corpus, Document, IngestReport, Vocabulary


def build_corpus(doc_specs, k, v_words=None, v_desc=None):
    """Corpus from raw (word_tokens, desc_tokens, labels) triples."""
    if v_words is None:
        v_words = 1 + max((v for spec in doc_specs for v in spec[0]), default=-1)
    if v_desc is None:
        v_desc = 1 + max((v for spec in doc_specs for v in spec[1]), default=-1)
    docs = tuple(
        Document(
            id=f"doc{i}",
            word_tokens=tuple(words),
            descriptor_tokens=tuple(descs),
            labels=tuple(sorted(labels)),
        )
        for i, (words, descs, labels) in enumerate(doc_specs)
    )
    return Corpus(
        documents=docs,
        word_vocab=Vocabulary.from_terms(f"w{v}" for v in range(v_words)),
        descriptor_vocab=Vocabulary.from_terms(f"d{v}" for v in range(v_desc)),
        k=k,
        ingest_report=IngestReport(
            docs_read=len(docs), docs_admitted=len(docs),
            word_tokens_raw=sum(len(s[0]) for s in doc_specs),
            word_tokens_encoded=sum(len(s[0]) for s in doc_specs),
            desc_tokens_raw=sum(len(s[1]) for s in doc_specs),
            desc_tokens_encoded=sum(len(s[1]) for s in doc_specs),
        ),
    )


CLASSIFICATION_CSV = """\
code,name,parent
10000,Basic Research,
10100,Theory Formation,10000
10200,Methods,10000
40000,Public Affairs,
40200,Administrative Science,40000
"""

THESAURUS_JSONL = """\
{"id": "d1", "label": "public administration", "alt": ["govt administration"]}
{"id": "d2", "label": "reform", "alt": ["reforms"]}
{"id": "d3", "label": "management", "alt": []}
{"id": "d4", "label": "modernization", "alt": ["modernisation"]}
"""


@pytest.fixture
def classification():
    from koslinker.kos import parse_classification
    return parse_classification(CLASSIFICATION_CSV)


@pytest.fixture
def thesaurus():
    from koslinker.kos import parse_thesaurus
    return parse_thesaurus(THESAURUS_JSONL)


def corpus_to_input_files(corpus, directory, class_codes=None):
    """Write a corpus back out as raw pipeline inputs.

    Returns the (classification, thesaurus, documents) paths. Word terms
    become the abstract text, descriptor terms the annotation labels, and
    topic indices the class codes, so running ingest over these files
    reproduces the corpus content.
    """
    directory.mkdir(parents=True, exist_ok=True)
    if class_codes is None:
        class_codes = [f"C{t:03d}" for t in range(corpus.k)]

    classification_path = directory / "classification.csv"
    lines = ["code,name,parent"]
    lines += [f"{code},Class {code}," for code in class_codes]
    classification_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    thesaurus_path = directory / "thesaurus.jsonl"
    with open(thesaurus_path, "w", encoding="utf-8") as fh:
        for i, term in enumerate(corpus.descriptor_vocab.terms):
            fh.write(json.dumps({"id": f"t{i}", "label": term, "alt": []}) + "\n")

    documents_path = directory / "documents.jsonl"
    with open(documents_path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps({
                "id": doc.id,
                "abstract": " ".join(corpus.word_vocab.terms[v] for v in doc.word_tokens),
                "descriptors": [corpus.descriptor_vocab.terms[v] for v in doc.descriptor_tokens],
                "classes": [class_codes[t] for t in doc.labels],
            }) + "\n")

    return classification_path, thesaurus_path, documents_path
