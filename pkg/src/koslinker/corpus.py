"""Annotated-document ingestion and the two observation vocabularies.

A training corpus couples three things per document: natural-language word
tokens from the abstract, controlled-vocabulary descriptor tokens resolved
through the thesaurus, and a label set of class topic indices. This module
builds that corpus from a JSON-lines metadata file, prunes the word
vocabulary, serializes the result, and can also generate synthetic corpora
with planted per-topic term distributions for testing and benchmarks.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .kos import ClassificationSystem, Thesaurus, resolve_label

__all__ = [
    "Vocabulary",
    "Document",
    "Corpus",
    "IngestOptions",
    "IngestReport",
    "IngestError",
    "SyntheticSpec",
    "tokenize",
    "ingest",
    "prune_vocabulary",
    "generate_synthetic",
    "save_corpus",
    "load_corpus",
]

CORPUS_FORMAT = "koslinker-corpus"
CORPUS_VERSION = 1

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """Bijection between terms and contiguous indices ``0..V-1``."""

    terms: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    @classmethod
    def from_terms(cls, terms) -> "Vocabulary":
        terms = tuple(terms)
        index = {t: i for i, t in enumerate(terms)}
        if len(index) != len(terms):
            raise ValueError("vocabulary terms must be unique")
        return cls(terms=terms, index=index)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class Document:
    id: str
    word_tokens: tuple[int, ...]
    descriptor_tokens: tuple[int, ...]
    labels: tuple[int, ...]  # sorted topic indices, non-empty once admitted


@dataclass
class IngestReport:
    docs_read: int = 0
    docs_admitted: int = 0
    docs_dropped_no_labels: int = 0
    docs_dropped_no_tokens: int = 0
    word_tokens_raw: int = 0
    word_tokens_encoded: int = 0
    word_tokens_dropped: int = 0
    desc_tokens_raw: int = 0
    desc_tokens_encoded: int = 0
    desc_tokens_dropped: int = 0
    unknown_class_labels: int = 0
    unknown_descriptor_labels: int = 0

    @property
    def docs_dropped(self) -> int:
        return self.docs_dropped_no_labels + self.docs_dropped_no_tokens

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "IngestReport":
        return cls(**data)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    word_vocab: Vocabulary
    descriptor_vocab: Vocabulary
    k: int
    ingest_report: IngestReport

    @property
    def n_word_tokens(self) -> int:
        return sum(len(d.word_tokens) for d in self.documents)

    @property
    def n_descriptor_tokens(self) -> int:
        return sum(len(d.descriptor_tokens) for d in self.documents)


@dataclass(frozen=True)
class IngestOptions:
    strict: bool = False           # unknown class/descriptor: error instead of skip+count
    stopwords: frozenset = frozenset()
    min_token_len: int = 2


def tokenize(text: str, stopwords=frozenset(), min_len: int = 2) -> list[str]:
    """Lowercased maximal runs of Unicode letters/digits, short runs and
    stopwords removed."""
    out = []
    for tok in _TOKEN.findall(text.lower()):
        if len(tok) < min_len or tok in stopwords:
            continue
        out.append(tok)
    return out


def _read_documents(source, name):
    text = source.read() if hasattr(source, "read") else source
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{name}:{lineno}: invalid JSON object: {exc}")
        yield lineno, obj


def ingest(docs_source, classification: ClassificationSystem, thesaurus: Thesaurus,
           options: IngestOptions = IngestOptions(), name: str = "<documents>") -> Corpus:
    """Build a Corpus from a JSON-lines document stream.

    Per document: class codes map to topic indices, descriptor strings
    resolve through the thesaurus (synonyms included) to descriptor-vocabulary
    indices over *preferred labels*, and the abstract is tokenized into the
    word vocabulary. Documents without labels, or without tokens in both
    languages, are dropped and counted. Under ``strict`` an unknown class
    code or unresolvable descriptor aborts with the offending document id.

    Both vocabularies are indexed in first-appearance order, which makes the
    corpus (and its serialization) a pure function of the input stream.
    """
    report = IngestReport()
    word_terms: list[str] = []
    word_index: dict[str, int] = {}
    desc_terms: list[str] = []
    desc_index: dict[str, int] = {}
    documents = []

    for lineno, obj in _read_documents(docs_source, name):
        report.docs_read += 1
        doc_id = str(obj.get("id", f"line-{lineno}"))
        abstract = str(obj.get("abstract", "") or "")
        raw_descriptors = obj.get("descriptors", []) or []
        raw_classes = obj.get("classes", []) or []

        words = tokenize(abstract, options.stopwords, options.min_token_len)
        report.word_tokens_raw += len(words)

        desc_ids = []
        for label in raw_descriptors:
            report.desc_tokens_raw += 1
            desc_id = resolve_label(thesaurus, str(label))
            if desc_id is None:
                if options.strict:
                    raise IngestError(
                        f"{name}:{lineno}: document {doc_id!r}: "
                        f"unknown descriptor {label!r}"
                    )
                report.unknown_descriptor_labels += 1
                report.desc_tokens_dropped += 1
                continue
            desc_ids.append(desc_id)

        labels = set()
        for code in raw_classes:
            code = str(code).strip()
            if code not in classification.topic_index:
                if options.strict:
                    raise IngestError(
                        f"{name}:{lineno}: document {doc_id!r}: "
                        f"unknown class code {code!r}"
                    )
                report.unknown_class_labels += 1
                continue
            labels.add(classification.topic_index[code])

        if not labels:
            report.docs_dropped_no_labels += 1
            report.word_tokens_dropped += len(words)
            report.desc_tokens_dropped += len(desc_ids)
            continue
        if not words and not desc_ids:
            report.docs_dropped_no_tokens += 1
            continue

        word_tok = []
        for w in words:
            idx = word_index.get(w)
            if idx is None:
                idx = len(word_terms)
                word_index[w] = idx
                word_terms.append(w)
            word_tok.append(idx)
        desc_tok = []
        for desc_id in desc_ids:
            label = thesaurus.preferred_label(desc_id)
            idx = desc_index.get(label)
            if idx is None:
                idx = len(desc_terms)
                desc_index[label] = idx
                desc_terms.append(label)
            desc_tok.append(idx)

        report.docs_admitted += 1
        report.word_tokens_encoded += len(word_tok)
        report.desc_tokens_encoded += len(desc_tok)
        documents.append(Document(
            id=doc_id,
            word_tokens=tuple(word_tok),
            descriptor_tokens=tuple(desc_tok),
            labels=tuple(sorted(labels)),
        ))

    return Corpus(
        documents=tuple(documents),
        word_vocab=Vocabulary.from_terms(word_terms),
        descriptor_vocab=Vocabulary.from_terms(desc_terms),
        k=classification.k,
        ingest_report=report,
    )


def prune_vocabulary(corpus: Corpus, min_df: int = 5, max_df_ratio: float = 0.5) -> Corpus:
    """Restrict the word vocabulary to document frequencies in
    ``[min_df, max_df_ratio * D]`` and re-encode.

    Descriptors are the link targets and are never pruned. Documents left
    without tokens in either language are dropped; pruning away the whole
    corpus is an error.
    """
    if not 0.0 <= max_df_ratio <= 1.0:
        raise ValueError("max_df_ratio must be within [0, 1]")
    d_total = len(corpus.documents)
    df = np.zeros(len(corpus.word_vocab), dtype=np.int64)
    for doc in corpus.documents:
        for v in set(doc.word_tokens):
            df[v] += 1

    max_df = max_df_ratio * d_total
    keep = [v for v in range(len(corpus.word_vocab))
            if min_df <= df[v] <= max_df]
    remap = {v: i for i, v in enumerate(keep)}
    new_terms = [corpus.word_vocab.terms[v] for v in keep]

    report = replace(corpus.ingest_report)
    documents = []
    for doc in corpus.documents:
        kept = tuple(remap[v] for v in doc.word_tokens if v in remap)
        n_removed = len(doc.word_tokens) - len(kept)
        report.word_tokens_encoded -= n_removed
        report.word_tokens_dropped += n_removed
        if not kept and not doc.descriptor_tokens:
            report.docs_admitted -= 1
            report.docs_dropped_no_tokens += 1
            report.desc_tokens_encoded -= len(doc.descriptor_tokens)
            continue
        documents.append(replace(doc, word_tokens=kept))

    if corpus.documents and not documents:
        raise IngestError(
            f"pruning with min_df={min_df}, max_df_ratio={max_df_ratio} "
            "emptied every document"
        )

    return Corpus(
        documents=tuple(documents),
        word_vocab=Vocabulary.from_terms(new_terms),
        descriptor_vocab=corpus.descriptor_vocab,
        k=corpus.k,
        ingest_report=report,
    )


@dataclass(frozen=True)
class SyntheticSpec:
    """Knobs for a corpus with known (planted) per-topic term distributions."""

    k: int = 10
    v_words: int = 500
    v_desc: int = 200
    docs: int = 2000
    words_per_doc: int = 50
    descriptors_per_doc: int = 10
    labels_per_doc: int = 2
    concentration: float = 0.05  # symmetric Dirichlet over each language's terms
    seed: int = 1

    def validate(self) -> None:
        for fld in ("k", "v_words", "v_desc", "docs", "words_per_doc",
                    "descriptors_per_doc", "labels_per_doc"):
            if getattr(self, fld) <= 0:
                raise ValueError(f"{fld} must be positive")
        if self.concentration <= 0:
            raise ValueError("concentration must be positive")
        if self.labels_per_doc > self.k:
            raise ValueError("labels_per_doc cannot exceed k")


def generate_synthetic(spec: SyntheticSpec):
    """Sample a corpus from the model's own generative process.

    Returns ``(corpus, phi_words, phi_desc)`` where the phi matrices are the
    planted topic-term distributions (rows sum to 1). Each document draws a
    uniform label set of ``labels_per_doc`` distinct topics, a topic mixture
    over those labels from a flat Dirichlet, and then tokens topic-first.
    Fully deterministic under ``spec.seed``.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    phi_words = rng.dirichlet([spec.concentration] * spec.v_words, size=spec.k)
    phi_desc = rng.dirichlet([spec.concentration] * spec.v_desc, size=spec.k)

    def draw_tokens(z, phi, v):
        # one multinomial draw per topic present, scattered back into z order
        out = np.empty(len(z), dtype=np.int64)
        for k in np.unique(z):
            mask = z == k
            out[mask] = rng.choice(v, size=int(mask.sum()), p=phi[k])
        return tuple(int(x) for x in out)

    width = len(str(spec.docs))
    documents = []
    report = IngestReport()
    for i in range(spec.docs):
        labels = np.sort(rng.choice(spec.k, size=spec.labels_per_doc, replace=False))
        theta = rng.dirichlet(np.ones(spec.labels_per_doc))
        z_w = labels[rng.choice(spec.labels_per_doc, size=spec.words_per_doc, p=theta)]
        words = draw_tokens(z_w, phi_words, spec.v_words)
        z_d = labels[rng.choice(spec.labels_per_doc, size=spec.descriptors_per_doc, p=theta)]
        descs = draw_tokens(z_d, phi_desc, spec.v_desc)
        documents.append(Document(
            id=f"synth-{i:0{width}d}",
            word_tokens=words,
            descriptor_tokens=descs,
            labels=tuple(int(t) for t in labels),
        ))
        report.docs_read += 1
        report.docs_admitted += 1
        report.word_tokens_raw += len(words)
        report.word_tokens_encoded += len(words)
        report.desc_tokens_raw += len(descs)
        report.desc_tokens_encoded += len(descs)

    word_vocab = Vocabulary.from_terms(
        f"word{v:0{len(str(spec.v_words))}d}" for v in range(spec.v_words)
    )
    desc_vocab = Vocabulary.from_terms(
        f"desc{v:0{len(str(spec.v_desc))}d}" for v in range(spec.v_desc)
    )
    corpus = Corpus(
        documents=tuple(documents),
        word_vocab=word_vocab,
        descriptor_vocab=desc_vocab,
        k=spec.k,
        ingest_report=report,
    )
    return corpus, phi_words, phi_desc


def corpus_to_json(corpus: Corpus) -> str:
    payload = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "k": corpus.k,
        "word_vocab": list(corpus.word_vocab.terms),
        "descriptor_vocab": list(corpus.descriptor_vocab.terms),
        "ingest_report": corpus.ingest_report.to_dict(),
        "documents": [
            {
                "id": doc.id,
                "words": list(doc.word_tokens),
                "descriptors": list(doc.descriptor_tokens),
                "labels": list(doc.labels),
            }
            for doc in corpus.documents
        ],
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def corpus_from_json(text: str) -> Corpus:
    payload = json.loads(text)
    if payload.get("format") != CORPUS_FORMAT:
        raise IngestError("not a corpus file")
    if payload.get("version") != CORPUS_VERSION:
        raise IngestError(f"unsupported corpus version {payload.get('version')!r}")
    documents = tuple(
        Document(
            id=d["id"],
            word_tokens=tuple(d["words"]),
            descriptor_tokens=tuple(d["descriptors"]),
            labels=tuple(d["labels"]),
        )
        for d in payload["documents"]
    )
    return Corpus(
        documents=documents,
        word_vocab=Vocabulary.from_terms(payload["word_vocab"]),
        descriptor_vocab=Vocabulary.from_terms(payload["descriptor_vocab"]),
        k=payload["k"],
        ingest_report=IngestReport.from_dict(payload["ingest_report"]),
    )


def save_corpus(corpus: Corpus, path) -> None:
    with io.open(path, "w", encoding="utf-8") as fh:
        fh.write(corpus_to_json(corpus))


def load_corpus(path) -> Corpus:
    with io.open(path, "r", encoding="utf-8") as fh:
        return corpus_from_json(fh.read())
