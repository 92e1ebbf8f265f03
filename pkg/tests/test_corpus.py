import json

import numpy as np
import pytest

from koslinker.corpus import (
    IngestError,
    IngestOptions,
    SyntheticSpec,
    corpus_to_json,
    corpus_from_json,
    generate_synthetic,
    ingest,
    prune_vocabulary,
    tokenize,
)


class TestTokenize:
    def test_unicode_runs_lowercased(self):
        assert tokenize("Die Verwaltung: modern!") == ["die", "verwaltung", "modern"]

    def test_empty(self):
        assert tokenize("") == []

    def test_min_length(self):
        assert tokenize("a bb") == ["bb"]

    def test_stopwords_removed(self):
        assert tokenize("die verwaltung", stopwords=frozenset({"die"})) == ["verwaltung"]

    def test_digits_kept_underscore_split(self):
        assert tokenize("paragraph 12a__note") == ["paragraph", "12a", "note"]


def _doc_line(**kwargs):
    return json.dumps(kwargs)


class TestIngest:
    def test_basic_mapping(self, classification, thesaurus):
        source = _doc_line(id="x1", abstract="verwaltung reform",
                           descriptors=["reform"], classes=["40200"])
        corpus = ingest(source, classification, thesaurus)
        assert len(corpus.documents) == 1
        doc = corpus.documents[0]
        assert doc.labels == (classification.topic_of("40200"),)
        assert [corpus.word_vocab.terms[v] for v in doc.word_tokens] == ["verwaltung", "reform"]
        assert [corpus.descriptor_vocab.terms[v] for v in doc.descriptor_tokens] == ["reform"]
        assert corpus.k == classification.k

    def test_doc_without_classes_dropped(self, classification, thesaurus):
        source = "\n".join([
            _doc_line(id="x1", abstract="verwaltung", descriptors=[], classes=["40200"]),
            _doc_line(id="x2", abstract="reform", descriptors=[], classes=[]),
        ])
        corpus = ingest(source, classification, thesaurus)
        assert len(corpus.documents) == 1
        assert corpus.ingest_report.docs_dropped_no_labels == 1
        assert corpus.ingest_report.docs_dropped == 1

    def test_alt_label_resolves_to_preferred(self, classification, thesaurus):
        source = _doc_line(id="x1", abstract="text here",
                           descriptors=["reforms"], classes=["10000"])
        corpus = ingest(source, classification, thesaurus)
        doc = corpus.documents[0]
        assert corpus.descriptor_vocab.terms[doc.descriptor_tokens[0]] == "reform"

    def test_unknown_annotations_skipped_and_counted(self, classification, thesaurus):
        source = _doc_line(id="x1", abstract="etwas text",
                           descriptors=["reform", "nonsense"], classes=["40200", "77777"])
        corpus = ingest(source, classification, thesaurus)
        r = corpus.ingest_report
        assert r.unknown_descriptor_labels == 1
        assert r.unknown_class_labels == 1
        assert len(corpus.documents[0].descriptor_tokens) == 1

    def test_strict_unknown_class(self, classification, thesaurus):
        source = _doc_line(id="bad-doc", abstract="x y", descriptors=[], classes=["77777"])
        with pytest.raises(IngestError, match="bad-doc"):
            ingest(source, classification, thesaurus, IngestOptions(strict=True))

    def test_strict_unknown_descriptor(self, classification, thesaurus):
        source = _doc_line(id="bad-doc", abstract="x y",
                           descriptors=["nonsense"], classes=["10000"])
        with pytest.raises(IngestError, match="nonsense"):
            ingest(source, classification, thesaurus, IngestOptions(strict=True))

    def test_token_conservation(self, classification, thesaurus):
        source = "\n".join([
            _doc_line(id="a", abstract="eins zwei drei", descriptors=["reform"], classes=["10000"]),
            _doc_line(id="b", abstract="vier fuenf", descriptors=["reforms", "zz"], classes=[]),
            _doc_line(id="c", abstract="", descriptors=[], classes=["10100"]),
        ])
        corpus = ingest(source, classification, thesaurus)
        r = corpus.ingest_report
        assert r.word_tokens_raw == r.word_tokens_encoded + r.word_tokens_dropped
        assert r.desc_tokens_raw == r.desc_tokens_encoded + r.desc_tokens_dropped
        assert r.docs_read == r.docs_admitted + r.docs_dropped

    def test_reingest_byte_identical(self, classification, thesaurus):
        source = "\n".join([
            _doc_line(id="a", abstract="eins zwei drei", descriptors=["reform"], classes=["10000"]),
            _doc_line(id="b", abstract="zwei drei", descriptors=["management"], classes=["40200", "10000"]),
        ])
        one = corpus_to_json(ingest(source, classification, thesaurus))
        two = corpus_to_json(ingest(source, classification, thesaurus))
        assert one == two

    def test_serialization_round_trip(self, classification, thesaurus):
        source = _doc_line(id="a", abstract="eins zwei", descriptors=["reform"], classes=["10000"])
        corpus = ingest(source, classification, thesaurus)
        again = corpus_from_json(corpus_to_json(corpus))
        assert again == corpus

    def test_labels_sorted_and_deduplicated(self, classification, thesaurus):
        source = _doc_line(id="a", abstract="wort",
                           descriptors=[], classes=["40200", "10000", "40200"])
        corpus = ingest(source, classification, thesaurus)
        t1 = classification.topic_of("10000")
        t2 = classification.topic_of("40200")
        assert corpus.documents[0].labels == tuple(sorted((t1, t2)))


class TestPruneVocabulary:
    def _corpus(self, classification, thesaurus, abstracts):
        source = "\n".join(
            _doc_line(id=f"doc{i}", abstract=text, descriptors=[], classes=["10000"])
            for i, text in enumerate(abstracts)
        )
        return ingest(source, classification, thesaurus)

    def test_identity(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa bb", "bb cc"])
        pruned = prune_vocabulary(corpus, min_df=1, max_df_ratio=1.0)
        assert pruned == corpus

    def test_high_df_removed(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa bb", "aa cc", "aa bb dd", "aa ee"])
        pruned = prune_vocabulary(corpus, min_df=1, max_df_ratio=0.5)
        assert "aa" not in pruned.word_vocab.index  # df 4 of 4 > 0.5
        assert "bb" in pruned.word_vocab.index      # df 2 of 4 == 0.5

    def test_min_df_removes_rare(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa bb", "aa cc"])
        pruned = prune_vocabulary(corpus, min_df=2, max_df_ratio=1.0)
        assert list(pruned.word_vocab.terms) == ["aa"]

    def test_pruning_everything_is_error(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa bb", "bb cc"])
        with pytest.raises(IngestError, match="emptied"):
            prune_vocabulary(corpus, min_df=3, max_df_ratio=1.0)

    def test_conservation_after_prune(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa bb", "aa cc", "aa dd"])
        pruned = prune_vocabulary(corpus, min_df=2, max_df_ratio=1.0)
        r = pruned.ingest_report
        assert r.word_tokens_raw == r.word_tokens_encoded + r.word_tokens_dropped
        assert r.word_tokens_encoded == sum(len(d.word_tokens) for d in pruned.documents)

    def test_descriptors_never_pruned(self, classification, thesaurus):
        source = _doc_line(id="a", abstract="aa", descriptors=["reform"], classes=["10000"])
        corpus = ingest(source, classification, thesaurus)
        pruned = prune_vocabulary(corpus, min_df=2, max_df_ratio=1.0)
        assert pruned.descriptor_vocab == corpus.descriptor_vocab
        assert pruned.documents[0].descriptor_tokens == corpus.documents[0].descriptor_tokens

    def test_bad_ratio_rejected(self, classification, thesaurus):
        corpus = self._corpus(classification, thesaurus, ["aa"])
        with pytest.raises(ValueError):
            prune_vocabulary(corpus, min_df=1, max_df_ratio=1.5)


class TestGenerateSynthetic:
    def test_deterministic_under_seed(self):
        spec = SyntheticSpec(k=3, v_words=20, v_desc=10, docs=15,
                             words_per_doc=8, descriptors_per_doc=3,
                             labels_per_doc=2, concentration=0.1, seed=5)
        c1, pw1, pd1 = generate_synthetic(spec)
        c2, pw2, pd2 = generate_synthetic(spec)
        assert corpus_to_json(c1) == corpus_to_json(c2)
        assert np.array_equal(pw1, pw2) and np.array_equal(pd1, pd2)

    def test_different_seeds_differ(self):
        from dataclasses import replace
        spec = SyntheticSpec(k=3, v_words=20, v_desc=10, docs=15, seed=5)
        c1, _, _ = generate_synthetic(spec)
        c2, _, _ = generate_synthetic(replace(spec, seed=6))
        assert corpus_to_json(c1) != corpus_to_json(c2)

    def test_shapes_and_normalization(self):
        spec = SyntheticSpec(k=4, v_words=30, v_desc=12, docs=10, seed=1)
        corpus, phi_w, phi_d = generate_synthetic(spec)
        assert phi_w.shape == (4, 30) and phi_d.shape == (4, 12)
        assert np.allclose(phi_w.sum(axis=1), 1.0) and np.allclose(phi_d.sum(axis=1), 1.0)
        assert len(corpus.documents) == 10
        for doc in corpus.documents:
            assert len(doc.labels) == spec.labels_per_doc
            assert all(0 <= t < spec.k for t in doc.labels)
            assert len(doc.word_tokens) == spec.words_per_doc
            assert len(doc.descriptor_tokens) == spec.descriptors_per_doc

    def test_small_concentration_concentrates_topics(self):
        # single-label documents draw (almost) only from their topic's head terms
        spec = SyntheticSpec(k=5, v_words=50, v_desc=40, docs=30,
                             words_per_doc=20, descriptors_per_doc=10,
                             labels_per_doc=1, concentration=0.01, seed=11)
        corpus, _, phi_d = generate_synthetic(spec)
        top10 = {k: set(np.argsort(-phi_d[k])[:10]) for k in range(spec.k)}
        hits = total = 0
        for doc in corpus.documents:
            k = doc.labels[0]
            hits += sum(1 for v in doc.descriptor_tokens if v in top10[k])
            total += len(doc.descriptor_tokens)
        assert hits / total > 0.95

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            SyntheticSpec(k=0).validate()
        with pytest.raises(ValueError):
            SyntheticSpec(k=2, labels_per_doc=3).validate()
        with pytest.raises(ValueError):
            SyntheticSpec(concentration=0.0).validate()
