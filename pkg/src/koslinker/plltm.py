"""Polylingual labeled topic model trained by collapsed Gibbs sampling.

One topic per class. Each document owns a single topic mixture shared by
both observation languages (abstract words and thesaurus descriptors), and
that mixture's support is restricted to the document's label set. With the
mixtures and topic-term distributions integrated out, a sweep resamples
every token from

    p(z = k) propto (n_dk + alpha) * (n_kv_l + beta_l) / (n_k_l + V_l * beta_l)

for k in the document's labels and zero elsewhere, where all counts exclude
the token being resampled. Topic-term rows are estimated by averaging the
smoothed estimator (n_kv_l + beta_l) / (n_k_l + V_l * beta_l) over retained
post-burn-in states.

The sweep itself runs in a compiled kernel when available (see
``koslinker.sampler``); everything here is backend-agnostic.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.special import gammaln

from .corpus import Corpus, Vocabulary
from .sampler import BACKEND, RNG_ALGORITHM, SplitMix64, sweep_once

__all__ = [
    "LANG_WORDS",
    "LANG_DESC",
    "Hyperparameters",
    "ModelState",
    "TrainedModel",
    "initialize",
    "gibbs_sweep",
    "conditional_distribution",
    "train",
    "log_likelihood",
    "estimate_theta",
    "save_model",
    "load_model",
]

LANG_WORDS = 0
LANG_DESC = 1

MODEL_FORMAT = "koslinker-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Hyperparameters:
    alpha: float = 0.1
    beta_words: float = 0.01
    beta_desc: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_lag: int = 10
    seed: int = 42

    def validate(self) -> None:
        if self.alpha <= 0 or self.beta_words <= 0 or self.beta_desc <= 0:
            raise ValueError("concentrations must be positive")
        if not 0 < self.burn_in < self.iterations:
            raise ValueError("need 0 < burn_in < iterations")
        if self.sample_lag < 1:
            raise ValueError("sample_lag must be >= 1")
        if self.iterations - self.burn_in < self.sample_lag:
            raise ValueError("no sweep would be retained: "
                             "iterations - burn_in < sample_lag")

    def to_dict(self) -> dict:
        return asdict(self)


class ModelState:
    """Mutable sampler state over a flattened corpus encoding.

    Tokens and labels live in CSR-style flat arrays (``doc_start[d] ..
    doc_start[d+1]`` spans document ``d``); ``n_dk`` is stored sparsely,
    aligned with ``label_flat``, because assignments can never leave the
    label set. Count arrays are redundant tallies of ``z`` and
    :meth:`recount` recomputes them from scratch for consistency checks.
    """

    def __init__(self, corpus: Corpus, hyper: Hyperparameters):
        docs = corpus.documents
        self.k = corpus.k
        self.v_words = len(corpus.word_vocab)
        self.v_desc = len(corpus.descriptor_vocab)
        self.hyper = hyper

        self.doc_start_w = np.zeros(len(docs) + 1, dtype=np.int64)
        self.doc_start_d = np.zeros(len(docs) + 1, dtype=np.int64)
        self.label_start = np.zeros(len(docs) + 1, dtype=np.int64)
        for i, doc in enumerate(docs):
            self.doc_start_w[i + 1] = self.doc_start_w[i] + len(doc.word_tokens)
            self.doc_start_d[i + 1] = self.doc_start_d[i] + len(doc.descriptor_tokens)
            self.label_start[i + 1] = self.label_start[i] + len(doc.labels)
        self.token_w = np.fromiter(
            (v for doc in docs for v in doc.word_tokens),
            dtype=np.int32, count=int(self.doc_start_w[-1]))
        self.token_d = np.fromiter(
            (v for doc in docs for v in doc.descriptor_tokens),
            dtype=np.int32, count=int(self.doc_start_d[-1]))
        self.label_flat = np.fromiter(
            (t for doc in docs for t in doc.labels),
            dtype=np.int32, count=int(self.label_start[-1]))

        self.z_w = np.zeros(len(self.token_w), dtype=np.int32)
        self.z_d = np.zeros(len(self.token_d), dtype=np.int32)
        self.n_dk = np.zeros(len(self.label_flat), dtype=np.int64)
        self.n_kv_w = np.zeros((self.k, self.v_words), dtype=np.int64)
        self.n_kv_d = np.zeros((self.k, self.v_desc), dtype=np.int64)
        self.n_k_w = np.zeros(self.k, dtype=np.int64)
        self.n_k_d = np.zeros(self.k, dtype=np.int64)

        self.phi_accum_w = np.zeros((self.k, self.v_words), dtype=np.float64)
        self.phi_accum_d = np.zeros((self.k, self.v_desc), dtype=np.float64)
        self.accum_count = 0
        self.rng_state = np.zeros(1, dtype=np.uint64)

    @property
    def n_docs(self) -> int:
        return len(self.label_start) - 1

    def doc_labels(self, d: int) -> np.ndarray:
        return self.label_flat[self.label_start[d]:self.label_start[d + 1]]

    def doc_n_dk(self, d: int) -> np.ndarray:
        return self.n_dk[self.label_start[d]:self.label_start[d + 1]]

    def assignments(self, d: int, lang: int) -> np.ndarray:
        start, tok = ((self.doc_start_w, self.z_w) if lang == LANG_WORDS
                      else (self.doc_start_d, self.z_d))
        return tok[start[d]:start[d + 1]]

    def tokens(self, d: int, lang: int) -> np.ndarray:
        start, tok = ((self.doc_start_w, self.token_w) if lang == LANG_WORDS
                      else (self.doc_start_d, self.token_d))
        return tok[start[d]:start[d + 1]]

    def recount(self):
        """Tally all count matrices afresh from ``z`` (the authoritative
        assignment record)."""
        n_dk = np.zeros_like(self.n_dk)
        n_kv_w = np.zeros_like(self.n_kv_w)
        n_kv_d = np.zeros_like(self.n_kv_d)
        for d in range(self.n_docs):
            lbase = int(self.label_start[d])
            labels = self.doc_labels(d)
            for lang in (LANG_WORDS, LANG_DESC):
                zz = self.assignments(d, lang)
                vv = self.tokens(d, lang)
                n_kv = n_kv_w if lang == LANG_WORDS else n_kv_d
                for v, z in zip(vv.tolist(), zz.tolist()):
                    n_kv[z, v] += 1
                    j = int(np.nonzero(labels == z)[0][0])
                    n_dk[lbase + j] += 1
        return n_dk, n_kv_w, n_kv_d, n_kv_w.sum(axis=1), n_kv_d.sum(axis=1)

    def counts_consistent(self) -> bool:
        n_dk, n_kv_w, n_kv_d, n_k_w, n_k_d = self.recount()
        return (np.array_equal(n_dk, self.n_dk)
                and np.array_equal(n_kv_w, self.n_kv_w)
                and np.array_equal(n_kv_d, self.n_kv_d)
                and np.array_equal(n_k_w, self.n_k_w)
                and np.array_equal(n_k_d, self.n_k_d))

    def smoothed_phi(self, lang: int) -> np.ndarray:
        """Current-state smoothed topic-term rows for one language."""
        if lang == LANG_WORDS:
            n_kv, n_k, beta, v = self.n_kv_w, self.n_k_w, self.hyper.beta_words, self.v_words
        else:
            n_kv, n_k, beta, v = self.n_kv_d, self.n_k_d, self.hyper.beta_desc, self.v_desc
        return (n_kv + beta) / (n_k + v * beta)[:, None]


@dataclass(frozen=True)
class TrainedModel:
    """Averaged topic-term distributions plus everything needed to reuse them."""

    phi_words: np.ndarray
    phi_desc: np.ndarray
    k: int
    word_vocab: Vocabulary
    descriptor_vocab: Vocabulary
    hyper: Hyperparameters
    log_likelihood_trace: tuple[float, ...]
    desc_topic_tokens: tuple[int, ...]  # final-state descriptor tokens per topic
    rng_algorithm: str = RNG_ALGORITHM
    sampler_backend: str = field(default=BACKEND, compare=False)


def initialize(corpus: Corpus, hyper: Hyperparameters) -> ModelState:
    """Seeded uniform-over-labels assignment for every token.

    Consumes exactly one generator draw per token so the stream position
    after initialization is backend-independent.
    """
    for doc in corpus.documents:
        if not doc.labels:
            raise ValueError(f"document {doc.id!r} has no labels")
        if max(doc.labels, default=0) >= corpus.k:
            raise ValueError(f"document {doc.id!r} has a label out of range")

    state = ModelState(corpus, hyper)
    rng = SplitMix64(hyper.seed)
    for d in range(state.n_docs):
        labels = state.doc_labels(d)
        lbase = int(state.label_start[d])
        n_labels = len(labels)
        for lang in (LANG_WORDS, LANG_DESC):
            zz = state.assignments(d, lang)
            vv = state.tokens(d, lang)
            n_kv = state.n_kv_w if lang == LANG_WORDS else state.n_kv_d
            n_k = state.n_k_w if lang == LANG_WORDS else state.n_k_d
            for i in range(len(zz)):
                j = rng.next_below(n_labels)
                k = int(labels[j])
                zz[i] = k
                state.n_dk[lbase + j] += 1
                n_kv[k, vv[i]] += 1
                n_k[k] += 1
    state.rng_state[0] = rng.state
    return state


def gibbs_sweep(state: ModelState) -> ModelState:
    """One full pass: every token of every document, both languages, in
    deterministic document/language/position order."""
    h = state.hyper
    sweep_once(
        state.doc_start_w, state.token_w, state.z_w,
        state.doc_start_d, state.token_d, state.z_d,
        state.label_start, state.label_flat, state.n_dk,
        state.n_kv_w, state.n_k_w, state.n_kv_d, state.n_k_d,
        h.alpha, h.beta_words, h.beta_desc, state.rng_state,
    )
    return state


def conditional_distribution(state: ModelState, d: int, lang: int, pos: int) -> np.ndarray:
    """Full conditional over the document's labels for one token.

    The token's current assignment is excluded from all counts while the
    weights are evaluated (the state itself is left untouched). The result
    aligns with ``state.doc_labels(d)`` and sums to one.
    """
    labels = state.doc_labels(d)
    zz = state.assignments(d, lang)
    vv = state.tokens(d, lang)
    v = int(vv[pos])
    old = int(zz[pos])
    if lang == LANG_WORDS:
        n_kv, n_k, beta, v_size = state.n_kv_w, state.n_k_w, state.hyper.beta_words, state.v_words
    else:
        n_kv, n_k, beta, v_size = state.n_kv_d, state.n_k_d, state.hyper.beta_desc, state.v_desc
    alpha = state.hyper.alpha
    vbeta = v_size * beta

    n_dk = state.doc_n_dk(d)
    weights = np.empty(len(labels), dtype=np.float64)
    for j, k in enumerate(labels.tolist()):
        excl = 1 if k == old else 0
        weights[j] = ((n_dk[j] - excl + alpha)
                      * (n_kv[k, v] - excl + beta)
                      / (n_k[k] - excl + vbeta))
    return weights / weights.sum()


def log_likelihood(state: ModelState, hyper: Hyperparameters | None = None) -> float:
    """Collapsed joint log p(tokens, assignments | alpha, beta).

    Dirichlet-multinomial normalizers over each document's restricted label
    simplex plus, per language, over each topic's term distribution. Exact,
    and zero for an empty corpus.
    """
    h = hyper or state.hyper
    total = 0.0

    if state.n_docs:
        n_labels = np.diff(state.label_start).astype(np.float64)
        n_tokens = (np.diff(state.doc_start_w) + np.diff(state.doc_start_d)).astype(np.float64)
        total += float(
            np.sum(gammaln(n_labels * h.alpha) - gammaln(n_tokens + n_labels * h.alpha))
            + np.sum(gammaln(state.n_dk + h.alpha) - gammaln(h.alpha))
        )

    for n_kv, n_k, beta, v in (
        (state.n_kv_w, state.n_k_w, h.beta_words, state.v_words),
        (state.n_kv_d, state.n_k_d, h.beta_desc, state.v_desc),
    ):
        if v == 0:
            continue
        total += float(
            state.k * gammaln(v * beta)
            - np.sum(gammaln(n_k + v * beta))
            + np.sum(gammaln(n_kv + beta))
            - state.k * v * gammaln(beta)
        )
    return total


def estimate_theta(state: ModelState, d: int, hyper: Hyperparameters | None = None) -> np.ndarray:
    """Posterior-mean topic mixture for document ``d``: length-K vector with
    support exactly on the document's labels."""
    h = hyper or state.hyper
    labels = state.doc_labels(d)
    n_dk = state.doc_n_dk(d).astype(np.float64)
    n_tokens = float(n_dk.sum())
    theta = np.zeros(state.k, dtype=np.float64)
    theta[labels] = (n_dk + h.alpha) / (n_tokens + len(labels) * h.alpha)
    return theta


def train(corpus: Corpus, hyper: Hyperparameters | None = None,
          progress=None) -> TrainedModel:
    """Initialize, sweep ``iterations`` times, and average the smoothed
    topic-term estimator over every ``sample_lag``-th post-burn-in state.

    ``progress(sweep, ll)`` is invoked after each sweep when given. The
    result is a pure function of (corpus, hyperparameters) including the
    seed, regardless of sampler backend.
    """
    hyper = hyper or Hyperparameters()
    hyper.validate()
    if corpus.k < 1:
        raise ValueError("corpus has no classes")

    state = initialize(corpus, hyper)
    trace = []
    for sweep in range(1, hyper.iterations + 1):
        gibbs_sweep(state)
        ll = log_likelihood(state, hyper)
        if not np.isfinite(ll):
            raise ArithmeticError(f"non-finite log-likelihood at sweep {sweep}")
        trace.append(ll)
        if sweep > hyper.burn_in and (sweep - hyper.burn_in) % hyper.sample_lag == 0:
            state.phi_accum_w += state.smoothed_phi(LANG_WORDS)
            state.phi_accum_d += state.smoothed_phi(LANG_DESC)
            state.accum_count += 1
        if progress is not None:
            progress(sweep, ll)

    phi_words = state.phi_accum_w / state.accum_count
    phi_desc = state.phi_accum_d / state.accum_count
    return TrainedModel(
        phi_words=phi_words,
        phi_desc=phi_desc,
        k=corpus.k,
        word_vocab=corpus.word_vocab,
        descriptor_vocab=corpus.descriptor_vocab,
        hyper=hyper,
        log_likelihood_trace=tuple(trace),
        desc_topic_tokens=tuple(int(n) for n in state.n_k_d),
    )


def model_to_json(model: TrainedModel) -> str:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "k": model.k,
        "hyperparameters": model.hyper.to_dict(),
        "rng_algorithm": model.rng_algorithm,
        "sampler_backend": model.sampler_backend,
        "word_vocab": list(model.word_vocab.terms),
        "descriptor_vocab": list(model.descriptor_vocab.terms),
        "phi_words": [row for row in model.phi_words.tolist()],
        "phi_desc": [row for row in model.phi_desc.tolist()],
        "desc_topic_tokens": list(model.desc_topic_tokens),
        "log_likelihood_trace": list(model.log_likelihood_trace),
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def model_from_json(text: str) -> TrainedModel:
    payload = json.loads(text)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError("not a model file")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    hyper = Hyperparameters(**payload["hyperparameters"])
    return TrainedModel(
        phi_words=np.asarray(payload["phi_words"], dtype=np.float64).reshape(
            payload["k"], len(payload["word_vocab"])),
        phi_desc=np.asarray(payload["phi_desc"], dtype=np.float64).reshape(
            payload["k"], len(payload["descriptor_vocab"])),
        k=payload["k"],
        word_vocab=Vocabulary.from_terms(payload["word_vocab"]),
        descriptor_vocab=Vocabulary.from_terms(payload["descriptor_vocab"]),
        hyper=hyper,
        log_likelihood_trace=tuple(payload["log_likelihood_trace"]),
        desc_topic_tokens=tuple(payload.get("desc_topic_tokens", [0] * payload["k"])),
        rng_algorithm=payload.get("rng_algorithm", RNG_ALGORITHM),
        sampler_backend=payload.get("sampler_backend", "unknown"),
    )


def save_model(model: TrainedModel, path) -> None:
    with io.open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> TrainedModel:
    with io.open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
