"""Command-line pipeline: ingest -> train -> links -> serve.

Each stage reads and writes file artifacts, so the expensive training step
is decoupled from serving and every stage is reproducible in isolation.
Every flag can also be set through a ``KOSLINKER_``-prefixed environment
variable (``--beta-words`` -> ``KOSLINKER_BETA_WORDS``); explicit flags win.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import corpus as corpus_mod
from . import kos, links, plltm, server

__all__ = ["main"]


def _env(flag: str, conv=str, default=None):
    raw = os.environ.get("KOSLINKER_" + flag.replace("-", "_").upper())
    if raw is None:
        return default
    if conv is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return conv(raw)


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    h = plltm.Hyperparameters()
    p.add_argument("--alpha", type=float, default=_env("alpha", float, h.alpha))
    p.add_argument("--beta-words", type=float, default=_env("beta-words", float, h.beta_words))
    p.add_argument("--beta-desc", type=float, default=_env("beta-desc", float, h.beta_desc))
    p.add_argument("--iterations", type=int, default=_env("iterations", int, h.iterations))
    p.add_argument("--burn-in", type=int, default=_env("burn-in", int, h.burn_in))
    p.add_argument("--sample-lag", type=int, default=_env("sample-lag", int, h.sample_lag))
    p.add_argument("--seed", type=int, default=_env("seed", int, h.seed))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koslinker",
        description="Link thesaurus descriptors to classification classes "
                    "via a labeled two-language topic model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build and cache a training corpus")
    p.add_argument("--classification", required=_env("classification") is None,
                   default=_env("classification"))
    p.add_argument("--thesaurus", required=_env("thesaurus") is None,
                   default=_env("thesaurus"))
    p.add_argument("--documents", required=_env("documents") is None,
                   default=_env("documents"))
    p.add_argument("--corpus", required=_env("corpus") is None,
                   default=_env("corpus"), help="output corpus cache path")
    p.add_argument("--stopwords", default=_env("stopwords"),
                   help="optional file with one stopword per line")
    p.add_argument("--min-df", type=int, default=_env("min-df", int, 5))
    p.add_argument("--max-df-ratio", type=float, default=_env("max-df-ratio", float, 0.5))
    p.add_argument("--strict", action="store_true", default=_env("strict", bool, False))
    p.add_argument("--max-level", type=int, default=_env("max-level", int, kos.DEFAULT_MAX_LEVEL))

    p = sub.add_parser("train", help="train the model on a cached corpus")
    p.add_argument("--corpus", required=_env("corpus") is None, default=_env("corpus"))
    p.add_argument("--model", required=_env("model") is None,
                   default=_env("model"), help="output model path")
    p.add_argument("--report-every", type=int, default=_env("report-every", int, 100))
    _add_hyper_flags(p)

    p = sub.add_parser("links", help="extract the link tree from a model")
    p.add_argument("--model", required=_env("model") is None, default=_env("model"))
    p.add_argument("--classification", required=_env("classification") is None,
                   default=_env("classification"))
    p.add_argument("--thesaurus", default=_env("thesaurus"))
    p.add_argument("--tree", required=_env("tree") is None,
                   default=_env("tree"), help="output tree path")
    p.add_argument("--top-k", type=int, default=_env("top-k", int, links.DEFAULT_TOP_K))
    p.add_argument("--low-support", type=int,
                   default=_env("low-support", int, links.DEFAULT_LOW_SUPPORT))
    p.add_argument("--max-level", type=int, default=_env("max-level", int, kos.DEFAULT_MAX_LEVEL))

    p = sub.add_parser("serve", help="serve the link tree and suggestions")
    p.add_argument("--tree", required=_env("tree") is None, default=_env("tree"))
    p.add_argument("--model", default=_env("model"))
    p.add_argument("--classification", default=_env("classification"))
    p.add_argument("--assets", default=_env("assets"),
                   help="directory with the explorer UI's static files")
    p.add_argument("--host", default=_env("host", str, "127.0.0.1"))
    p.add_argument("--port", type=int, default=_env("port", int, 8080))

    return parser


def cmd_ingest(args) -> int:
    stopwords = frozenset()
    if args.stopwords:
        with open(args.stopwords, encoding="utf-8") as fh:
            stopwords = frozenset(w.strip().lower() for w in fh if w.strip())
    classification = kos.load_classification(args.classification, max_level=args.max_level)
    thesaurus = kos.load_thesaurus(args.thesaurus)
    options = corpus_mod.IngestOptions(strict=args.strict, stopwords=stopwords)
    with open(args.documents, encoding="utf-8") as fh:
        corp = corpus_mod.ingest(fh, classification, thesaurus, options,
                                 name=args.documents)
    corp = corpus_mod.prune_vocabulary(corp, min_df=args.min_df,
                                       max_df_ratio=args.max_df_ratio)
    corpus_mod.save_corpus(corp, args.corpus)

    r = corp.ingest_report
    print(f"corpus written to {args.corpus}")
    print(f"documents: {r.docs_admitted} admitted, {r.docs_dropped} dropped "
          f"({r.docs_dropped_no_labels} without labels, "
          f"{r.docs_dropped_no_tokens} without tokens)")
    print(f"word tokens: {r.word_tokens_encoded} encoded / {r.word_tokens_raw} raw "
          f"(vocabulary {len(corp.word_vocab)})")
    print(f"descriptor tokens: {r.desc_tokens_encoded} encoded / {r.desc_tokens_raw} raw "
          f"(vocabulary {len(corp.descriptor_vocab)})")
    if r.unknown_class_labels or r.unknown_descriptor_labels:
        print(f"skipped annotations: {r.unknown_class_labels} unknown classes, "
              f"{r.unknown_descriptor_labels} unknown descriptors")
    return 0


def cmd_train(args) -> int:
    corp = corpus_mod.load_corpus(args.corpus)
    hyper = plltm.Hyperparameters(
        alpha=args.alpha, beta_words=args.beta_words, beta_desc=args.beta_desc,
        iterations=args.iterations, burn_in=args.burn_in,
        sample_lag=args.sample_lag, seed=args.seed,
    )
    hyper.validate()
    every = max(args.report_every, 1)

    def progress(sweep, ll):
        if sweep % every == 0 or sweep == hyper.iterations:
            print(f"sweep {sweep}/{hyper.iterations} log-likelihood {ll:.4f}")

    print(f"training on {len(corp.documents)} documents "
          f"(K={corp.k}, sampler backend: {plltm.BACKEND})")
    model = plltm.train(corp, hyper, progress=progress)
    plltm.save_model(model, args.model)
    print(f"model written to {args.model}")
    return 0


def cmd_links(args) -> int:
    model = plltm.load_model(args.model)
    classification = kos.load_classification(args.classification,
                                             max_level=args.max_level)
    thesaurus = kos.load_thesaurus(args.thesaurus) if args.thesaurus else None
    class_links = links.extract_links(
        model, classification, thesaurus,
        top_k=args.top_k, low_support_threshold=args.low_support,
    )
    tree = links.build_link_tree(classification, class_links)
    links.export_tree(tree, args.tree)
    flagged = sum(1 for link in class_links if link.low_support)
    print(f"tree written to {args.tree}")
    print(f"classes: {len(class_links)}, low-support: {flagged}")
    return 0


def cmd_serve(args) -> int:
    service = server.LinkService.from_paths(
        tree_path=args.tree, model_path=args.model,
        classification_path=args.classification, assets_dir=args.assets,
    )
    if not 1 <= args.port <= 65535:
        raise ValueError(f"port {args.port} outside [1, 65535]")
    server.serve(service, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "links": cmd_links,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (kos.KosFormatError, corpus_mod.IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
