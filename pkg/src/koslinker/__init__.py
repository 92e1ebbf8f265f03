"""koslinker: probabilistic links between a thesaurus and a classification.

Trains a labeled two-language topic model on a jointly annotated corpus
(one topic per classification class, topics restricted to each document's
labels) and turns the per-class descriptor distributions into an explorable
link tree.
"""

from .corpus import (
    Corpus,
    Document,
    IngestOptions,
    IngestReport,
    SyntheticSpec,
    Vocabulary,
    generate_synthetic,
    ingest,
    load_corpus,
    prune_vocabulary,
    save_corpus,
    tokenize,
)
from .kos import (
    ClassificationSystem,
    Thesaurus,
    load_classification,
    load_thesaurus,
    parse_classification,
    parse_thesaurus,
    resolve_label,
)
from .links import (
    ClassLinks,
    LinkTreeNode,
    build_link_tree,
    export_tree,
    extract_links,
    load_tree,
    suggest_descriptors,
)
from .plltm import (
    Hyperparameters,
    ModelState,
    TrainedModel,
    conditional_distribution,
    estimate_theta,
    gibbs_sweep,
    initialize,
    load_model,
    log_likelihood,
    save_model,
    train,
)
from .sampler import BACKEND as SAMPLER_BACKEND

__version__ = "0.1.0"
