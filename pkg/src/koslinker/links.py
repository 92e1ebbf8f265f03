"""From a trained model to the class-descriptor link tree.

Each class's topic owns a distribution over thesaurus descriptors; its
top-k entries (default five) are the links. The classification hierarchy
is preserved, decorated with those links, and exported in a fixed JSON
interchange format consumed by the explorer UI and the suggestion service.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .kos import ClassificationSystem, Thesaurus, resolve_label
from .plltm import TrainedModel

__all__ = [
    "ClassLinks",
    "LinkTreeNode",
    "DEFAULT_TOP_K",
    "DEFAULT_LOW_SUPPORT",
    "extract_links",
    "suggest_descriptors",
    "build_link_tree",
    "export_tree",
    "tree_to_json",
    "tree_from_json",
    "load_tree",
]

DEFAULT_TOP_K = 5
# Topics with fewer descriptor tokens than this at the final state carry no
# links: their phi rows are prior noise, not evidence.
DEFAULT_LOW_SUPPORT = 10

SYNTHETIC_ROOT_CODE = "ROOT"


@dataclass(frozen=True)
class ClassLinks:
    code: str
    topic: int
    descriptors: tuple[tuple[str, float], ...]  # (label, p) descending by p
    support: int
    low_support: bool


@dataclass
class LinkTreeNode:
    code: str
    name: str
    level: int
    descriptors: tuple[tuple[str, float], ...]
    support: int
    low_support: bool
    children: list["LinkTreeNode"] = field(default_factory=list)


def _top_k(row: np.ndarray, k: int) -> list[int]:
    # descending by probability, ties broken by vocabulary index ascending
    order = np.argsort(-row, kind="stable")
    return [int(v) for v in order[:k]]


def extract_links(model: TrainedModel, classification: ClassificationSystem,
                  thesaurus: Thesaurus | None = None, top_k: int = DEFAULT_TOP_K,
                  low_support_threshold: int = DEFAULT_LOW_SUPPORT) -> list[ClassLinks]:
    """Per class, the ``top_k`` most probable descriptors of its topic.

    Probabilities are the phi-row entries themselves (comparable across
    classes; never renormalized within the top-k). Topics whose final-state
    descriptor support falls below the threshold get an empty list and a
    ``low_support`` flag instead of prior-dominated noise.

    The descriptor vocabulary already stores preferred labels; a thesaurus,
    when given, re-resolves terms (ids, synonyms) to preferred labels.
    """
    if model.k != classification.k:
        raise ValueError(
            f"model has {model.k} topics but classification has "
            f"{classification.k} classes")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")

    terms = model.descriptor_vocab.terms
    labels = list(terms)
    if thesaurus is not None:
        for i, term in enumerate(terms):
            if term in thesaurus.by_id:
                labels[i] = thesaurus.by_id[term].preferred_label
            else:
                desc_id = resolve_label(thesaurus, term)
                if desc_id is not None:
                    labels[i] = thesaurus.preferred_label(desc_id)

    support = list(model.desc_topic_tokens)
    links = []
    for code in classification.walk():
        topic = classification.topic_of(code)
        sup = int(support[topic]) if topic < len(support) else 0
        if sup < low_support_threshold:
            links.append(ClassLinks(code=code, topic=topic, descriptors=(),
                                    support=sup, low_support=True))
            continue
        row = model.phi_desc[topic]
        descriptors = tuple(
            (labels[v], float(row[v])) for v in _top_k(row, top_k)
        )
        links.append(ClassLinks(code=code, topic=topic, descriptors=descriptors,
                                support=sup, low_support=False))
    return links


def suggest_descriptors(model: TrainedModel, classes, k: int = DEFAULT_TOP_K) -> list[tuple[str, float]]:
    """Top-k descriptors of the uniform mixture over the chosen classes.

    ``classes`` is a non-empty set of topic indices; a singleton reproduces
    that class's own link list.
    """
    topics = sorted(set(int(t) for t in classes))
    if not topics:
        raise ValueError("classes must be non-empty")
    for t in topics:
        if not 0 <= t < model.k:
            raise ValueError(f"topic index {t} out of range [0, {model.k})")
    mixture = model.phi_desc[topics].mean(axis=0)
    terms = model.descriptor_vocab.terms
    return [(terms[v], float(mixture[v])) for v in _top_k(mixture, k)]


def build_link_tree(classification: ClassificationSystem,
                    links: list[ClassLinks]) -> LinkTreeNode:
    """Mirror the classification forest, decorated with the links.

    Every class must be covered exactly once. Forests with several roots
    get a synthetic ``ROOT`` node (level 0, no descriptors) so the result
    is always a single tree.
    """
    by_code = {}
    for link in links:
        if link.code in by_code:
            raise ValueError(f"duplicate links for class {link.code!r}")
        by_code[link.code] = link
    missing = [c for c in classification.walk() if c not in by_code]
    if missing:
        raise ValueError(f"no links for classes: {', '.join(missing[:5])}")
    extra = set(by_code) - set(classification.nodes)
    if extra:
        raise ValueError(f"links for unknown classes: {', '.join(sorted(extra)[:5])}")

    def make(code: str) -> LinkTreeNode:
        node = classification.nodes[code]
        link = by_code[code]
        return LinkTreeNode(
            code=code,
            name=node.name,
            level=node.level,
            descriptors=link.descriptors,
            support=link.support,
            low_support=link.low_support,
            children=[make(child) for child in node.children],
        )

    children = [make(code) for code in classification.roots]
    if len(children) == 1:
        return children[0]
    return LinkTreeNode(
        code=SYNTHETIC_ROOT_CODE,
        name=SYNTHETIC_ROOT_CODE,
        level=0,
        descriptors=(),
        support=0,
        low_support=False,
        children=children,
    )


def _round6(p: float) -> float:
    # six significant digits, round-tripping through repr unchanged
    return float(f"{p:.6g}")


def _node_payload(node: LinkTreeNode) -> dict:
    # key order is part of the interchange format
    return {
        "code": node.code,
        "name": node.name,
        "level": node.level,
        "low_support": node.low_support,
        "descriptors": [
            {"label": label, "p": _round6(p)} for label, p in node.descriptors
        ],
        "children": [_node_payload(child) for child in node.children],
    }


def tree_to_json(tree: LinkTreeNode) -> str:
    return json.dumps(_node_payload(tree), ensure_ascii=False, separators=(",", ":"))


def _node_from_payload(payload: dict) -> LinkTreeNode:
    return LinkTreeNode(
        code=payload["code"],
        name=payload["name"],
        level=payload["level"],
        descriptors=tuple((d["label"], float(d["p"])) for d in payload["descriptors"]),
        support=0,  # not part of the interchange format
        low_support=payload["low_support"],
        children=[_node_from_payload(c) for c in payload["children"]],
    )


def tree_from_json(text: str) -> LinkTreeNode:
    return _node_from_payload(json.loads(text))


def export_tree(tree: LinkTreeNode, destination) -> None:
    """Write the interchange document; byte-deterministic for a given tree."""
    text = tree_to_json(tree)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with io.open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_tree(path) -> LinkTreeNode:
    with io.open(path, "r", encoding="utf-8") as fh:
        return tree_from_json(fh.read())
