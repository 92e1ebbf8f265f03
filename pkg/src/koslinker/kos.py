"""Knowledge organization systems: the classification hierarchy and the thesaurus.

Two controlled vocabularies are loaded from simple text formats and indexed:

* a hierarchical classification (a forest of coded classes, at most a
  configurable number of levels deep) in which every class doubles as a
  topic index for the model, and
* a thesaurus of descriptors, each with a unique preferred label and any
  number of synonym (non-descriptor) labels that resolve to it.

All structures are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import csv
import io
import json
import re
import unicodedata
from dataclasses import dataclass, field

__all__ = [
    "ClassNode",
    "ClassificationSystem",
    "Descriptor",
    "Thesaurus",
    "KosFormatError",
    "parse_classification",
    "parse_thesaurus",
    "resolve_label",
    "normalize_label",
]

DEFAULT_MAX_LEVEL = 4

_WS_RUN = re.compile(r"\s+")


class KosFormatError(ValueError):
    """Raised for malformed or inconsistent KOS input files."""

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        prefix = ""
        if source is not None:
            prefix = f"{source}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


def normalize_label(label: str) -> str:
    """Canonical form used for every thesaurus lookup.

    Unicode NFC, case-folded, trimmed, internal whitespace collapsed to a
    single space. Annotations in real metadata vary in casing and spacing;
    lookups must not.
    """
    label = unicodedata.normalize("NFC", label)
    label = label.casefold().strip()
    return _WS_RUN.sub(" ", label)


@dataclass(frozen=True)
class ClassNode:
    code: str
    name: str
    parent_code: str | None
    level: int
    children: tuple[str, ...]


@dataclass(frozen=True)
class ClassificationSystem:
    """A validated classification forest with a class-to-topic bijection.

    ``topic_index`` assigns contiguous integers ``0..K-1`` in depth-first
    order over the input order, so identical input files always produce the
    identical topic numbering.
    """

    nodes: dict[str, ClassNode]
    roots: tuple[str, ...]
    topic_index: dict[str, int]
    codes_by_topic: tuple[str, ...] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.nodes)

    def topic_of(self, code: str) -> int:
        return self.topic_index[code]

    def code_of(self, topic: int) -> str:
        return self.codes_by_topic[topic]

    def walk(self):
        """Yield codes in depth-first input order (the topic order)."""
        return iter(self.codes_by_topic)


@dataclass(frozen=True)
class Descriptor:
    id: str
    preferred_label: str
    alt_labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class Thesaurus:
    descriptors: tuple[Descriptor, ...]
    label_index: dict[str, str]  # normalized label -> descriptor id
    by_id: dict[str, Descriptor]

    def preferred_label(self, descriptor_id: str) -> str:
        return self.by_id[descriptor_id].preferred_label


def _read_rows(source, name):
    """Yield (lineno, code, name, parent) from CSV or JSON-lines input.

    A header line ``code,name,parent`` marks the CSV form; lines starting
    with ``{`` mark the object-stream form. Mixing the two is rejected.
    """
    text = source.read() if hasattr(source, "read") else source
    lines = text.splitlines()
    mode = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if mode is None:
            mode = "jsonl" if line.startswith("{") else "csv"
            if mode == "csv":
                header = [h.strip() for h in next(csv.reader([line]))]
                if header != ["code", "name", "parent"]:
                    raise KosFormatError(
                        "expected header 'code,name,parent', got "
                        f"{','.join(header)!r}",
                        name,
                        lineno,
                    )
                continue
        if mode == "jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise KosFormatError(f"invalid JSON object: {exc}", name, lineno)
            code = str(obj.get("code", "")).strip()
            cls_name = str(obj.get("name", "")).strip()
            parent = str(obj.get("parent") or "").strip()
        else:
            fields = next(csv.reader([line]))
            if len(fields) < 2:
                raise KosFormatError("expected at least code and name fields", name, lineno)
            code = fields[0].strip()
            cls_name = fields[1].strip()
            parent = fields[2].strip() if len(fields) > 2 else ""
        if not code:
            raise KosFormatError("empty class code", name, lineno)
        yield lineno, code, cls_name, parent or None


def parse_classification(source, max_level: int = DEFAULT_MAX_LEVEL,
                         name: str = "<classification>") -> ClassificationSystem:
    """Parse and validate a classification file into an indexed forest.

    ``source`` is a string or text stream in either accepted format (see
    ``_read_rows``). Raises :class:`KosFormatError` on duplicate codes,
    missing parents, cycles, level-bound violations, or empty input.
    """
    rows = list(_read_rows(source, name))
    if not rows:
        raise KosFormatError("no classes in input", name)

    lineno_of = {}
    parent_of = {}
    name_of = {}
    children = {}
    order = []
    for lineno, code, cls_name, parent in rows:
        if code in parent_of:
            raise KosFormatError(f"duplicate class code {code!r}", name, lineno)
        parent_of[code] = parent
        name_of[code] = cls_name
        lineno_of[code] = lineno
        children[code] = []
        order.append(code)

    roots = []
    for code in order:
        parent = parent_of[code]
        if parent is None:
            roots.append(code)
        elif parent not in parent_of:
            raise KosFormatError(
                f"class {code!r} references missing parent {parent!r}",
                name,
                lineno_of[code],
            )
        else:
            children[parent].append(code)

    # Depth-first walk from the roots assigns levels and the topic numbering;
    # any node not reached sits on a parent cycle.
    nodes = {}
    topic_index = {}
    codes_by_topic = []
    stack = [(code, 1) for code in reversed(roots)]
    while stack:
        code, level = stack.pop()
        if level > max_level:
            raise KosFormatError(
                f"class {code!r} at level {level} exceeds the bound {max_level}",
                name,
                lineno_of[code],
            )
        topic_index[code] = len(codes_by_topic)
        codes_by_topic.append(code)
        nodes[code] = ClassNode(
            code=code,
            name=name_of[code],
            parent_code=parent_of[code],
            level=level,
            children=tuple(children[code]),
        )
        for child in reversed(children[code]):
            stack.append((child, level + 1))

    if len(nodes) != len(order):
        stranded = sorted(set(order) - set(nodes), key=order.index)
        raise KosFormatError(
            f"cycle detected involving classes {', '.join(stranded[:5])}",
            name,
            lineno_of[stranded[0]],
        )

    return ClassificationSystem(
        nodes=nodes,
        roots=tuple(roots),
        topic_index=topic_index,
        codes_by_topic=tuple(codes_by_topic),
    )


def parse_thesaurus(source, name: str = "<thesaurus>") -> Thesaurus:
    """Parse a JSON-lines thesaurus (keys: id, label, alt) into an index.

    Preferred and alt labels share one lookup table keyed on the normalized
    form; a label claimed twice (in any role) is an error because lookups
    would become ambiguous.
    """
    text = source.read() if hasattr(source, "read") else source
    descriptors = []
    label_index = {}
    by_id = {}
    owner = {}  # normalized label -> (descriptor id, role) for diagnostics
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise KosFormatError(f"invalid JSON object: {exc}", name, lineno)
        desc_id = str(obj.get("id", "")).strip()
        label = str(obj.get("label", "")).strip()
        alts = tuple(str(a).strip() for a in obj.get("alt", []) or ())
        if not desc_id or not label:
            raise KosFormatError("descriptor needs both id and label", name, lineno)
        if desc_id in by_id:
            raise KosFormatError(f"duplicate descriptor id {desc_id!r}", name, lineno)

        desc = Descriptor(id=desc_id, preferred_label=label, alt_labels=alts)
        for lab, role in [(label, "preferred")] + [(a, "alt") for a in alts]:
            key = normalize_label(lab)
            if key in owner:
                other_id, other_role = owner[key]
                raise KosFormatError(
                    f"label {lab!r} ({role} of {desc_id!r}) already used as "
                    f"{other_role} label of {other_id!r}",
                    name,
                    lineno,
                )
            owner[key] = (desc_id, role)
            label_index[key] = desc_id
        descriptors.append(desc)
        by_id[desc_id] = desc

    return Thesaurus(
        descriptors=tuple(descriptors),
        label_index=label_index,
        by_id=by_id,
    )


def resolve_label(thesaurus: Thesaurus, label: str) -> str | None:
    """Map any preferred or synonym label to its descriptor id, else None."""
    return thesaurus.label_index.get(normalize_label(label))


def load_classification(path, max_level: int = DEFAULT_MAX_LEVEL) -> ClassificationSystem:
    with io.open(path, "r", encoding="utf-8") as fh:
        return parse_classification(fh, max_level=max_level, name=str(path))


def load_thesaurus(path) -> Thesaurus:
    with io.open(path, "r", encoding="utf-8") as fh:
        return parse_thesaurus(fh, name=str(path))
