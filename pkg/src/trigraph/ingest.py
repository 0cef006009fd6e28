"""Parsing, anonymization, and synthesis of document-author record sets.

Record files are two-column TSV: a document key, a TAB, then a
comma-separated author list. Repeated authors within one line are kept
as a multiplicity count. Truth files map document keys to entity keys,
one ``doc<TAB>entity`` pair per line. Lines starting with ``#`` are
comments in both formats.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .errors import (
    ConfigError,
    DuplicateKeyError,
    NameNotFoundError,
    RecordParseError,
)

TOKEN_WIDTH = 16  # hex chars in an anonymized identifier


def _collapse(keys: Iterable[str]) -> tuple[tuple[str, int], ...]:
    """Collapse repeated keys to (key, count) pairs in first-appearance order."""
    counts: dict[str, int] = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    return tuple(counts.items())


@dataclass(frozen=True)
class Record:
    """One document with its author list, duplicates collapsed to counts."""

    doc_key: str
    authors: tuple[tuple[str, int], ...]

    def author_keys(self) -> list[str]:
        return [key for key, _ in self.authors]

    def multiplicity(self, key: str) -> int:
        for author, count in self.authors:
            if author == key:
                return count
        return 0


@dataclass
class RecordSet:
    """An ordered collection of records, optionally with ground-truth labels."""

    records: list[Record]
    truth: dict[str, str] | None = None

    def __post_init__(self):
        seen: set[str] = set()
        for rec in self.records:
            if rec.doc_key in seen:
                raise DuplicateKeyError(f"duplicate document key {rec.doc_key!r}")
            if not rec.authors:
                raise ConfigError(f"record {rec.doc_key!r} has no authors")
            seen.add(rec.doc_key)
        if self.truth is not None and set(self.truth) != seen:
            raise ConfigError("truth key set does not match the document key set")

    def doc_keys(self) -> list[str]:
        return [rec.doc_key for rec in self.records]

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class Instance:
    """All documents of one ambiguous name, with dense local indexing.

    ``docs`` and ``collaborators`` are indexed in first-appearance order
    over the input stream. ``doc_authors[i]`` lists (collaborator index,
    multiplicity) pairs for document i; the name reference itself is
    never a collaborator. ``truth``, when present, holds dense class ids
    per document.
    """

    name_ref: str
    docs: list[str]
    collaborators: list[str]
    doc_authors: list[list[tuple[int, int]]]
    truth: list[int] | None = None

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def n_collaborators(self) -> int:
        return len(self.collaborators)

    @property
    def n_classes(self) -> int:
        if self.truth is None:
            raise ConfigError("instance has no ground truth")
        return max(self.truth) + 1 if self.truth else 0


def _lines(stream) -> Iterable[str]:
    for raw in stream:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_records(stream: IO[bytes] | IO[str] | Iterable[str]) -> RecordSet:
    """Parse a record stream into a RecordSet, preserving file order."""
    records: list[Record] = []
    seen: dict[str, int] = {}
    for line_no, raw in enumerate(_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise RecordParseError(line_no, f"expected 2 tab-separated fields, got {len(fields)}")
        doc_key, author_field = fields
        if not doc_key:
            raise RecordParseError(line_no, "empty document key")
        authors = author_field.split(",")
        if not author_field or any(not a for a in authors):
            raise RecordParseError(line_no, "empty author key")
        if doc_key in seen:
            raise DuplicateKeyError(
                f"line {line_no}: document key {doc_key!r} already seen on line {seen[doc_key]}"
            )
        seen[doc_key] = line_no
        records.append(Record(doc_key, _collapse(authors)))
    return RecordSet(records)


def parse_truth(stream: IO[bytes] | IO[str] | Iterable[str]) -> dict[str, str]:
    """Parse a truth stream into a doc-key to entity-key map."""
    labels: dict[str, str] = {}
    for line_no, raw in enumerate(_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise RecordParseError(line_no, "expected doc<TAB>entity")
        if fields[0] in labels:
            raise DuplicateKeyError(f"line {line_no}: duplicate truth key {fields[0]!r}")
        labels[fields[0]] = fields[1]
    return labels


def load_records(records_path: str | Path, truth_path: str | Path | None = None) -> RecordSet:
    """Read a record file, optionally attaching a truth file."""
    with open(records_path, "rb") as fh:
        rs = parse_records(fh)
    if truth_path is None:
        return rs
    with open(truth_path, "rb") as fh:
        truth = parse_truth(fh)
    return RecordSet(rs.records, truth)


def serialize_records(rs: RecordSet) -> str:
    """Render records back to TSV text (multiplicities expanded in place)."""
    lines = []
    for rec in rs.records:
        expanded: list[str] = []
        for key, count in rec.authors:
            expanded.extend([key] * count)
        lines.append(f"{rec.doc_key}\t{','.join(expanded)}")
    return "".join(line + "\n" for line in lines)


def serialize_truth(rs: RecordSet) -> str:
    """Render the truth map to TSV text in document order."""
    if rs.truth is None:
        raise ConfigError("record set has no truth labels")
    return "".join(f"{key}\t{rs.truth[key]}\n" for key in rs.doc_keys())


def anonymize(rs: RecordSet, seed: int) -> tuple[RecordSet, dict[str, str]]:
    """Replace every document and author key with a pseudo-random hex token.

    Tokens are drawn deterministically from ``seed`` in first-appearance
    order over the record stream, so the same input and seed always yield
    the same output. Returns the renamed RecordSet and the key map.
    """
    rng = np.random.default_rng(seed)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def token_for(key: str) -> str:
        if key in mapping:
            return mapping[key]
        while True:
            token = format(int(rng.integers(0, 2**64, dtype=np.uint64)), f"0{TOKEN_WIDTH}x")
            if token not in used:
                break
        used.add(token)
        mapping[key] = token
        return token

    renamed = []
    for rec in rs.records:
        doc = token_for(rec.doc_key)
        authors = tuple((token_for(key), count) for key, count in rec.authors)
        renamed.append(Record(doc, authors))
    truth = None
    if rs.truth is not None:
        truth = {mapping[doc]: entity for doc, entity in rs.truth.items()}
    return RecordSet(renamed, truth), mapping


def select_instance(rs: RecordSet, name_ref: str) -> Instance:
    """Slice out the disambiguation instance of one name reference.

    Documents are every record whose author list contains ``name_ref``;
    collaborators are the union of their other authors. Truth labels, if
    present, are relabeled to dense class ids by first appearance.
    """
    person_index: dict[str, int] = {}
    class_index: dict[str, int] = {}
    docs: list[str] = []
    doc_authors: list[list[tuple[int, int]]] = []
    truth_labels: list[int] = []
    for rec in rs.records:
        if rec.multiplicity(name_ref) == 0:
            continue
        docs.append(rec.doc_key)
        entry = []
        for key, count in rec.authors:
            if key == name_ref:
                continue
            idx = person_index.setdefault(key, len(person_index))
            entry.append((idx, count))
        doc_authors.append(entry)
        if rs.truth is not None:
            entity = rs.truth[rec.doc_key]
            truth_labels.append(class_index.setdefault(entity, len(class_index)))
    if not docs:
        raise NameNotFoundError(f"name reference {name_ref!r} occurs in no record")
    truth = truth_labels if rs.truth is not None else None
    return Instance(name_ref, docs, list(person_index), doc_authors, truth)


SYNTH_NAME_REF = "focal"


def generate_synthetic(
    n_entities: int,
    alpha: float,
    docs_min: int,
    pool: int,
    within_collab: float,
    seed: int,
    name_ref: str = SYNTH_NAME_REF,
) -> RecordSet:
    """Synthesize an ambiguous-name record set with ground truth.

    Each of ``n_entities`` hidden entities publishes under the same name
    reference. Per-entity document counts are Zipf draws with exponent
    ``alpha``, floored at ``docs_min``, which gives the heavy-tailed class
    sizes typical of real namesake data. Entity e owns a private slice of
    the ``pool`` global collaborators; each document draws 1-3 co-authors,
    each from the owner's slice with probability ``within_collab`` and
    from the whole pool otherwise. Short author lists keep direct author
    overlap sparse, so entity structure lives mostly in two-hop
    relationships. Deterministic given ``seed``.
    """
    if n_entities < 1:
        raise ConfigError("n_entities must be >= 1")
    if alpha <= 1.0:
        raise ConfigError("power-law exponent must exceed 1")
    if docs_min < 1:
        raise ConfigError("docs_min must be >= 1")
    if pool < n_entities:
        raise ConfigError("collaborator pool must be >= n_entities")
    if not 0.0 <= within_collab <= 1.0:
        raise ConfigError("within_collab must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    doc_counts = np.maximum(docs_min, rng.zipf(alpha, size=n_entities))
    persons = [f"p{i:05d}" for i in range(pool)]
    bounds = [(e * pool) // n_entities for e in range(n_entities + 1)]

    records: list[Record] = []
    truth: dict[str, str] = {}
    doc_no = 0
    for e in range(n_entities):
        lo, hi = bounds[e], bounds[e + 1]
        for _ in range(int(doc_counts[e])):
            doc_key = f"d{doc_no:05d}"
            doc_no += 1
            coauthors = []
            for _ in range(int(rng.integers(1, 4))):
                if rng.random() < within_collab:
                    p = int(rng.integers(lo, hi))
                else:
                    p = int(rng.integers(0, pool))
                coauthors.append(persons[p])
            records.append(Record(doc_key, _collapse([name_ref] + coauthors)))
            truth[doc_key] = f"e{e:03d}"
    return RecordSet(records, truth)


def class_sizes(labels: Iterable[str] | Iterable[int]) -> list[int]:
    """Class sizes in descending order, from any label sequence."""
    counts: dict = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    return sorted(counts.values(), reverse=True)
