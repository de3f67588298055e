"""Document/annotation data model, invariants, and corpus serialization.

A corpus file is UTF-8 JSON-lines, one document per line (schema in
``docs/corpus-format.md``). Loading validates every invariant and rejects
bad records instead of repairing them. Documents are immutable values:
transforms build new ones, and construction re-runs full validation so a
transform cannot silently produce an inconsistent document.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .typedgen import DATA_TYPES

COORD_DECIMALS = 6  # serialization precision for coordinates and page size


class CorpusError(Exception):
    """Base class for corpus loading/validation failures."""


class CorpusParseError(CorpusError):
    """A record is not syntactically valid corpus JSON."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DocumentInvariantError(CorpusError):
    """A structurally parsed document violates a model invariant."""

    def __init__(self, doc_id: str, rule: str, line: int | None = None):
        self.doc_id = doc_id
        self.rule = rule
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}document {doc_id!r}: {rule}")


class WordRole(enum.Enum):
    VALUE = "value"
    KEY = "key"
    BACKGROUND = "background"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in page-absolute units; origin top-left, y down."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ValueError(f"box coordinate {name} must be a finite number")
            object.__setattr__(self, name, float(v))
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError("box coordinates must satisfy x1 <= x2 and y1 <= y2")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0

    def translated(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def as_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True)
class Word:
    text: str
    box: BoundingBox

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text:
            raise ValueError("word text must be a non-empty string")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError("word text must not contain newline characters")


@dataclass(frozen=True)
class FieldAnnotation:
    """Ground truth for one field: key/value word indices plus the canonical
    value string, which must always equal the value words joined by spaces."""

    field: str
    data_type: str
    key_indices: tuple[int, ...]
    value_indices: tuple[int, ...]
    value_text: str

    def __post_init__(self):
        object.__setattr__(self, "key_indices", _index_tuple(self.key_indices, "key_indices"))
        object.__setattr__(self, "value_indices", _index_tuple(self.value_indices, "value_indices"))
        if not isinstance(self.field, str) or not self.field:
            raise ValueError("field identifier must be a non-empty string")
        if self.data_type not in DATA_TYPES:
            raise ValueError(f"field {self.field!r}: unknown data_type {self.data_type!r}")
        if not self.value_indices:
            raise ValueError(f"field {self.field!r}: value_indices must be non-empty")
        if len(set(self.key_indices)) != len(self.key_indices):
            raise ValueError(f"field {self.field!r}: key_indices contain duplicates")
        if len(set(self.value_indices)) != len(self.value_indices):
            raise ValueError(f"field {self.field!r}: value_indices contain duplicates")
        if set(self.key_indices) & set(self.value_indices):
            raise ValueError(f"field {self.field!r}: key_indices and value_indices overlap")
        if not isinstance(self.value_text, str):
            raise ValueError(f"field {self.field!r}: value_text must be a string")


def _index_tuple(values, what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ValueError(f"{what} must contain non-negative integers")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class Document:
    """One single-page form: reading-ordered OCR words plus field annotations.

    The words tuple order is the reading order fed to extractors. Validation
    runs on construction; an invalid combination raises
    :class:`DocumentInvariantError`.
    """

    doc_id: str
    page_width: float
    page_height: float
    words: tuple[Word, ...]
    annotations: tuple[FieldAnnotation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "annotations", tuple(self.annotations))
        object.__setattr__(self, "page_width", float(self.page_width))
        object.__setattr__(self, "page_height", float(self.page_height))
        self._validate()

    def _fail(self, rule: str):
        raise DocumentInvariantError(self.doc_id, rule)

    def _validate(self):
        if not isinstance(self.doc_id, str) or not self.doc_id:
            raise DocumentInvariantError(repr(self.doc_id), "doc_id must be a non-empty string")
        for name, v in (("page_width", self.page_width), ("page_height", self.page_height)):
            if not math.isfinite(v) or v <= 0:
                self._fail(f"{name} must be positive and finite")
        n = len(self.words)
        for i, w in enumerate(self.words):
            b = w.box
            if b.x1 < 0 or b.y1 < 0 or b.x2 > self.page_width or b.y2 > self.page_height:
                self._fail(f"word {i} box {b.as_list()} lies outside the page")
        seen_fields: set[str] = set()
        value_owner: dict[int, str] = {}
        for ann in self.annotations:
            if ann.field in seen_fields:
                self._fail(f"field {ann.field!r} has more than one annotation")
            seen_fields.add(ann.field)
            for idx in ann.key_indices + ann.value_indices:
                if idx >= n:
                    self._fail(f"field {ann.field!r} references word index {idx} out of range")
            for idx in ann.value_indices:
                if idx in value_owner:
                    self._fail(
                        f"word index {idx} is a value of both "
                        f"{value_owner[idx]!r} and {ann.field!r}"
                    )
                value_owner[idx] = ann.field
            joined = " ".join(self.words[i].text for i in ann.value_indices)
            if joined != ann.value_text:
                self._fail(
                    f"field {ann.field!r}: value_text {ann.value_text!r} does not equal "
                    f"its value words joined {joined!r}"
                )

    def annotation_for(self, field_name: str) -> FieldAnnotation | None:
        for ann in self.annotations:
            if ann.field == field_name:
                return ann
        return None

    def value_index_set(self) -> frozenset[int]:
        return frozenset(i for ann in self.annotations for i in ann.value_indices)

    def key_index_set(self) -> frozenset[int]:
        return frozenset(i for ann in self.annotations for i in ann.key_indices)


def word_roles(doc: Document) -> list[WordRole]:
    """Total role partition per word index; value precedence over key."""
    values = doc.value_index_set()
    keys = doc.key_index_set()
    roles = []
    for i in range(len(doc.words)):
        if i in values:
            roles.append(WordRole.VALUE)
        elif i in keys:
            roles.append(WordRole.KEY)
        else:
            roles.append(WordRole.BACKGROUND)
    return roles


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_RECORD_KEYS = {"doc_id", "page", "words", "annotations"}
_PAGE_KEYS = {"width", "height"}
_WORD_KEYS = {"text", "box"}
_ANN_KEYS = {"field", "data_type", "key_indices", "value_indices", "value_text"}


def _round(v: float) -> float:
    return round(v, COORD_DECIMALS)


def to_record(doc: Document) -> dict:
    """Plain-JSON record for one document (coordinates rounded to 6 dp)."""
    return {
        "doc_id": doc.doc_id,
        "page": {"width": _round(doc.page_width), "height": _round(doc.page_height)},
        "words": [
            {"text": w.text, "box": [_round(c) for c in w.box.as_list()]}
            for w in doc.words
        ],
        "annotations": [
            {
                "field": a.field,
                "data_type": a.data_type,
                "key_indices": list(a.key_indices),
                "value_indices": list(a.value_indices),
                "value_text": a.value_text,
            }
            for a in doc.annotations
        ],
    }


def _expect_keys(obj: dict, expected: set[str], what: str, line: int | None):
    if not isinstance(obj, dict):
        raise CorpusParseError(f"{what} must be an object", line)
    extra = set(obj) - expected
    missing = expected - set(obj)
    if extra or missing:
        parts = []
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        if extra:
            parts.append(f"unknown keys {sorted(extra)}")
        raise CorpusParseError(f"{what}: " + ", ".join(parts), line)


def _number(v, what: str, line: int | None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise CorpusParseError(f"{what} must be a number", line)
    return float(v)


def from_record(obj: dict, line: int | None = None) -> Document:
    """Build and validate a Document from a parsed corpus record."""
    _expect_keys(obj, _RECORD_KEYS, "record", line)
    doc_id = obj["doc_id"]
    if not isinstance(doc_id, str):
        raise CorpusParseError("doc_id must be a string", line)
    _expect_keys(obj["page"], _PAGE_KEYS, "page", line)
    if not isinstance(obj["words"], list) or not isinstance(obj["annotations"], list):
        raise CorpusParseError("words and annotations must be arrays", line)
    try:
        words = []
        for w in obj["words"]:
            _expect_keys(w, _WORD_KEYS, "word", line)
            box = w["box"]
            if not isinstance(box, list) or len(box) != 4:
                raise CorpusParseError("word box must be an array of 4 numbers", line)
            coords = [_number(c, "box coordinate", line) for c in box]
            words.append(Word(w["text"], BoundingBox(*coords)))
        anns = []
        for a in obj["annotations"]:
            _expect_keys(a, _ANN_KEYS, "annotation", line)
            anns.append(
                FieldAnnotation(
                    field=a["field"],
                    data_type=a["data_type"],
                    key_indices=a["key_indices"],
                    value_indices=a["value_indices"],
                    value_text=a["value_text"],
                )
            )
        return Document(
            doc_id=doc_id,
            page_width=_number(obj["page"]["width"], "page width", line),
            page_height=_number(obj["page"]["height"], "page height", line),
            words=words,
            annotations=anns,
        )
    except ValueError as exc:
        raise DocumentInvariantError(doc_id, str(exc), line) from exc
    except DocumentInvariantError as exc:
        raise DocumentInvariantError(exc.doc_id, exc.rule, line) from exc


def dumps_record(doc: Document) -> str:
    return json.dumps(to_record(doc), ensure_ascii=False, separators=(",", ":"))


def round_trip(doc: Document) -> Document:
    """Serialize then parse; identical texts, coordinates within 6 dp."""
    return from_record(json.loads(dumps_record(doc)))


def load_corpus(path: str | Path) -> list[Document]:
    """Load a JSON-lines corpus file, validating every document."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"invalid JSON: {exc.msg}", lineno) from exc
            docs.append(from_record(obj, lineno))
    return docs


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(dumps_record(doc))
            fh.write("\n")
