"""Shared fixture builders: hand-sized documents, random annotated
documents for property suites, and margin-safe grid corpora for the
statistical checks."""

from __future__ import annotations

import random
import string

from formattack.docmodel import BoundingBox, Document, FieldAnnotation, Word
from formattack.typedgen import DATA_TYPES


def make_doc(
    texts: list[str],
    boxes: list[tuple[float, float, float, float]] | None = None,
    annotations: list[dict] | None = None,
    page: tuple[float, float] = (1000.0, 1000.0),
    doc_id: str = "doc-0",
) -> Document:
    """Small explicit document; default boxes lay words on one line."""
    if boxes is None:
        boxes = [(10.0 + 60.0 * i, 10.0, 50.0 + 60.0 * i, 22.0) for i in range(len(texts))]
    words = [Word(t, BoundingBox(*b)) for t, b in zip(texts, boxes)]
    anns = []
    for spec in annotations or []:
        value = list(spec["value"])
        anns.append(
            FieldAnnotation(
                field=spec["field"],
                data_type=spec.get("data_type", "free_text"),
                key_indices=tuple(spec.get("key", ())),
                value_indices=tuple(value),
                value_text=" ".join(texts[i] for i in value),
            )
        )
    return Document(doc_id, page[0], page[1], words, anns)


def random_document(rng: random.Random, max_words: int = 40, doc_id: str = "rand-0") -> Document:
    """Random annotated document: words on a rough line grid so value spans
    are contiguous runs, with 0-3 annotated fields."""
    page_w = rng.uniform(400.0, 1200.0)
    page_h = rng.uniform(400.0, 1200.0)
    n = rng.randrange(1, max_words + 1)
    words = []
    x, y = 5.0, 5.0
    line_h = rng.uniform(12.0, 20.0)
    for _ in range(n):
        text = "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(rng.randrange(1, 9)))
        w = rng.uniform(8.0, 60.0)
        if x + w > page_w - 5.0:
            x = 5.0
            y += line_h
        if y + 10.0 > page_h - 5.0:
            y = 5.0  # wrap around; overlap is fine
        words.append(Word(text, BoundingBox(x, y, x + w, y + 10.0)))
        x += w + rng.uniform(3.0, 10.0)

    anns = []
    used: set[int] = set()
    for f in range(rng.randrange(0, 4)):
        free = [i for i in range(n) if i not in used]
        if len(free) < 2:
            break
        value_len = rng.randrange(1, min(3, len(free)) + 1)
        start = rng.choice(free[: len(free) - value_len + 1])
        value = list(range(start, start + value_len))
        if any(i in used or i >= n for i in value):
            continue
        used.update(value)
        key: list[int] = []
        key_len = rng.randrange(0, 3)
        free = [i for i in range(n) if i not in used]
        rng.shuffle(free)
        key = sorted(free[:key_len])
        used.update(key)
        anns.append(
            FieldAnnotation(
                field=f"field_{f}",
                data_type=DATA_TYPES[rng.randrange(len(DATA_TYPES))],
                key_indices=tuple(key),
                value_indices=tuple(value),
                value_text=" ".join(words[i].text for i in value),
            )
        )
    return Document(doc_id, page_w, page_h, words, anns)


def grid_documents(
    n_docs: int,
    words_per_doc: int,
    seed: int = 0,
    word_w: float = 20.0,
    word_h: float = 10.0,
) -> list[Document]:
    """Unannotated documents with words on a wide-margin grid: geometric
    jitter at reference strengths never reaches the page border, so clamping
    cannot bias the measured shift/stretch distributions."""
    rng = random.Random(seed)
    cols = 20
    x_step, y_step = 38.0, 30.0
    margin = 150.0
    rows = (words_per_doc + cols - 1) // cols
    page_w = margin * 2 + cols * x_step
    page_h = margin * 2 + rows * y_step
    docs = []
    for d in range(n_docs):
        words = []
        for i in range(words_per_doc):
            r, c = divmod(i, cols)
            x = margin + c * x_step
            y = margin + r * y_step
            text = "".join(rng.choice(string.ascii_lowercase) for _ in range(4))
            words.append(Word(text, BoundingBox(x, y, x + word_w, y + word_h)))
        docs.append(Document(f"grid-{d:03d}", page_w, page_h, words, []))
    return docs


def levenshtein(a: str, b: str) -> int:
    """Plain DP edit distance; the independent oracle for typo tests."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[len(b)]
