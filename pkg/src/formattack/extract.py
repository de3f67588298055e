"""Extractor interface: score post-processing, a hermetic heuristic
baseline, and a client for external extractor worker processes.

The baseline exists so the harness can demonstrate robustness
directionality without any ML dependency; it is key-lexicon plus data-type
driven and its absolute scores are not comparable to learned extractors.

External workers speak a line-delimited JSON protocol over stdin/stdout
(see ``docs/worker-protocol.md``): a handshake declaring protocol version,
field list, and mode, then one request/response pair per document. Workers
in "scores" mode return an N x (M+1) score matrix which goes through the
same post-processing as any other token scorer; "values" mode returns final
strings and bypasses post-processing.
"""

from __future__ import annotations

import json
import logging
import queue
import re
import shlex
import statistics
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Sequence

from .docmodel import BoundingBox, Document, to_record

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
DEFAULT_THRESHOLD = 0.1

TokenScores = Sequence[Sequence[float]]

DATE_PATTERN = re.compile(
    r"^(?:\d{2}/\d{2}/\d{2}|\d{2}-\d{2}-\d{2}|\d{2}/[A-Za-z]{3,9}/\d{2})$"
)
NUMBER_PATTERN = re.compile(r"^\d{3,}$")
MONEY_PATTERN = re.compile(r"^\$?\d{1,3}(?:,\d{3})*\.\d{2}$")

_TYPE_PATTERNS = {"date": DATE_PATTERN, "number": NUMBER_PATTERN, "money": MONEY_PATTERN}


class ExtractorError(Exception):
    pass


class ScoreShapeError(ExtractorError):
    """Token scores do not align with the document or field set."""


class WorkerError(ExtractorError):
    pass


class WorkerTransportError(WorkerError):
    """The worker process died or closed its stream."""


class WorkerProtocolError(WorkerError):
    """The worker sent a malformed or mismatched record."""


class WorkerTimeoutError(WorkerError):
    pass


@dataclass(frozen=True)
class FieldConfig:
    """One extractable field: its data type, multi-word flag, and the key
    phrases the baseline extractor matches (ignored by workers)."""

    name: str
    data_type: str
    multi_word: bool = False
    key_lexicon: tuple[str, ...] = ()


@dataclass(frozen=True)
class ExtractionResult:
    """Per-field predicted value strings for one document. ``error`` is set
    when the extractor failed on this document (values then empty)."""

    doc_id: str
    values: dict[str, str] = field(default_factory=dict)
    error: str | None = None


def matches_data_type(text: str, data_type: str) -> bool:
    pattern = _TYPE_PATTERNS.get(data_type)
    return True if pattern is None else bool(pattern.match(text))


# ---------------------------------------------------------------------------
# score post-processing
# ---------------------------------------------------------------------------

def postprocess(
    scores: TokenScores,
    doc: Document,
    fields: Sequence[FieldConfig],
    threshold: float = DEFAULT_THRESHOLD,
) -> ExtractionResult:
    """Turn per-word field scores into field values.

    Each word is assigned its argmax class over the M fields plus
    background (the last class; ties go to the lower class index). For a
    single-word field the best-scoring word predicted as that field is kept
    if its score strictly exceeds the threshold. For a multi-word field all
    words above the threshold are kept and grouped; words group when
    consecutive in reading order or vertically overlapping with a
    horizontal gap under one median character width, and the group holding
    the best-scoring word is joined in reading order.
    """
    n, m = len(doc.words), len(fields)
    if len(scores) != n:
        raise ScoreShapeError(f"expected {n} score rows, got {len(scores)}")
    for i, row in enumerate(scores):
        if len(row) != m + 1:
            raise ScoreShapeError(f"row {i}: expected {m + 1} scores, got {len(row)}")

    predicted = [_argmax(row) for row in scores]
    values: dict[str, str] = {}
    for c, fc in enumerate(fields):
        if fc.multi_word:
            kept = [i for i in range(n) if predicted[i] == c and scores[i][c] > threshold]
            group = _best_group(kept, doc, scores, c)
            if group:
                values[fc.name] = " ".join(doc.words[i].text for i in group)
        else:
            best = None
            for i in range(n):
                if predicted[i] != c:
                    continue
                if best is None or scores[i][c] > scores[best][c]:
                    best = i
            if best is not None and scores[best][c] > threshold:
                values[fc.name] = doc.words[best].text
    return ExtractionResult(doc_id=doc.doc_id, values=values)


def _argmax(row: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(row)):
        if row[i] > row[best]:
            best = i
    return best


def median_char_width(doc: Document) -> float:
    widths = [w.box.width / len(w.text) for w in doc.words if w.text]
    return statistics.median(widths) if widths else 0.0


def _grouped(kept: Sequence[int], doc: Document, char_width: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i in kept:
        if groups and _linked(doc.words[groups[-1][-1]].box, doc.words[i].box,
                              groups[-1][-1], i, char_width):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _linked(a: BoundingBox, b: BoundingBox, ia: int, ib: int, char_width: float) -> bool:
    if ib == ia + 1:
        return True
    v_overlap = min(a.y2, b.y2) - max(a.y1, b.y1)
    h_gap = max(a.x1, b.x1) - min(a.x2, b.x2)
    return v_overlap > 0.0 and h_gap < char_width


def _best_group(kept: list[int], doc: Document, scores: TokenScores, c: int) -> list[int]:
    if not kept:
        return []
    groups = _grouped(kept, doc, median_char_width(doc))
    anchor = max(kept, key=lambda i: (scores[i][c], -i))
    for group in groups:
        if anchor in group:
            return group
    return []


# ---------------------------------------------------------------------------
# heuristic baseline extractor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BaselineConfig:
    """Geometry knobs for the key-driven baseline: candidate search radius
    as a fraction of the page, and the top-line count for keyless fields."""

    radius_x_frac: float = 0.35
    radius_y_frac: float = 0.12
    top_lines: int = 3


_PUNCT = ".:,;#()"


def _norm_token(text: str) -> str:
    return text.strip(_PUNCT).lower()


def document_lines(doc: Document) -> list[list[int]]:
    """Word indices grouped into lines by vertical overlap, top to bottom,
    left to right within a line."""
    order = sorted(range(len(doc.words)), key=lambda i: (doc.words[i].box.center[1], i))
    lines: list[tuple[list[int], list[float]]] = []
    for i in order:
        b = doc.words[i].box
        placed = False
        for members, span in lines:
            if min(span[1], b.y2) - max(span[0], b.y1) > 0.0:
                members.append(i)
                span[0] = min(span[0], b.y1)
                span[1] = max(span[1], b.y2)
                placed = True
                break
        if not placed:
            lines.append(([i], [b.y1, b.y2]))
    lines.sort(key=lambda entry: entry[1][0])
    return [sorted(members, key=lambda i: doc.words[i].box.x1) for members, _ in lines]


def _find_key_span(doc: Document, phrases: Sequence[str]) -> list[int] | None:
    tokens = [_norm_token(w.text) for w in doc.words]
    for phrase in phrases:
        want = [_norm_token(t) for t in phrase.split()]
        if not want:
            continue
        for start in range(len(tokens) - len(want) + 1):
            if tokens[start:start + len(want)] == want:
                return list(range(start, start + len(want)))
    return None


def _box_gap(a: BoundingBox, b: BoundingBox) -> float:
    dx = max(0.0, max(a.x1, b.x1) - min(a.x2, b.x2))
    dy = max(0.0, max(a.y1, b.y1) - min(a.y2, b.y2))
    return (dx * dx + dy * dy) ** 0.5


def _union_box(doc: Document, indices: Sequence[int]) -> BoundingBox:
    boxes = [doc.words[i].box for i in indices]
    return BoundingBox(
        min(b.x1 for b in boxes), min(b.y1 for b in boxes),
        max(b.x2 for b in boxes), max(b.y2 for b in boxes),
    )


def baseline_extract(
    doc: Document,
    fields: Sequence[FieldConfig],
    config: BaselineConfig = BaselineConfig(),
) -> ExtractionResult:
    """Deterministic key-lexicon baseline.

    Keyed fields: find the first key-phrase match in reading order, then
    take the nearest word to the right of or below the key whose text
    matches the field's data type. Keyless typed fields: first data-type
    match within the top lines. Keyless free-text fields: assigned top
    lines in field order (first field takes the top line, the next takes
    the remaining top lines), which mirrors receipt headers.
    """
    radius_x = config.radius_x_frac * doc.page_width
    radius_y = config.radius_y_frac * doc.page_height
    lines = document_lines(doc)
    top = lines[: config.top_lines]
    values: dict[str, str] = {}

    keyless_free = [f for f in fields if not f.key_lexicon and f.data_type == "free_text"]
    for slot, fc in enumerate(keyless_free):
        if slot >= len(top):
            break
        if fc is keyless_free[-1] and fc.multi_word:
            chosen = [i for line in top[slot:] for i in line]
        else:
            chosen = top[slot]
        if chosen:
            values[fc.name] = " ".join(doc.words[i].text for i in sorted(chosen))

    for fc in fields:
        if fc in keyless_free:
            continue
        if not fc.key_lexicon:
            for line in top:
                hit = next(
                    (i for i in line if matches_data_type(doc.words[i].text, fc.data_type)), None
                )
                if hit is not None:
                    values[fc.name] = doc.words[hit].text
                    break
            continue
        span = _find_key_span(doc, fc.key_lexicon)
        if span is None:
            continue
        key_box = _union_box(doc, span)
        candidates = []
        for i, w in enumerate(doc.words):
            if i in span:
                continue
            b = w.box
            right = (
                min(key_box.y2, b.y2) - max(key_box.y1, b.y1) > 0.0
                and b.x1 >= key_box.x1
                and b.x1 - key_box.x2 <= radius_x
            )
            below = (
                b.y1 >= key_box.y1
                and b.y1 - key_box.y2 <= radius_y
                and b.x2 >= key_box.x1 - radius_x / 2
                and b.x1 <= key_box.x2 + radius_x
            )
            if right or below:
                candidates.append((_box_gap(key_box, b), i))
        candidates.sort()
        if fc.multi_word:
            key_line = next((ln for ln in lines if span[0] in ln), [])
            right_of_key = [i for i in key_line if i not in span
                            and doc.words[i].box.x1 >= key_box.x2]
            if right_of_key:
                values[fc.name] = " ".join(doc.words[i].text for i in right_of_key)
            continue
        for _, i in candidates:
            if matches_data_type(doc.words[i].text, fc.data_type):
                values[fc.name] = doc.words[i].text
                break
    return ExtractionResult(doc_id=doc.doc_id, values=values)


# ---------------------------------------------------------------------------
# worker protocol client
# ---------------------------------------------------------------------------

class WorkerClient:
    """Owns one external extractor process and its serial request loop."""

    def __init__(
        self,
        command: str | Sequence[str],
        fields: Sequence[str],
        timeout: float = 30.0,
    ):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.fields = list(fields)
        self.timeout = timeout
        self.mode: str | None = None
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()

    def start(self) -> None:
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        threading.Thread(target=self._pump, daemon=True).start()
        self._send({"protocol_version": PROTOCOL_VERSION, "fields": self.fields})
        ack = self._read()
        if "error" in ack:
            raise WorkerProtocolError(f"worker refused handshake: {ack['error']}")
        if ack.get("protocol_version") != PROTOCOL_VERSION:
            raise WorkerProtocolError(
                f"worker protocol_version {ack.get('protocol_version')!r}, "
                f"expected {PROTOCOL_VERSION}"
            )
        if ack.get("fields") != self.fields:
            raise WorkerProtocolError(f"worker fields {ack.get('fields')!r} do not match")
        if ack.get("mode") not in ("scores", "values"):
            raise WorkerProtocolError(f"worker declared unknown mode {ack.get('mode')!r}")
        self.mode = ack["mode"]

    def _pump(self) -> None:
        assert self._proc is not None and self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _send(self, record: dict) -> None:
        if self._proc is None or self._proc.stdin is None or self._proc.poll() is not None:
            raise WorkerTransportError("worker process is not running")
        try:
            self._proc.stdin.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise WorkerTransportError(f"worker stdin closed: {exc}") from exc

    def _read(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise WorkerTimeoutError(f"no worker response within {self.timeout}s") from None
        if line is None:
            code = self._proc.poll() if self._proc else None
            raise WorkerTransportError(f"worker closed its output (exit code {code})")
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise WorkerProtocolError(f"worker sent invalid JSON: {line[:200]!r}") from exc
        if not isinstance(record, dict):
            raise WorkerProtocolError(f"worker record is not an object: {line[:200]!r}")
        return record

    def request(self, doc: Document) -> dict:
        record = to_record(doc)
        self._send({"doc_id": record["doc_id"], "page": record["page"], "words": record["words"]})
        response = self._read()
        if "error" in response:
            raise WorkerProtocolError(f"worker error: {response['error']}")
        if response.get("doc_id") != doc.doc_id:
            raise WorkerProtocolError(
                f"response doc_id {response.get('doc_id')!r} does not match {doc.doc_id!r}"
            )
        return response

    def close(self) -> None:
        if self._proc is None:
            return
        try:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=1)
        except Exception:
            self._proc.kill()
            self._proc.wait(timeout=5)
        self._proc = None


def external_extract(
    doc: Document,
    client: WorkerClient,
    fields: Sequence[FieldConfig],
    threshold: float = DEFAULT_THRESHOLD,
) -> ExtractionResult:
    """One request/response round trip. Scores-mode responses go through
    :func:`postprocess`; values-mode responses are taken as-is."""
    response = client.request(doc)
    if client.mode == "scores":
        scores = response.get("scores")
        if not isinstance(scores, list):
            raise WorkerProtocolError("scores-mode response is missing 'scores'")
        try:
            return postprocess(scores, doc, fields, threshold)
        except ScoreShapeError as exc:
            raise WorkerProtocolError(str(exc)) from exc
    raw = response.get("values")
    if not isinstance(raw, dict):
        raise WorkerProtocolError("values-mode response is missing 'values'")
    known = {f.name for f in fields}
    values = {}
    for name, value in raw.items():
        if name not in known:
            raise WorkerProtocolError(f"response names unknown field {name!r}")
        if not isinstance(value, str):
            raise WorkerProtocolError(f"value for field {name!r} is not a string")
        values[name] = value
    return ExtractionResult(doc_id=doc.doc_id, values=values)


# ---------------------------------------------------------------------------
# extractor drivers
# ---------------------------------------------------------------------------

class BaselineExtractor:
    def __init__(self, fields: Sequence[FieldConfig], config: BaselineConfig = BaselineConfig()):
        self.fields = list(fields)
        self.config = config

    def extract(self, doc: Document) -> ExtractionResult:
        return baseline_extract(doc, self.fields, self.config)

    def close(self) -> None:
        pass


class TruthExtractor:
    """Returns the annotations as predictions; pins the metric's F1=1 end."""

    def extract(self, doc: Document) -> ExtractionResult:
        return ExtractionResult(
            doc_id=doc.doc_id, values={a.field: a.value_text for a in doc.annotations}
        )

    def close(self) -> None:
        pass


class WorkerExtractor:
    def __init__(
        self,
        command: str | Sequence[str],
        fields: Sequence[FieldConfig],
        threshold: float = DEFAULT_THRESHOLD,
        timeout: float = 30.0,
    ):
        self.fields = list(fields)
        self.threshold = threshold
        self.client = WorkerClient(command, [f.name for f in fields], timeout=timeout)
        self.client.start()

    def extract(self, doc: Document) -> ExtractionResult:
        return external_extract(doc, self.client, self.fields, self.threshold)

    def close(self) -> None:
        self.client.close()


def make_extractor(
    selector: str,
    fields: Sequence[FieldConfig],
    baseline_config: BaselineConfig = BaselineConfig(),
    threshold: float = DEFAULT_THRESHOLD,
    timeout: float = 30.0,
):
    """Build an extractor from a CLI selector: ``baseline``, ``truth``, or
    ``worker:<command line>``."""
    if selector == "baseline":
        return BaselineExtractor(fields, baseline_config)
    if selector == "truth":
        return TruthExtractor()
    if selector.startswith("worker:"):
        return WorkerExtractor(selector[len("worker:"):], fields, threshold, timeout)
    raise ValueError(f"unknown extractor selector {selector!r}")


def run_extractor(docs: Sequence[Document], extractor) -> list[ExtractionResult]:
    """Extract every document, converting worker failures into per-document
    failed results instead of aborting the corpus run."""
    results = []
    for doc in docs:
        try:
            results.append(extractor.extract(doc))
        except WorkerError as exc:
            logger.warning("extractor failed on %s: %s", doc.doc_id, exc)
            results.append(ExtractionResult(doc_id=doc.doc_id, error=str(exc)))
    return results
