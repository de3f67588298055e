"""Scoring models for the reference worker.

The default lexical scorer has no learned weights: it scores words from
key proximity and data-type pattern features, which is enough to exercise
the scores-mode protocol and the harness's post-processing end to end. An
optional transformer-backed scorer can wrap a user-supplied
token-classification checkpoint; it needs torch/transformers and is not
required by any test.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

BACKGROUND_SCORE = 0.6
PRIMARY_SCORE = 0.9
RUNNER_UP_SCORE = 0.3

DATE_RE = re.compile(r"^(?:\d{2}/\d{2}/\d{2}|\d{2}-\d{2}-\d{2}|\d{2}/[A-Za-z]{3,9}/\d{2})$")
NUMBER_RE = re.compile(r"^\d{3,}$")
MONEY_RE = re.compile(r"^\$?\d{1,3}(?:,\d{3})*\.\d{2}$")

_PATTERNS = {"date": DATE_RE, "number": NUMBER_RE, "money": MONEY_RE}
_PUNCT = ".:,;#()"


@dataclass(frozen=True)
class FieldSpec:
    name: str
    data_type: str
    keys: tuple[str, ...] = ()
    multi_word: bool = False


@dataclass(frozen=True)
class ModelConfig:
    fields: tuple[FieldSpec, ...]
    top_lines: int = 3
    radius_x_frac: float = 0.35
    radius_y_frac: float = 0.12

    @property
    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]


INVOICE_MODEL = ModelConfig(
    fields=(
        FieldSpec("invoice_number", "number", ("Invoice No.", "Invoice Number:")),
        FieldSpec("purchase_order", "number", ("PO Number:", "Purchase Order:")),
        FieldSpec("invoice_date", "date", ("Invoice Date:",)),
        FieldSpec("due_date", "date", ("Due Date:",)),
        FieldSpec("amount_due", "money", ("Amount Due:", "Balance Due:")),
        FieldSpec("total_amount", "money", ("Total Amount:",)),
        FieldSpec("total_tax", "money", ("Sales Tax:", "Total Tax:")),
    )
)

RECEIPT_MODEL = ModelConfig(
    fields=(
        FieldSpec("company", "free_text", (), multi_word=True),
        FieldSpec("address", "free_text", (), multi_word=True),
        FieldSpec("date", "date", ("Date:",)),
        FieldSpec("total", "money", ("Total:",)),
    )
)


def load_model_config(selector: str) -> ModelConfig:
    """Builtin name (invoice, receipt) or path to a JSON model config."""
    if selector == "invoice":
        return INVOICE_MODEL
    if selector == "receipt":
        return RECEIPT_MODEL
    obj = json.loads(Path(selector).read_text(encoding="utf-8"))
    fields = tuple(
        FieldSpec(
            name=f["name"],
            data_type=f["data_type"],
            keys=tuple(f.get("keys", ())),
            multi_word=bool(f.get("multi_word", False)),
        )
        for f in obj["fields"]
    )
    return ModelConfig(
        fields=fields,
        top_lines=int(obj.get("top_lines", 3)),
        radius_x_frac=float(obj.get("radius_x_frac", 0.35)),
        radius_y_frac=float(obj.get("radius_y_frac", 0.12)),
    )


def _norm(token: str) -> str:
    return token.strip(_PUNCT).lower()


def _type_match(text: str, data_type: str) -> bool:
    pattern = _PATTERNS.get(data_type)
    return True if pattern is None else bool(pattern.match(text))


def _lines(words: list[dict]) -> list[list[int]]:
    """Indices grouped into lines by vertical overlap, top to bottom."""
    order = sorted(range(len(words)), key=lambda i: (words[i]["box"][1] + words[i]["box"][3], i))
    lines: list[tuple[list[int], list[float]]] = []
    for i in order:
        y1, y2 = words[i]["box"][1], words[i]["box"][3]
        for members, span in lines:
            if min(span[1], y2) - max(span[0], y1) > 0.0:
                members.append(i)
                span[0] = min(span[0], y1)
                span[1] = max(span[1], y2)
                break
        else:
            lines.append(([i], [y1, y2]))
    lines.sort(key=lambda entry: entry[1][0])
    return [members for members, _ in lines]


def _find_key(words: list[dict], phrases: tuple[str, ...]) -> list[int] | None:
    tokens = [_norm(w["text"]) for w in words]
    for phrase in phrases:
        want = [_norm(t) for t in phrase.split()]
        for start in range(len(tokens) - len(want) + 1):
            if tokens[start:start + len(want)] == want:
                return list(range(start, start + len(want)))
    return None


def _gap(a: list[float], b: list[float]) -> float:
    dx = max(0.0, max(a[0], b[0]) - min(a[2], b[2]))
    dy = max(0.0, max(a[1], b[1]) - min(a[3], b[3]))
    return (dx * dx + dy * dy) ** 0.5


class LexicalScorer:
    """Key-proximity and data-type scorer producing N x (M+1) matrices.

    Words start as background; for each keyed field the nearest
    type-matching word right of or below the key gets the primary score
    (runners-up get a sub-threshold score). Keyless free-text fields score
    the top page lines in field order. Scores feed the harness's argmax +
    threshold post-processing, so exactly the boosted words survive.
    """

    def __init__(self, config: ModelConfig):
        self.config = config

    def score(self, request: dict) -> list[list[float]]:
        words = request["words"]
        m = len(self.config.fields)
        rows = [[0.0] * m + [BACKGROUND_SCORE] for _ in words]
        page = request["page"]
        radius_x = self.config.radius_x_frac * page["width"]
        radius_y = self.config.radius_y_frac * page["height"]
        lines = _lines(words)
        top = lines[: self.config.top_lines]

        keyless_free = [
            c for c, f in enumerate(self.config.fields)
            if not f.keys and f.data_type == "free_text"
        ]
        for slot, c in enumerate(keyless_free):
            if slot >= len(top):
                break
            last = slot == len(keyless_free) - 1
            chosen = (
                [i for line in top[slot:] for i in line]
                if last and self.config.fields[c].multi_word
                else top[slot]
            )
            for i in chosen:
                rows[i][c] = PRIMARY_SCORE

        for c, field in enumerate(self.config.fields):
            if not field.keys:
                if c in keyless_free:
                    continue
                for line in top:  # keyless typed field: first match in top lines
                    hit = next(
                        (i for i in line if _type_match(words[i]["text"], field.data_type)),
                        None,
                    )
                    if hit is not None:
                        rows[hit][c] = PRIMARY_SCORE
                        break
                continue
            span = _find_key(words, field.keys)
            if span is None:
                continue
            kb = [
                min(words[i]["box"][0] for i in span),
                min(words[i]["box"][1] for i in span),
                max(words[i]["box"][2] for i in span),
                max(words[i]["box"][3] for i in span),
            ]
            candidates = []
            for i, w in enumerate(words):
                if i in span or not _type_match(w["text"], field.data_type):
                    continue
                b = w["box"]
                right = (
                    min(kb[3], b[3]) - max(kb[1], b[1]) > 0.0
                    and b[0] >= kb[0]
                    and b[0] - kb[2] <= radius_x
                )
                below = (
                    b[1] >= kb[1]
                    and b[1] - kb[3] <= radius_y
                    and b[2] >= kb[0] - radius_x / 2
                    and b[0] <= kb[2] + radius_x
                )
                if right or below:
                    candidates.append((_gap(kb, b), i))
            candidates.sort()
            if candidates:
                rows[candidates[0][1]][c] = PRIMARY_SCORE
                for _, i in candidates[1:3]:
                    rows[i][c] = max(rows[i][c], RUNNER_UP_SCORE)
        return rows

    def values(self, request: dict) -> dict[str, str]:
        """Values mode: decide fields directly from the score matrix."""
        words = request["words"]
        rows = self.score(request)
        out: dict[str, str] = {}
        for c, field in enumerate(self.config.fields):
            picked = [
                i for i, row in enumerate(rows)
                if row[c] >= PRIMARY_SCORE and row[c] == max(row)
            ]
            if not picked:
                continue
            if field.multi_word:
                out[field.name] = " ".join(words[i]["text"] for i in sorted(picked))
            else:
                out[field.name] = words[picked[0]]["text"]
        return out


class TransformerScorer:
    """Optional wrapper over a HuggingFace token-classification checkpoint.

    The checkpoint's id2label must name every handshake field plus
    ``background``. Requires the ``transformer`` extra (torch +
    transformers); kept out of the default path so the worker stays
    dependency-light.
    """

    def __init__(self, checkpoint: str, config: ModelConfig):
        try:
            import torch  # noqa: F401
            from transformers import AutoModelForTokenClassification, AutoTokenizer
        except ImportError as exc:
            raise RuntimeError(
                "transformer model requires the 'transformer' extra: "
                "pip install fieldworker[transformer]"
            ) from exc
        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self.model = AutoModelForTokenClassification.from_pretrained(checkpoint)
        self.model.eval()
        id2label = {int(k): v for k, v in self.model.config.id2label.items()}
        wanted = self.config.field_names + ["background"]
        self.label_order = []
        for name in wanted:
            matches = [i for i, label in id2label.items() if label == name]
            if not matches:
                raise RuntimeError(f"checkpoint lacks a {name!r} label")
            self.label_order.append(matches[0])

    def score(self, request: dict) -> list[list[float]]:
        import torch

        texts = [w["text"] for w in request["words"]]
        if not texts:
            return []
        enc = self.tokenizer(
            texts, is_split_into_words=True, return_tensors="pt", truncation=True
        )
        with torch.no_grad():
            logits = self.model(**enc).logits[0]
        probs = torch.softmax(logits, dim=-1)
        word_ids = enc.word_ids(0)
        rows = [[0.0] * len(self.label_order) for _ in texts]
        seen: set[int] = set()
        for pos, wid in enumerate(word_ids):
            if wid is None or wid in seen:
                continue
            seen.add(wid)
            rows[wid] = [float(probs[pos][i]) for i in self.label_order]
        for wid in range(len(texts)):  # truncated words stay background
            if wid not in seen:
                rows[wid][-1] = 1.0
        return rows

    def values(self, request: dict) -> dict[str, str]:
        raise RuntimeError("transformer model serves scores mode only")


def build_model(selector: str):
    """``invoice`` | ``receipt`` | path.json | ``hf:<checkpoint>[:config]``."""
    if selector.startswith("hf:"):
        rest = selector[3:]
        checkpoint, _, config_ref = rest.partition(":")
        config = load_model_config(config_ref) if config_ref else INVOICE_MODEL
        return TransformerScorer(checkpoint, config)
    return LexicalScorer(load_model_config(selector))
