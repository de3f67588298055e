"""Synthetic single-page invoice and receipt corpora.

These fixtures stand in for private form datasets: invoices carry the seven
field annotations used in the headline experiments, receipts carry the four
receipt fields with keyless company/address lines at the very top of the
page. Layouts are template-randomized but designed so the shipped baseline
extractor solves the clean corpora, which is what makes attack-induced F1
drops interpretable.
"""

from __future__ import annotations

import random

from . import typedgen
from .docmodel import BoundingBox, Document, FieldAnnotation, Word
from .extract import FieldConfig
from .typedgen import derive_rng

INVOICE_PAGE = (612.0, 792.0)
RECEIPT_PAGE = (400.0, 800.0)

INVOICE_KEYS: dict[str, tuple[str, ...]] = {
    "invoice_number": ("Invoice No.", "Invoice Number:"),
    "purchase_order": ("PO Number:", "Purchase Order:"),
    "invoice_date": ("Invoice Date:",),
    "due_date": ("Due Date:",),
    "amount_due": ("Amount Due:", "Balance Due:"),
    "total_amount": ("Total Amount:",),
    "total_tax": ("Sales Tax:", "Total Tax:"),
}

INVOICE_FIELD_TYPES = {
    "invoice_number": "number",
    "purchase_order": "number",
    "invoice_date": "date",
    "due_date": "date",
    "amount_due": "money",
    "total_amount": "money",
    "total_tax": "money",
}

_COMPANY_FIRST = ("Acme", "Apex", "Borealis", "Cascade", "Meridian", "Pioneer", "Summit", "Vertex")
_COMPANY_SECOND = ("Trading", "Supplies", "Logistics", "Consulting", "Hardware", "Catering")
_COMPANY_SUFFIX = ("Inc", "LLC", "Ltd", "Co")
_STREET_NAMES = ("Maple", "Oak", "Cedar", "Elm", "Birch", "Walnut", "Juniper")
_STREET_SUFFIX = ("St", "Ave", "Rd", "Blvd")
_CITIES = ("Springfield", "Riverton", "Fairview", "Lakewood", "Georgetown", "Ashland")
_STATES = ("CA", "IL", "NY", "TX", "WA", "OR")
_CUSTOMERS = ("Harbor", "Crescent", "Keystone", "Lantern", "Orchard", "Quarry")


def invoice_field_configs() -> list[FieldConfig]:
    return [
        FieldConfig(name, INVOICE_FIELD_TYPES[name], multi_word=False, key_lexicon=keys)
        for name, keys in INVOICE_KEYS.items()
    ]


def receipt_field_configs() -> list[FieldConfig]:
    return [
        FieldConfig("company", "free_text", multi_word=True),
        FieldConfig("address", "free_text", multi_word=True),
        FieldConfig("date", "date", key_lexicon=("Date:",)),
        FieldConfig("total", "money", key_lexicon=("Total:",)),
    ]


def field_configs(template: str) -> list[FieldConfig]:
    if template == "invoice":
        return invoice_field_configs()
    if template == "receipt":
        return receipt_field_configs()
    raise ValueError(f"unknown template {template!r}; expected 'invoice' or 'receipt'")


class _PageBuilder:
    def __init__(self, char_width: float, word_height: float, word_gap: float):
        self.char_width = char_width
        self.word_height = word_height
        self.word_gap = word_gap
        self.words: list[Word] = []
        self.annotations: list[FieldAnnotation] = []

    def line(self, texts: list[str], x: float, y: float) -> list[int]:
        indices = []
        for text in texts:
            w = len(text) * self.char_width
            self.words.append(Word(text, BoundingBox(x, y, x + w, y + self.word_height)))
            indices.append(len(self.words) - 1)
            x += w + self.word_gap
        return indices

    def annotate(self, field: str, data_type: str, key: list[int], value: list[int]) -> None:
        self.annotations.append(
            FieldAnnotation(
                field=field,
                data_type=data_type,
                key_indices=tuple(key),
                value_indices=tuple(value),
                value_text=" ".join(self.words[i].text for i in value),
            )
        )


def _company_words(rng: random.Random) -> list[str]:
    words = [rng.choice(_COMPANY_FIRST), rng.choice(_COMPANY_SECOND)]
    if rng.random() < 0.5:
        words.append(rng.choice(_COMPANY_SUFFIX))
    return words


def _street_words(rng: random.Random) -> list[str]:
    return [
        str(rng.randrange(100, 9900)),
        rng.choice(_STREET_NAMES),
        rng.choice(_STREET_SUFFIX),
    ]


def _city_words(rng: random.Random) -> list[str]:
    return [rng.choice(_CITIES), rng.choice(_STATES), f"{rng.randrange(10000, 99999)}"]


def _typed_value(data_type: str, rng: random.Random) -> str:
    if data_type == "date":
        return typedgen.gen_date(rng)
    if data_type == "number":
        return typedgen.gen_number(rng)
    return typedgen.gen_money(rng)


def synth_invoice(doc_id: str, rng: random.Random) -> Document:
    width, height = INVOICE_PAGE
    b = _PageBuilder(char_width=6.2, word_height=10.0, word_gap=5.0)
    x0 = 36.0 + rng.uniform(0.0, 30.0)
    y = 36.0 + rng.uniform(0.0, 10.0)

    def next_y() -> float:
        nonlocal y
        y += 16.0 + rng.uniform(0.0, 6.0)
        return y

    b.line(_company_words(rng), x0, y)
    b.line(_street_words(rng), x0, next_y())
    b.line(_city_words(rng), x0, next_y())
    b.line(["INVOICE"], x0, next_y())
    b.line(["Bill", "To:", rng.choice(_CUSTOMERS), rng.choice(_COMPANY_SUFFIX)], x0, next_y())

    field_names = list(INVOICE_KEYS)
    rng.shuffle(field_names)
    for name in field_names:
        key_text = rng.choice(INVOICE_KEYS[name])
        value_text = _typed_value(INVOICE_FIELD_TYPES[name], rng)
        indices = b.line([*key_text.split(), value_text], x0 + rng.uniform(0.0, 12.0), next_y())
        b.annotate(name, INVOICE_FIELD_TYPES[name], indices[:-1], indices[-1:])

    b.line(["Description", "Qty", "Price"], x0, next_y())
    for _ in range(rng.randrange(1, 4)):
        item = rng.choice((["Office", "Chairs"], ["Copier", "Paper"], ["Toner", "Kits"],
                           ["Desk", "Lamps"], ["Filing", "Boxes"]))
        price = f"{rng.randrange(10, 500)}.{rng.randrange(100):02d}"
        b.line([*item, str(rng.randrange(1, 9)), price], x0, next_y())
    b.line(["Thank", "you", "for", "your", "business"], x0, next_y())

    return Document(doc_id, width, height, b.words, b.annotations)


def synth_receipt(doc_id: str, rng: random.Random) -> Document:
    width, height = RECEIPT_PAGE
    b = _PageBuilder(char_width=7.0, word_height=10.0, word_gap=6.0)
    x0 = 30.0 + rng.uniform(0.0, 14.0)
    y = 30.0 + rng.uniform(0.0, 8.0)

    def next_y() -> float:
        nonlocal y
        y += 18.0 + rng.uniform(0.0, 5.0)
        return y

    company = b.line(_company_words(rng), x0, y)
    street = b.line(_street_words(rng), x0, next_y())
    city = b.line(_city_words(rng), x0, next_y())
    b.annotate("company", "free_text", [], company)
    b.annotate("address", "free_text", [], street + city)

    for _ in range(rng.randrange(2, 6)):
        item = rng.choice(("Coffee", "Bagel", "Sandwich", "Salad", "Juice", "Muffin"))
        price = f"{rng.randrange(1, 40)}.{rng.randrange(100):02d}"
        b.line([item, str(rng.randrange(1, 4)), price], x0, next_y())

    date_line = b.line(["Date:", typedgen.gen_date(rng)], x0, next_y())
    b.annotate("date", "date", date_line[:1], date_line[1:])
    total_line = b.line(["Total:", typedgen.gen_money(rng)], x0, next_y())
    b.annotate("total", "money", total_line[:1], total_line[1:])
    b.line(["Thank", "You"], x0, next_y())

    return Document(doc_id, width, height, b.words, b.annotations)


def synth_corpus(template: str, n: int, seed: int) -> list[Document]:
    """Deterministic corpus of n synthetic forms; per-document substreams
    keep individual documents stable under corpus resizing."""
    make = {"invoice": synth_invoice, "receipt": synth_receipt}.get(template)
    if make is None:
        raise ValueError(f"unknown template {template!r}; expected 'invoice' or 'receipt'")
    return [
        make(f"{template}-{i:05d}", derive_rng(seed, "synth", template, i)) for i in range(n)
    ]
