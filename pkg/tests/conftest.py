from __future__ import annotations

import random

import pytest

from helpers import make_doc, random_document


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def invoice_like():
    """Two keyed fields plus background; used across transform tests."""
    return make_doc(
        texts=["INVOICE", "Invoice", "No.", "12345", "Date:", "03/07/14",
               "Total:", "$1,234.56", "Thank", "you"],
        boxes=[
            (40, 20, 110, 32),
            (40, 50, 90, 62), (95, 50, 120, 62), (125, 50, 165, 62),
            (40, 80, 80, 92), (85, 80, 145, 92),
            (40, 110, 85, 122), (90, 110, 160, 122),
            (40, 900, 80, 912), (85, 900, 110, 912),
        ],
        annotations=[
            {"field": "invoice_number", "data_type": "number", "key": [1, 2], "value": [3]},
            {"field": "invoice_date", "data_type": "date", "key": [4], "value": [5]},
            {"field": "total_amount", "data_type": "money", "key": [6], "value": [7]},
        ],
    )


@pytest.fixture
def random_docs():
    r = random.Random(99)
    return [random_document(r, doc_id=f"rand-{i}") for i in range(60)]
