"""Seedable generators for typed fake values, character typos, and synonyms.

Everything here is a pure function of its inputs plus an explicit
``random.Random`` instance, so corpus-scale runs stay reproducible and
order-independent (see :func:`derive_rng`).
"""

from __future__ import annotations

import calendar
import hashlib
import random
from dataclasses import dataclass
from pathlib import Path

DATA_TYPES = ("date", "number", "money", "free_text")

DATE_FORMATS = ("mm/dd/yy", "yy-mm-dd", "dd/month/yy", "dd/mon/yy")
DATE_YEAR_RANGE = (2001, 2021)  # inclusive

NUMBER_LENGTH_RANGE = (3, 12)  # inclusive
MONEY_AMOUNT_RANGE = (1, 10_000_000)  # inclusive, in cents
DOLLAR_SIGN_PROB = 0.5

MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

TYPO_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789"

_KEYBOARD_ROWS = ("1234567890", "qwertyuiop", "asdfghjkl", "zxcvbnm")


def _build_keyboard_neighbors() -> dict[str, str]:
    """Adjacency on a QWERTY layout: same-row neighbors plus the nearest
    columns of the rows above and below."""
    table: dict[str, str] = {}
    for r, row in enumerate(_KEYBOARD_ROWS):
        for c, ch in enumerate(row):
            near: list[str] = []
            if c > 0:
                near.append(row[c - 1])
            if c + 1 < len(row):
                near.append(row[c + 1])
            for r2 in (r - 1, r + 1):
                if 0 <= r2 < len(_KEYBOARD_ROWS):
                    other = _KEYBOARD_ROWS[r2]
                    for c2 in (c - 1, c, c + 1):
                        if 0 <= c2 < len(other):
                            near.append(other[c2])
            table[ch] = "".join(dict.fromkeys(near))
    return table


KEYBOARD_NEIGHBORS = _build_keyboard_neighbors()

# Generic business-form vocabulary used for free-text value substitution.
_FREE_TEXT_WORDS = (
    "acme", "global", "united", "national", "pacific", "summit", "prime",
    "trading", "supply", "services", "solutions", "systems", "industries",
    "holdings", "partners", "group", "logistics", "consulting", "imports",
    "office", "center", "depot", "market", "store", "plaza", "corner",
    "north", "south", "east", "west", "central", "main", "park", "lake",
    "street", "avenue", "road", "drive", "boulevard", "suite", "floor",
)


class LexiconError(ValueError):
    """Raised when a synonym lexicon file cannot be parsed."""


def derive_seed(*parts: object) -> int:
    """Mix arbitrary parts (seeds, names, doc ids) into a stable 64-bit seed.

    Uses blake2b so the result is identical across processes and platforms,
    which makes per-document substreams independent of corpus order.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def derive_rng(*parts: object) -> random.Random:
    """Substream generator for the given parts; see :func:`derive_seed`."""
    return random.Random(derive_seed(*parts))


def gen_date(rng: random.Random) -> str:
    """Random calendar-valid date in 2001-2021, in one of four formats.

    Formats (uniform): mm/dd/yy, yy-mm-dd, dd/month/yy (full English month
    name), dd/mon/yy (3-letter abbreviation). Numeric parts zero-padded.
    """
    year = rng.randrange(DATE_YEAR_RANGE[0], DATE_YEAR_RANGE[1] + 1)
    month = rng.randrange(1, 13)
    day = rng.randrange(1, calendar.monthrange(year, month)[1] + 1)
    fmt = rng.randrange(len(DATE_FORMATS))
    yy = year % 100
    if fmt == 0:
        return f"{month:02d}/{day:02d}/{yy:02d}"
    if fmt == 1:
        return f"{yy:02d}-{month:02d}-{day:02d}"
    name = MONTH_NAMES[month - 1]
    if fmt == 2:
        return f"{day:02d}/{name}/{yy:02d}"
    return f"{day:02d}/{name[:3]}/{yy:02d}"


def gen_number(rng: random.Random) -> str:
    """Digit string with length uniform in [3, 12]; no leading zero."""
    length = rng.randrange(NUMBER_LENGTH_RANGE[0], NUMBER_LENGTH_RANGE[1] + 1)
    digits = [str(rng.randrange(1, 10))]
    digits.extend(str(rng.randrange(10)) for _ in range(length - 1))
    return "".join(digits)


def format_money(cents: int, dollar_sign: bool = False) -> str:
    """Render an integer amount of cents as e.g. ``1,234.56`` / ``$0.05``."""
    if cents < 0:
        raise ValueError("money amount must be non-negative")
    units, rem = divmod(cents, 100)
    text = f"{units:,}.{rem:02d}"
    return "$" + text if dollar_sign else text


def parse_money(text: str) -> int | None:
    """Inverse of :func:`format_money`: money string -> cents, else None."""
    raw = text.lstrip("$").replace(",", "")
    if "." in raw:
        whole, _, frac = raw.partition(".")
        if len(frac) != 2 or not frac.isdigit() or not (whole.isdigit() or whole == ""):
            return None
        return int(whole or "0") * 100 + int(frac)
    if raw.isdigit():
        return int(raw) * 100
    return None


def gen_money(rng: random.Random, dollar_prob: float = DOLLAR_SIGN_PROB) -> str:
    """Random money string: amount uniform in [1, 10,000,000] cents, decimal
    point before the last two digits, commas every third integer digit, and
    a ``$`` prefix with probability ``dollar_prob``."""
    cents = rng.randrange(MONEY_AMOUNT_RANGE[0], MONEY_AMOUNT_RANGE[1] + 1)
    return format_money(cents, dollar_sign=rng.random() < dollar_prob)


def apply_typo(word: str, rng: random.Random) -> str:
    """Apply exactly one character-level edit: swap adjacent characters,
    delete, insert, or replace one character.

    Replacement prefers a keyboard-adjacent character when the original is
    on the embedded QWERTY table, otherwise draws from ``TYPO_CHARS``. The
    result always differs from the input; single-character words never swap
    or delete to empty.
    """
    if not word:
        raise ValueError("cannot apply a typo to an empty word")
    kinds = []
    if len(word) >= 2:
        if any(word[i] != word[i + 1] for i in range(len(word) - 1)):
            kinds.append("swap")
        kinds.append("delete")
    kinds.extend(("insert", "replace"))
    kind = rng.choice(kinds)

    if kind == "swap":
        spots = [i for i in range(len(word) - 1) if word[i] != word[i + 1]]
        i = rng.choice(spots)
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    if kind == "delete":
        i = rng.randrange(len(word))
        return word[:i] + word[i + 1:]
    if kind == "insert":
        i = rng.randrange(len(word) + 1)
        return word[:i] + rng.choice(TYPO_CHARS) + word[i:]
    i = rng.randrange(len(word))
    original = word[i]
    near = KEYBOARD_NEIGHBORS.get(original.lower())
    if near:
        ch = rng.choice(near)
    else:
        ch = rng.choice([c for c in TYPO_CHARS if c != original])
    return word[:i] + ch + word[i + 1:]


@dataclass(frozen=True)
class SynonymLexicon:
    """Lowercase word -> candidate synonyms, loaded from a plain text file.

    File format: UTF-8 lines of ``word<TAB>syn1,syn2,...``; blank lines and
    ``#`` comments allowed.
    """

    entries: dict[str, tuple[str, ...]]

    @classmethod
    def from_file(cls, path: str | Path) -> "SynonymLexicon":
        entries: dict[str, tuple[str, ...]] = {}
        for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise LexiconError(f"{path}:{lineno}: expected 'word<TAB>syn1,syn2,...'")
            word, _, rest = line.partition("\t")
            syns = tuple(s.strip().lower() for s in rest.split(",") if s.strip())
            if not word.strip() or not syns:
                raise LexiconError(f"{path}:{lineno}: empty word or synonym list")
            entries[word.strip().lower()] = syns
        return cls(entries)

    @classmethod
    def from_dict(cls, mapping: dict[str, list[str] | tuple[str, ...]]) -> "SynonymLexicon":
        return cls({k.lower(): tuple(v) for k, v in mapping.items()})

    def lookup(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word.lower(), ())

    def __len__(self) -> int:
        return len(self.entries)


def default_lexicon() -> SynonymLexicon:
    """The small hand-checked lexicon shipped with the package."""
    from importlib.resources import files

    return SynonymLexicon.from_file(files("formattack").joinpath("data/synonyms.txt"))  # type: ignore[arg-type]


def synonym(word: str, lexicon: SynonymLexicon, rng: random.Random) -> str | None:
    """Pick a synonym for ``word`` (capitalization pattern preserved), or
    None when the lexicon has no entry and the caller should keep the word."""
    options = lexicon.lookup(word)
    if not options:
        return None
    choice = rng.choice(options)
    if word.isupper() and len(word) > 1:
        return choice.upper()
    if word[:1].isupper():
        return choice.capitalize()
    return choice


def gen_words(rng: random.Random, count: int) -> str:
    """Title-cased phrase of ``count`` generic business words, used to
    substitute free-text values while keeping the token count."""
    if count < 1:
        raise ValueError("count must be >= 1")
    picks = [rng.choice(_FREE_TEXT_WORDS).capitalize() for _ in range(count)]
    return " ".join(picks)
