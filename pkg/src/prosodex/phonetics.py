"""ARPAbet pronunciations: lexicon parsing, rhyming parts, rhyme equivalence.

The lexicon format is the plain-text CMU dictionary format: one entry per
line (`WORD  PH PH ...`), comment lines starting with ";;;", and alternate
pronunciations written `WORD(1)`, `WORD(2)`, ...

Rhyme is defined as equality of the stress-stripped rhyming parts of the
first pronunciation variants.  The rhyming part of a pronunciation is the
suffix starting at the last vowel carrying primary or secondary stress,
falling back to the last vowel of any stress, and finally to the whole
pronunciation for vowel-free entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ParseError

# The 39 base ARPAbet phones for North American English.
VOWELS = frozenset([
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY",
    "OW", "OY", "UH", "UW",
])
CONSONANTS = frozenset([
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
])
ARPABET = VOWELS | CONSONANTS

_VARIANT_RE = re.compile(r"^(.*)\((\d+)\)$")


@dataclass(frozen=True)
class Phone:
    """A single ARPAbet phone; vowels carry a stress digit (0, 1 or 2)."""

    symbol: str
    stress: Optional[int] = None

    def __post_init__(self):
        if self.symbol not in ARPABET:
            raise ValueError(f"not an ARPAbet phone: {self.symbol!r}")
        if self.is_vowel and self.stress not in (0, 1, 2):
            raise ValueError(f"vowel {self.symbol} requires stress 0, 1 or 2")
        if not self.is_vowel and self.stress is not None:
            raise ValueError(f"consonant {self.symbol} cannot carry stress")

    @property
    def is_vowel(self) -> bool:
        return self.symbol in VOWELS

    @classmethod
    def parse(cls, code: str) -> "Phone":
        """Parse a raw code such as "AE1" or "K"."""
        if code and code[-1].isdigit():
            return cls(code[:-1], int(code[-1]))
        return cls(code, None)

    def __str__(self):
        return self.symbol if self.stress is None else f"{self.symbol}{self.stress}"


class PronDict:
    """Word to pronunciation-variants map with case-insensitive lookup."""

    def __init__(self, entries: dict[str, list[tuple[Phone, ...]]],
                 duplicate_warnings: int = 0):
        self.entries = entries
        self.duplicate_warnings = duplicate_warnings

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def variants(self, word: str) -> list[tuple[Phone, ...]]:
        """All pronunciation variants for ``word``, in lexicon order."""
        return self.entries.get(word.lower(), [])

    def words(self) -> Iterable[str]:
        return self.entries.keys()


def parse_cmudict(stream: Iterable[str]) -> PronDict:
    """Parse a CMU-format lexicon from an iterable of lines.

    Comment lines (";;;") are skipped.  Variant entries `WORD(n)` are
    grouped under the base word and ordered by variant number, the bare
    entry counting as variant 0.  A repeated (word, variant) pair keeps
    the last occurrence and increments the duplicate counter.

    Raises ParseError (with the line number) on malformed phone codes,
    and on an input that yields no entries at all.
    """
    collected: dict[str, dict[int, tuple[Phone, ...]]] = {}
    duplicates = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        fields = line.split()
        head, codes = fields[0], fields[1:]
        if not codes:
            raise ParseError(f"entry {head!r} has no phones", lineno)
        match = _VARIANT_RE.match(head)
        if match:
            word, variant = match.group(1).lower(), int(match.group(2))
        else:
            word, variant = head.lower(), 0
        try:
            phones = tuple(Phone.parse(code) for code in codes)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        slots = collected.setdefault(word, {})
        if variant in slots:
            duplicates += 1
        slots[variant] = phones
    if not collected:
        raise ParseError("empty dictionary")
    entries = {
        word: [slots[v] for v in sorted(slots)]
        for word, slots in collected.items()
    }
    return PronDict(entries, duplicate_warnings=duplicates)


def load_lexicon(path) -> PronDict:
    """Read and parse a lexicon file (UTF-8)."""
    with open(path, encoding="utf-8") as handle:
        return parse_cmudict(handle)


def fixture_lexicon_path():
    """Path of the small lexicon bundled with the package."""
    from importlib.resources import files

    return files("prosodex.data").joinpath("fixture_lexicon.txt")


def load_fixture_lexicon() -> PronDict:
    """Parse the bundled fixture lexicon."""
    text = fixture_lexicon_path().read_text(encoding="utf-8")
    return parse_cmudict(text.splitlines())


def phones_for(prondict: PronDict, token: str) -> Optional[tuple[Phone, ...]]:
    """First pronunciation variant of ``token``, or None if unlisted.

    Punctuation, numbers and out-of-vocabulary words all return None.
    """
    variants = prondict.variants(token)
    return variants[0] if variants else None


def rhyming_part(pron: tuple[Phone, ...]) -> tuple[Phone, ...]:
    """Suffix of ``pron`` that determines what the word rhymes with.

    Starts at the last vowel with stress 1 or 2; if there is none, at the
    last vowel of any stress; vowel-free pronunciations are returned whole.
    """
    if not pron:
        raise ValueError("empty pronunciation")
    last_vowel = None
    for i, phone in enumerate(pron):
        if phone.is_vowel:
            if phone.stress in (1, 2):
                last_vowel = i
            elif last_vowel is None or pron[last_vowel].stress not in (1, 2):
                last_vowel = i
    if last_vowel is None:
        return pron
    return pron[last_vowel:]


def rhyme_key(pron: tuple[Phone, ...]) -> tuple[str, ...]:
    """Stress-stripped rhyming part: the value compared for rhyme equality."""
    return tuple(phone.symbol for phone in rhyming_part(pron))


def rhymes(prondict: PronDict, a: str, b: str) -> bool:
    """True iff both words are listed and their rhyme keys match.

    Uses the first pronunciation variant of each word; stress digits are
    ignored in the comparison, so a word always rhymes with itself.
    """
    pron_a = phones_for(prondict, a)
    pron_b = phones_for(prondict, b)
    if pron_a is None or pron_b is None:
        return False
    return rhyme_key(pron_a) == rhyme_key(pron_b)
