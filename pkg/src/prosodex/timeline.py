"""Token streams, time-unit layout, and rhyme-signal sequences.

A document is tokenized into words, numbers, punctuation and line breaks,
then laid out on an integer time axis: one unit per phone for words found
in the lexicon, one unit for unknown words and numbers, fixed unit counts
for punctuation and line breaks, and one gap unit between every pair of
consecutive tokens.

A rhyme signal is placed at the time unit of the last phone of each rhyme
word.  Rhyme words are found by anchoring on the words that immediately
precede rhythm punctuation (".", ":", ";", "!", "?") and collecting every
word in the document that shares an anchor's rhyming part.  Signals that
share a rhyming part share a rhyme class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .phonetics import Phone, PronDict, phones_for, rhyme_key

WORD = "word"
PUNCTUATION = "punctuation"
LINE_BREAK = "line_break"
NUMBER = "number"

RHYTHM_PUNCTUATION = frozenset({".", ":", ";", "!", "?"})

_APOSTROPHE = "'"


@dataclass(frozen=True)
class Token:
    kind: str
    surface: str
    index: int


def tokenize(text: str) -> list[Token]:
    """Deterministic split of ``text`` into tokens.

    Line breaks ("\\n") are tokens; maximal runs of letters/apostrophes are
    word tokens; maximal digit runs are number tokens; "--" is a single
    token; any other non-space character is a one-character punctuation
    token.  Remaining whitespace separates tokens but emits none.
    """
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token(LINE_BREAK, "\n", len(tokens)))
            i += 1
        elif ch.isspace():
            i += 1
        elif ch.isalpha() or ch == _APOSTROPHE:
            j = i + 1
            while j < n and (text[j].isalpha() or text[j] == _APOSTROPHE):
                j += 1
            tokens.append(Token(WORD, text[i:j], len(tokens)))
            i = j
        elif ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token(NUMBER, text[i:j], len(tokens)))
            i = j
        elif ch == "-" and i + 1 < n and text[i + 1] == "-":
            tokens.append(Token(PUNCTUATION, "--", len(tokens)))
            i += 2
        else:
            tokens.append(Token(PUNCTUATION, ch, len(tokens)))
            i += 1
    return tokens


_STANDARD_PUNCT_UNITS = {
    ",": 3,
    ".": 4,
    ";": 4,
    ":": 4,
    "!": 5,
    "?": 5,
    "-": 5,
    "--": 5,
}


@dataclass(frozen=True)
class DurationTable:
    """Time units occupied by each token kind.

    Punctuation symbols not listed in ``punct_units`` fall back to
    ``default_punct_units``; a word with a known pronunciation occupies one
    unit per phone regardless of this table.
    """

    punct_units: dict = field(default_factory=lambda: dict(_STANDARD_PUNCT_UNITS))
    line_break_units: int = 1
    unknown_word_units: int = 1
    gap_units: int = 1
    default_punct_units: int = 1

    @classmethod
    def standard(cls, overrides: Optional[dict] = None) -> "DurationTable":
        """The default table, optionally with per-symbol overrides."""
        units = dict(_STANDARD_PUNCT_UNITS)
        if overrides:
            units.update(overrides)
        return cls(punct_units=units)

    def punct_duration(self, surface: str) -> int:
        return self.punct_units.get(surface, self.default_punct_units)


@dataclass(frozen=True)
class TokenSpan:
    """Placement of one token on the time axis (units start..end inclusive)."""

    token_index: int
    start: int
    end: int
    phones: Optional[tuple[Phone, ...]] = None


@dataclass
class Timeline:
    spans: list[TokenSpan]
    last_phone_time: dict  # word token index -> time unit of its final phone
    total_duration: int


def build_timeline(tokens: list[Token], prondict: PronDict,
                   durations: Optional[DurationTable] = None) -> Timeline:
    """Lay tokens out left to right on the integer time axis.

    A word token with a known pronunciation occupies one unit per phone of
    its first variant; unknown words and numbers occupy one unit; the
    duration table governs punctuation and line breaks.  One gap unit
    separates every pair of consecutive tokens.
    """
    if durations is None:
        durations = DurationTable()
    spans = []
    last_phone_time = {}
    clock = 0
    for token in tokens:
        if token.index > 0:
            clock += durations.gap_units
        phones = None
        if token.kind == WORD:
            phones = phones_for(prondict, token.surface)
            units = len(phones) if phones else durations.unknown_word_units
        elif token.kind == NUMBER:
            units = durations.unknown_word_units
        elif token.kind == LINE_BREAK:
            units = durations.line_break_units
        else:
            units = durations.punct_duration(token.surface)
        start = clock
        end = clock + units - 1
        spans.append(TokenSpan(token.index, start, end, phones))
        if token.kind == WORD:
            last_phone_time[token.index] = end
        clock = end + 1
    return Timeline(spans=spans, last_phone_time=last_phone_time,
                    total_duration=clock)


@dataclass(frozen=True)
class Signal:
    """One rhyme event: where it falls, which rhyme class, which token."""

    time: int
    rhyme_class: int
    token_index: int


@dataclass
class SignalSequence:
    signals: list[Signal]
    total_duration: int

    def __len__(self):
        return len(self.signals)

    @property
    def class_count(self) -> int:
        return len({s.rhyme_class for s in self.signals})

    def times(self) -> list[int]:
        return [s.time for s in self.signals]


def find_rhyme_signals(tokens: list[Token], timeline: Timeline,
                       prondict: PronDict,
                       punct: frozenset = RHYTHM_PUNCTUATION) -> SignalSequence:
    """Extract the rhyme-signal sequence of a document.

    Anchors are word tokens whose next token, skipping line breaks, is a
    rhythm-punctuation token.  Every word sharing an anchor's rhyme key is
    a rhyme word and carries one signal at its last-phone time; rhyme
    class ids are assigned in order of first occurrence in the token
    stream.  Words without a lexicon entry never anchor nor rhyme.
    """
    keys = {}
    for token in tokens:
        if token.kind == WORD:
            pron = phones_for(prondict, token.surface)
            if pron:
                keys[token.index] = rhyme_key(pron)

    anchor_keys = set()
    for token in tokens:
        if token.kind != WORD or token.index not in keys:
            continue
        for nxt in tokens[token.index + 1:]:
            if nxt.kind == LINE_BREAK:
                continue
            if nxt.kind == PUNCTUATION and nxt.surface in punct:
                anchor_keys.add(keys[token.index])
            break

    signals = []
    class_ids = {}
    for token in tokens:
        key = keys.get(token.index)
        if key is None or key not in anchor_keys:
            continue
        if key not in class_ids:
            class_ids[key] = len(class_ids)
        signals.append(Signal(time=timeline.last_phone_time[token.index],
                              rhyme_class=class_ids[key],
                              token_index=token.index))
    return SignalSequence(signals=signals, total_duration=timeline.total_duration)


def timeline_dump(tokens: list[Token], timeline: Timeline,
                  signals: SignalSequence) -> dict:
    """JSON-ready debug view of a document's timeline and signals."""
    return {
        "total_duration": timeline.total_duration,
        "tokens": [
            {
                "index": token.index,
                "kind": token.kind,
                "surface": token.surface,
                "start": span.start,
                "end": span.end,
            }
            for token, span in zip(tokens, timeline.spans)
        ],
        "signals": [
            {"time": s.time, "class": s.rhyme_class, "token_index": s.token_index}
            for s in signals.signals
        ],
    }
