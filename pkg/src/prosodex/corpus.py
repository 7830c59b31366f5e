"""Document collections: loading, shuffling, statistics, synthesis.

Documents carry preprocessed text in which every run of two or more line
breaks is collapsed to one.  A corpus lives on disk as ``poetry/*.txt``
and ``prose/*.txt`` under one root, optionally described by a
``manifest.json`` array of {id, label, path}.

The synthetic generator produces rhyme-heavy short-line documents and
rhyme-free long-sentence documents from the same lexicon, deterministic
in the seed.  The statistics pass summarizes per-document counts into
histograms and fits a two-parameter Weibull to the rhyme-count samples.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean

import numpy as np

from .errors import ConfigError, DomainError, EmptyDocumentError, FitError, ParseError
from .phonetics import PronDict, phones_for, rhyme_key
from .timeline import (
    LINE_BREAK,
    NUMBER,
    PUNCTUATION,
    RHYTHM_PUNCTUATION,
    WORD,
    Token,
    build_timeline,
    find_rhyme_signals,
    tokenize,
)

POETRY = "poetry"
PROSE = "prose"
UNLABELED = "unlabeled"
LABELS = (POETRY, PROSE, UNLABELED)


@dataclass(frozen=True)
class Document:
    """Preprocessed text; construct through load_document."""

    id: str
    label: str
    text: str
    source_path: str | None = None


def load_document(raw_text: str, id: str, label: str = UNLABELED) -> Document:
    """Normalize line endings, collapse line-break runs, wrap in Document."""
    if label not in LABELS:
        raise DomainError(f"unknown label {label!r}")
    text = raw_text.replace("\r\n", "\n").replace("\r", "\n")
    text = re.sub(r"\n{2,}", "\n", text)
    if not text.strip():
        raise EmptyDocumentError(f"document {id!r} is empty")
    return Document(id=id, label=label, text=text)


@dataclass
class Corpus:
    documents: list

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def labels(self) -> list:
        return [d.label for d in self.documents]


def document_signals(doc: Document, prondict: PronDict, durations=None,
                     punct=RHYTHM_PUNCTUATION):
    """Tokenize, lay out the timeline, extract the rhyme signals."""
    tokens = tokenize(doc.text)
    timeline = build_timeline(tokens, prondict, durations)
    return find_rhyme_signals(tokens, timeline, prondict, punct)


def detokenize(tokens) -> str:
    """Words single-spaced, punctuation attached, line breaks verbatim."""
    parts = []
    for token in tokens:
        if token.kind == LINE_BREAK:
            parts.append("\n")
        elif token.kind == PUNCTUATION:
            parts.append(token.surface)
        else:
            if parts and not parts[-1].endswith("\n"):
                parts.append(" ")
            parts.append(token.surface)
    return "".join(parts)


def shuffle_document(doc: Document, seed) -> Document:
    """Permute word and number tokens; punctuation and line breaks stay put."""
    tokens = tokenize(doc.text)
    if not tokens:
        raise EmptyDocumentError(f"document {doc.id!r} has no tokens")
    movable = [i for i, t in enumerate(tokens) if t.kind in (WORD, NUMBER)]
    surfaces = [tokens[i].surface for i in movable]
    random.Random(seed).shuffle(surfaces)
    shuffled = list(tokens)
    for slot, surface in zip(movable, surfaces):
        old = tokens[slot]
        shuffled[slot] = Token(old.kind, surface, old.index)
    return replace(doc, text=detokenize(shuffled), source_path=None)


# -- corpus on disk ----------------------------------------------------------

def load_corpus(root) -> Corpus:
    """Read a corpus directory; manifest order wins when a manifest exists."""
    root = Path(root)
    entries = []
    manifest = root / "manifest.json"
    if manifest.exists():
        try:
            listed = json.loads(manifest.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad manifest: {exc}") from exc
        for item in listed:
            entries.append((item["id"], item["label"], root / item["path"]))
    else:
        for label in (POETRY, PROSE):
            subdir = root / label
            if subdir.is_dir():
                for path in sorted(subdir.glob("*.txt")):
                    entries.append((path.stem, label, path))
    if not entries:
        raise ParseError(f"no documents under {root}")
    documents = []
    seen = set()
    for doc_id, label, path in entries:
        if doc_id in seen:
            raise ParseError(f"duplicate document id {doc_id!r}")
        seen.add(doc_id)
        doc = load_document(path.read_text(encoding="utf-8"), doc_id, label)
        documents.append(replace(doc, source_path=str(path)))
    return Corpus(documents)


def save_corpus(corpus: Corpus, root) -> None:
    root = Path(root)
    manifest = []
    for doc in corpus:
        rel = Path(doc.label) / f"{doc.id}.txt"
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(doc.text)
        manifest.append({"id": doc.id, "label": doc.label,
                         "path": rel.as_posix()})
    with open(root / "manifest.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


# -- statistics --------------------------------------------------------------

@dataclass
class Histogram:
    edges: list
    counts: list

    @property
    def n(self) -> int:
        return sum(self.counts)


def build_histogram(samples, min_bins: int = 5) -> Histogram:
    """Freedman-Diaconis bin edges, widened to at least min_bins bins."""
    if not samples:
        return Histogram(edges=[], counts=[])
    arr = np.asarray(samples, dtype=float)
    edges = np.histogram_bin_edges(arr, bins="fd")
    if len(edges) - 1 < min_bins:
        edges = np.histogram_bin_edges(arr, bins=min_bins)
    counts, edges = np.histogram(arr, bins=edges)
    return Histogram(edges=edges.tolist(), counts=counts.tolist())


_MOMENT_INIT = math.pi / math.sqrt(6.0)  # shape of ln-variance under Weibull


def fit_weibull(samples) -> tuple:
    """Maximum-likelihood (shape, scale) for a two-parameter Weibull.

    The shape equation is solved by damped Newton iteration from the
    log-moment starting point; the scale then follows in closed form.
    """
    x = np.asarray(list(samples), dtype=float)
    if x.size < 3:
        raise DomainError("need at least 3 samples")
    if np.any(x <= 0):
        raise DomainError("samples must be positive")
    logs = np.log(x)
    spread = logs.std()
    if spread == 0:
        raise FitError("all samples equal")
    mean_log = logs.mean()
    k = _MOMENT_INIT / spread
    converged = False
    for _ in range(200):
        powered = x ** k
        s0 = powered.sum()
        s1 = (powered * logs).sum()
        s2 = (powered * logs * logs).sum()
        if not np.isfinite(s2):
            raise FitError("overflow while solving for the shape")
        g = s1 / s0 - 1.0 / k - mean_log
        slope = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k)
        step = g / slope
        while k - step <= 0:
            step *= 0.5
        new_k = k - step
        if abs(step) <= 1e-9 * max(abs(new_k), 1e-12):
            k = new_k
            converged = True
            break
        k = new_k
    if not converged:
        raise FitError("shape iteration did not converge")
    scale = ((x ** k).sum() / x.size) ** (1.0 / k)
    return k, scale


STAT_COLUMNS = ("phone_count", "char_count", "rhythm_punct_count",
                "punct_gap_mean", "distinct_rhymes", "mean_rhyme_repetitions")


def document_stat_row(doc: Document, prondict: PronDict,
                      punct=RHYTHM_PUNCTUATION) -> dict:
    """One row of per-document statistics; unavailable values are None."""
    tokens = tokenize(doc.text)
    phone_count = 0
    rhythm_count = 0
    for token in tokens:
        if token.kind == WORD:
            pron = phones_for(prondict, token.surface)
            if pron:
                phone_count += len(pron)
        elif token.kind == PUNCTUATION and token.surface in punct:
            rhythm_count += 1
    positions = [i for i, ch in enumerate(doc.text) if ch in punct]
    gaps = [b - a for a, b in zip(positions, positions[1:])]
    signals = document_signals(doc, prondict, punct=punct)
    classes = signals.class_count
    return {
        "doc_id": doc.id,
        "label": doc.label,
        "phone_count": phone_count,
        "char_count": len(doc.text),
        "rhythm_punct_count": rhythm_count,
        "punct_gap_mean": fmean(gaps) if gaps else None,
        "distinct_rhymes": classes,
        "mean_rhyme_repetitions": len(signals) / classes if classes else None,
    }


@dataclass
class CorpusStats:
    phone_count_hist: Histogram
    char_count_hist: Histogram
    rhythm_punct_count_hist: Histogram
    punct_gap_hist: Histogram
    distinct_rhymes_hist: Histogram
    mean_rhyme_repetitions_hist: Histogram
    weibull_fits: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)


def corpus_stats(corpus: Corpus, prondict: PronDict,
                 punct=RHYTHM_PUNCTUATION) -> CorpusStats:
    if not len(corpus):
        raise DomainError("empty corpus")
    rows = [document_stat_row(doc, prondict, punct) for doc in corpus]

    def samples(column):
        return [row[column] for row in rows if row[column] is not None]

    fits = {}
    for column in ("distinct_rhymes", "mean_rhyme_repetitions"):
        positive = [v for v in samples(column) if v > 0]
        try:
            fits[column] = fit_weibull(positive)
        except (DomainError, FitError):
            pass  # degenerate sample: fit recorded as absent
    return CorpusStats(
        phone_count_hist=build_histogram(samples("phone_count")),
        char_count_hist=build_histogram(samples("char_count")),
        rhythm_punct_count_hist=build_histogram(samples("rhythm_punct_count")),
        punct_gap_hist=build_histogram(samples("punct_gap_mean")),
        distinct_rhymes_hist=build_histogram(samples("distinct_rhymes")),
        mean_rhyme_repetitions_hist=build_histogram(
            samples("mean_rhyme_repetitions")),
        weibull_fits=fits,
        rows=rows,
    )


# -- synthetic corpus --------------------------------------------------------

@dataclass(frozen=True)
class SynthParams:
    """Generator knobs; the defaults satisfy the acceptance corpus shape."""

    lines_per_stanza: int = 4
    line_words: tuple = (5, 8)
    internal_rhyme_rate: float = 0.35
    sentence_words: tuple = (12, 18)
    sentences_per_paragraph: tuple = (4, 6)
    phone_target: tuple = (850, 900)
    phone_cap: int = 1200


def _rhyme_classes(lexicon: PronDict) -> dict:
    classes = {}
    for word in sorted(lexicon.words()):
        classes.setdefault(rhyme_key(phones_for(lexicon, word)), []).append(word)
    return classes


def _phones(lexicon: PronDict, words) -> int:
    return sum(len(phones_for(lexicon, w)) for w in words)


def _poetry_text(rng: random.Random, lexicon: PronDict, classes: dict,
                 params: SynthParams) -> str:
    rich = [key for key, members in sorted(classes.items())
            if len(members) >= 2]
    rng.shuffle(rich)
    fillers = sorted(lexicon.words())
    end_marks = [".", ".", ".", "!", "?"]
    lines = []
    phone_count = 0
    target = rng.randint(*params.phone_target)
    stanza_index = 0
    while phone_count < target:
        scheme = rng.choice(("AABB", "ABAB"))
        first = rich[(2 * stanza_index) % len(rich)]
        second = rich[(2 * stanza_index + 1) % len(rich)]
        final_keys = {"A": first, "B": second}
        # close the couplet or only the stanza; the closed lines' classes
        # are the ones whose words emit signals
        punct_at = rng.choice(((2, 4), (4,))) if scheme == "AABB" else (2, 4)
        anchored = {final_keys[scheme[i - 1]] for i in punct_at}
        for line_no in range(1, params.lines_per_stanza + 1):
            width = rng.randint(*params.line_words)
            words = [rng.choice(fillers) for _ in range(width - 1)]
            if rng.random() < params.internal_rhyme_rate and anchored:
                key = rng.choice(sorted(anchored))
                words[rng.randrange(len(words))] = rng.choice(classes[key])
            words.append(rng.choice(classes[final_keys[scheme[line_no - 1]]]))
            line = " ".join(words)
            if line_no in punct_at:
                line += rng.choice(end_marks)
            lines.append(line)
            phone_count += _phones(lexicon, words)
        stanza_index += 1
    return "\n".join(lines)


def _prose_text(rng: random.Random, lexicon: PronDict, classes: dict,
                params: SynthParams) -> str:
    # one sentence-final word per rhyme class, each class used at most
    # once, and fillers drawn only from the remaining classes: no rhyme
    # class ever repeats, so no same-class signal pair can exist
    keys = sorted(classes)
    rng.shuffle(keys)
    anchor_keys = keys[:40]
    anchors = [rng.choice(classes[key]) for key in anchor_keys]
    fillers = sorted(w for key in keys[40:] for w in classes[key])
    paragraphs = []
    sentences = []
    per_paragraph = rng.randint(*params.sentences_per_paragraph)
    phone_count = 0
    target = rng.randint(850, 1030)
    index = 0
    while phone_count < target:
        if index >= len(anchors):
            raise ConfigError("lexicon too small for a prose document")
        width = rng.randint(*params.sentence_words)
        words = [rng.choice(fillers) for _ in range(width - 1)]
        words.append(anchors[index])
        index += 1
        sentence = " ".join(words) + "."
        if rng.random() < 0.3:
            comma_at = rng.randrange(1, width - 1)
            sentence = (" ".join(words[:comma_at]) + ", "
                        + " ".join(words[comma_at:]) + ".")
        sentences.append(sentence)
        phone_count += _phones(lexicon, words)
        if len(sentences) >= per_paragraph:
            paragraphs.append(" ".join(sentences))
            sentences = []
            per_paragraph = rng.randint(*params.sentences_per_paragraph)
    if sentences:
        paragraphs.append(" ".join(sentences))
    return "\n".join(paragraphs)


def generate_synthetic_corpus(n_per_class: int, seed: int,
                              lexicon: PronDict,
                              params: SynthParams | None = None) -> Corpus:
    """Deterministic corpus of n rhyme-dense and n rhyme-free documents."""
    if params is None:
        params = SynthParams()
    classes = _rhyme_classes(lexicon)
    rich = sum(1 for members in classes.values() if len(members) >= 2)
    if len(lexicon) < 200 or len(classes) < 20 or rich < 20:
        raise ConfigError(
            f"lexicon has {len(lexicon)} words in {len(classes)} rhyme "
            f"classes ({rich} with two or more members); need at least 200 "
            f"words, 20 classes, 20 shared classes")
    documents = []
    for label, builder in ((POETRY, _poetry_text), (PROSE, _prose_text)):
        for i in range(n_per_class):
            rng = random.Random(f"{seed}:{label}:{i}")
            text = builder(rng, lexicon, classes, params)
            documents.append(load_document(text, f"{label}_{i:03d}", label))
    return Corpus(documents)
