"""Clustering of rhyme signals into windows of stable spacing.

A window grows over the signal sequence until the spacing of its
same-class signal pairs stops looking homogeneous.  The homogeneity
statistic is the coefficient of variation of the pair time differences:
a window opens once it holds a fixed number of pairs, extends while the
cv moves gently, and closes at the first extension that shifts the cv by
more than a configured jump.  The closed window's final signal seeds the
next window; a window still open when the signals run out is dropped.

`detect_windows_bruteforce` re-derives the same output from scratch at
every step.  It exists so the incremental implementation can be checked
against an independent route; keep the two implementations separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .timeline import SignalSequence


def cv(values) -> float:
    """Coefficient of variation: population standard deviation over mean."""
    vals = list(values)
    if not vals:
        raise DomainError("cv of an empty sequence")
    mean = sum(vals) / len(vals)
    if mean == 0:
        raise DomainError("cv undefined when the mean is zero")
    variance = sum((v - mean) ** 2 for v in vals) / len(vals)
    return math.sqrt(variance) / mean


@dataclass(frozen=True)
class WindowingParams:
    """Knobs of the clustering pass.

    ``initial_pairs`` is the number of same-class consecutive signal
    pairs a window must hold before extension starts; ``cv_jump`` is the
    cv change beyond which the next extension closes the window.
    """

    initial_pairs: int
    cv_jump: float

    def __post_init__(self):
        if self.initial_pairs < 1:
            raise DomainError("initial_pairs must be at least 1")
        if self.cv_jump <= 0:
            raise DomainError("cv_jump must be positive")


STANDARD_PAIR_COUNTS = (2, 5, 10, 15, 20)
STANDARD_CV_JUMPS = (0.01, 0.05, 0.10, 0.15, 0.20)


def standard_grid() -> list[WindowingParams]:
    """The 25-point parameter grid, pair counts outermost."""
    return [WindowingParams(pairs, jump)
            for pairs in STANDARD_PAIR_COUNTS
            for jump in STANDARD_CV_JUMPS]


@dataclass(frozen=True)
class Window:
    """A closed cluster of signals (indices inclusive at both ends).

    ``time_diffs`` holds the time difference of every same-class
    consecutive pair inside the window; ``span`` is end time minus start
    time.
    """

    start_signal: int
    end_signal: int
    time_diffs: tuple
    span: int


@dataclass
class WindowSet:
    windows: list

    def __len__(self):
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def __getitem__(self, i):
        return self.windows[i]

    def spans(self) -> list:
        return [w.span for w in self.windows]


def same_type_pairs(signals: SignalSequence, from_index: int,
                    to_index: int) -> list:
    """Consecutive same-class signal pairs in the inclusive index range.

    For each rhyme class, every pair of occurrences with no same-class
    signal between them; signals of other classes may sit in between.
    Returns (earlier index, later index, time difference) ordered by the
    later index.
    """
    sig = signals.signals
    previous = {}
    pairs = []
    for j in range(from_index, to_index + 1):
        cls = sig[j].rhyme_class
        if cls in previous:
            i = previous[cls]
            pairs.append((i, j, sig[j].time - sig[i].time))
        previous[cls] = j
    return pairs


def detect_windows(signals: SignalSequence,
                   params: WindowingParams) -> WindowSet:
    """Single left-to-right pass with incremental pair bookkeeping."""
    sig = signals.signals
    n = len(sig)
    windows = []
    start = 0
    while start < n:
        # seed: grow until exactly initial_pairs same-class pairs sit inside
        previous = {sig[start].rhyme_class: start}
        diffs = []
        end = start
        while end + 1 < n and len(diffs) < params.initial_pairs:
            end += 1
            cls = sig[end].rhyme_class
            if cls in previous:
                diffs.append(sig[end].time - sig[previous[cls]].time)
            previous[cls] = end
        if len(diffs) < params.initial_pairs:
            break  # open window is discarded
        while True:
            # extend one signal at a time until a new pair completes
            trial_end = end
            trial_previous = dict(previous)
            new_diff = None
            while trial_end + 1 < n and new_diff is None:
                trial_end += 1
                cls = sig[trial_end].rhyme_class
                if cls in trial_previous:
                    new_diff = sig[trial_end].time - sig[trial_previous[cls]].time
                trial_previous[cls] = trial_end
            if new_diff is None:
                return WindowSet(windows)  # exhausted while open: discard
            if abs(cv(diffs + [new_diff]) - cv(diffs)) > params.cv_jump:
                windows.append(Window(
                    start_signal=start, end_signal=end,
                    time_diffs=tuple(diffs),
                    span=sig[end].time - sig[start].time))
                start = end  # closed window's final signal seeds the next
                break
            end = trial_end
            previous = trial_previous
            diffs.append(new_diff)
    return WindowSet(windows)


def detect_windows_bruteforce(signals: SignalSequence,
                              params: WindowingParams) -> WindowSet:
    """Reference implementation recomputing every pair list from scratch."""
    sig = signals.signals
    n = len(sig)
    windows = []
    start = 0
    while True:
        end = None
        for e in range(start, n):
            if len(same_type_pairs(signals, start, e)) == params.initial_pairs:
                end = e
                break
        if end is None:
            return WindowSet(windows)
        closed = False
        while not closed:
            base = len(same_type_pairs(signals, start, end))
            extended = None
            for e in range(end + 1, n):
                if len(same_type_pairs(signals, start, e)) > base:
                    extended = e
                    break
            if extended is None:
                return WindowSet(windows)
            before = [dt for _, _, dt in same_type_pairs(signals, start, end)]
            after = [dt for _, _, dt in same_type_pairs(signals, start, extended)]
            if abs(cv(after) - cv(before)) > params.cv_jump:
                windows.append(Window(
                    start_signal=start, end_signal=end,
                    time_diffs=tuple(before),
                    span=sig[end].time - sig[start].time))
                start = end
                closed = True
            else:
                end = extended


def windows_dump(signals: SignalSequence, params: WindowingParams) -> list:
    """JSON-ready debug view of the stored windows at one grid point."""
    sig = signals.signals
    out = []
    for w in detect_windows(signals, params):
        out.append({
            "start_time": sig[w.start_signal].time,
            "end_time": sig[w.end_signal].time,
            "span": w.span,
            "time_diffs": list(w.time_diffs),
            "cv": cv(w.time_diffs),
        })
    return out
