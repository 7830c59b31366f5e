"""Shared generators for randomized tests."""

import random

from prosodex.timeline import Signal, SignalSequence


def random_signal_sequence(rng: random.Random, max_signals: int = 60,
                           max_classes: int = 6) -> SignalSequence:
    """Strictly increasing times, arbitrary class assignment."""
    n = rng.randrange(max_signals + 1)
    classes = rng.randrange(1, max_classes + 1)
    time = rng.randrange(4)
    signals = []
    for i in range(n):
        signals.append(Signal(time=time, rhyme_class=rng.randrange(classes),
                              token_index=i))
        time += rng.randrange(1, 13)
    return SignalSequence(signals=signals, total_duration=time + 2)
