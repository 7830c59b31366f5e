"""Window clustering: arithmetic oracles, traces, and differential checks."""

import random

import pytest

from prosodex.errors import DomainError
from prosodex.timeline import Signal, SignalSequence
from prosodex.windowing import (
    STANDARD_CV_JUMPS,
    STANDARD_PAIR_COUNTS,
    WindowingParams,
    cv,
    detect_windows,
    detect_windows_bruteforce,
    same_type_pairs,
    standard_grid,
    windows_dump,
)

from .helpers import random_signal_sequence


def seq(*time_class_pairs):
    signals = [Signal(time=t, rhyme_class=c, token_index=i)
               for i, (t, c) in enumerate(time_class_pairs)]
    total = (signals[-1].time + 2) if signals else 0
    return SignalSequence(signals=signals, total_duration=total)


class TestCv:
    def test_zero_dispersion(self):
        assert cv([4, 4, 4]) == 0.0

    def test_hand_value(self):
        assert abs(cv([2, 4]) - 1 / 3) < 1e-9

    def test_singleton(self):
        assert cv([10]) == 0.0

    def test_skewed_triple(self):
        assert abs(cv([10, 10, 80]) - 0.9899494936611665) < 1e-9

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            cv([])

    def test_zero_mean_rejected(self):
        with pytest.raises(DomainError):
            cv([0, 0])
        with pytest.raises(DomainError):
            cv([-2, 2])


class TestParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            WindowingParams(0, 0.1)
        with pytest.raises(DomainError):
            WindowingParams(2, 0.0)
        with pytest.raises(DomainError):
            WindowingParams(2, -0.5)

    def test_standard_grid(self):
        grid = standard_grid()
        assert len(grid) == 25
        assert grid[0] == WindowingParams(2, 0.01)
        assert all(p.initial_pairs == 2 for p in grid[:5])
        assert [p.cv_jump for p in grid[:5]] == list(STANDARD_CV_JUMPS)
        assert sorted({p.initial_pairs for p in grid}) == list(STANDARD_PAIR_COUNTS)


class TestSameTypePairs:
    def test_single_class_chain(self):
        s = seq((0, 0), (10, 0), (20, 0))
        assert same_type_pairs(s, 0, 2) == [(0, 1, 10), (1, 2, 10)]

    def test_interleaved_classes(self):
        s = seq((0, 0), (5, 1), (12, 0))
        assert same_type_pairs(s, 0, 2) == [(0, 2, 12)]

    def test_single_signal(self):
        assert same_type_pairs(seq((0, 0)), 0, 0) == []

    def test_subrange_forgets_outside_signals(self):
        s = seq((0, 0), (10, 0), (20, 0))
        assert same_type_pairs(s, 1, 2) == [(1, 2, 10)]

    def test_ordered_by_later_index(self):
        s = seq((0, 0), (3, 1), (6, 0), (9, 1))
        assert same_type_pairs(s, 0, 3) == [(0, 2, 6), (1, 3, 6)]


class TestDetectWindows:
    def test_steady_chain_never_closes(self):
        s = seq((0, 0), (10, 0), (20, 0), (30, 0))
        assert len(detect_windows(s, WindowingParams(2, 0.1))) == 0

    def test_jump_closes_and_restart_starves(self):
        s = seq((0, 0), (10, 0), (20, 0), (100, 0))
        out = detect_windows(s, WindowingParams(2, 0.2))
        assert len(out) == 1
        w = out[0]
        assert (w.start_signal, w.end_signal) == (0, 2)
        assert w.time_diffs == (10, 10)
        assert w.span == 20

    def test_too_few_signals(self):
        s = seq((0, 0), (10, 0))
        assert len(detect_windows(s, WindowingParams(2, 0.1))) == 0

    def test_empty(self):
        assert len(detect_windows(seq(), WindowingParams(2, 0.1))) == 0

    def test_interleaved_classes_share_window(self):
        # pairs are per class: A at 0,6 and B at 3,9 both count, then the
        # late A at 100 blows up the cv and closes the window at signal 3
        s = seq((0, 0), (3, 1), (6, 0), (9, 1), (100, 0))
        out = detect_windows(s, WindowingParams(2, 0.1))
        assert len(out) == 1
        w = out[0]
        assert (w.start_signal, w.end_signal) == (0, 3)
        assert w.time_diffs == (6, 6)
        assert w.span == 9

    def test_consecutive_windows_share_boundary_signal(self):
        rng = random.Random(11)
        checked = 0
        while checked < 20:
            s = random_signal_sequence(rng)
            out = detect_windows(s, WindowingParams(2, 0.05))
            for a, b in zip(out.windows, out.windows[1:]):
                assert a.end_signal == b.start_signal
                checked += 1

    def test_growth_history_replayable(self):
        # within a stored window, every accepted extension moved cv gently
        rng = random.Random(5)
        params = WindowingParams(2, 0.1)
        windows_seen = 0
        while windows_seen < 30:
            s = random_signal_sequence(rng)
            for w in detect_windows(s, params):
                diffs = [dt for _, _, dt in
                         same_type_pairs(s, w.start_signal, w.end_signal)]
                assert tuple(diffs) == w.time_diffs
                assert len(diffs) >= params.initial_pairs
                assert all(d > 0 for d in diffs)
                assert w.span >= 1
                for k in range(params.initial_pairs, len(diffs)):
                    jump = abs(cv(diffs[:k + 1]) - cv(diffs[:k]))
                    assert jump <= params.cv_jump + 1e-12
                windows_seen += 1

    def test_time_scale_invariance(self):
        rng = random.Random(21)
        params = WindowingParams(2, 0.1)
        for _ in range(40):
            s = random_signal_sequence(rng, max_signals=30)
            for c in (2, 3, 10):
                scaled = SignalSequence(
                    signals=[Signal(x.time * c, x.rhyme_class, x.token_index)
                             for x in s.signals],
                    total_duration=s.total_duration * c)
                a = detect_windows(s, params)
                b = detect_windows(scaled, params)
                assert [(w.start_signal, w.end_signal) for w in a] == \
                       [(w.start_signal, w.end_signal) for w in b]
                assert [tuple(d * c for d in w.time_diffs) for w in a] == \
                       [w.time_diffs for w in b]


class TestBruteforceAgreement:
    def test_canonical_traces(self):
        for s, p in [
            (seq((0, 0), (10, 0), (20, 0), (30, 0)), WindowingParams(2, 0.1)),
            (seq((0, 0), (10, 0), (20, 0), (100, 0)), WindowingParams(2, 0.2)),
            (seq(), WindowingParams(2, 0.1)),
            (seq((0, 0), (3, 1), (6, 0), (9, 1), (100, 0)),
             WindowingParams(2, 0.1)),
        ]:
            assert detect_windows(s, p).windows == \
                detect_windows_bruteforce(s, p).windows

    def test_randomized_differential(self):
        rng = random.Random(99)
        grid = standard_grid()
        for _ in range(300):
            s = random_signal_sequence(rng)
            p = grid[rng.randrange(len(grid))]
            assert detect_windows(s, p).windows == \
                detect_windows_bruteforce(s, p).windows


class TestDump:
    def test_shape(self):
        s = seq((0, 0), (10, 0), (20, 0), (100, 0))
        out = windows_dump(s, WindowingParams(2, 0.2))
        assert out == [{"start_time": 0, "end_time": 20, "span": 20,
                        "time_diffs": [10, 10], "cv": 0.0}]
