"""Window measures, grid aggregation, standardization, CSV round-trip."""

import math
import random

import numpy as np
import pytest

from prosodex.errors import DomainError
from prosodex.features import (
    MEASURE_NAMES,
    apply_standardizer,
    document_features,
    feature_names,
    fit_standardizer,
    grid_point_features,
    read_features,
    window_measures,
    write_features,
)
from prosodex.timeline import Signal, SignalSequence
from prosodex.windowing import Window, WindowingParams

from .helpers import random_signal_sequence


def seq(*time_class_pairs):
    signals = [Signal(time=t, rhyme_class=c, token_index=i)
               for i, (t, c) in enumerate(time_class_pairs)]
    total = (signals[-1].time + 2) if signals else 0
    return SignalSequence(signals=signals, total_duration=total)


class TestWindowMeasures:
    def test_regular_chain(self):
        w = Window(0, 2, (10, 10), 20)
        m = window_measures(w)
        assert (m.span, m.diff_mean, m.diff_std) == (20, 10.0, 0.0)

    def test_skewed(self):
        w = Window(0, 3, (10, 10, 80), 100)
        m = window_measures(w)
        assert m.span == 100
        assert abs(m.diff_mean - 100 / 3) < 1e-9
        assert abs(m.diff_std - math.sqrt(29400 / 27)) < 1e-9

    def test_single_diff(self):
        m = window_measures(Window(0, 1, (5,), 5))
        assert (m.diff_mean, m.diff_std) == (5.0, 0.0)


class TestGridPoint:
    def test_single_window_aggregation(self):
        s = seq((0, 0), (10, 0), (20, 0), (100, 0))
        vals = grid_point_features(s, WindowingParams(2, 0.2))
        assert vals == [20.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0]

    def test_no_windows_all_zero(self):
        s = seq((0, 0), (10, 0), (20, 0), (30, 0))
        assert grid_point_features(s, WindowingParams(2, 0.1)) == [0.0] * 7

    def test_product_is_exact(self):
        rng = random.Random(3)
        seen = 0
        while seen < 10:
            s = random_signal_sequence(rng)
            vals = grid_point_features(s, WindowingParams(2, 0.05))
            if vals[0] != 0.0:
                assert vals[2] == vals[0] * vals[1]
                seen += 1


class TestDocumentFeatures:
    def test_empty_sequence_is_zero_vector(self):
        fv = document_features(seq())
        assert fv.values == [0.0] * 175

    def test_standard_length(self):
        rng = random.Random(1)
        fv = document_features(random_signal_sequence(rng), doc_id="d",
                               label="poetry")
        assert len(fv.values) == 175
        assert (fv.doc_id, fv.label) == ("d", "poetry")

    def test_grid_permutation_permutes_blocks(self):
        rng = random.Random(8)
        s = random_signal_sequence(rng)
        p1, p2 = WindowingParams(2, 0.2), WindowingParams(5, 0.05)
        a = document_features(s, [p1, p2]).values
        b = document_features(s, [p2, p1]).values
        assert a[:7] == b[7:] and a[7:] == b[:7]


class TestFeatureNames:
    def test_count_and_first_block(self):
        names = feature_names()
        assert len(names) == 175
        assert names[:7] == [f"f_2_0.01_{m}" for m in MEASURE_NAMES]

    def test_two_decimal_rendering(self):
        names = feature_names([WindowingParams(10, 0.1)])
        assert names[0] == "f_10_0.10_span_mean"


class TestStandardizer:
    def test_hand_column(self):
        model = fit_standardizer([[1.0], [2.0], [3.0]])
        z = apply_standardizer(model, [[1.0], [2.0], [3.0]])
        expect = 1.224744871391589
        assert abs(z[0, 0] + expect) < 1e-12
        assert z[1, 0] == 0.0
        assert abs(z[2, 0] - expect) < 1e-12

    def test_constant_column_maps_to_zero(self):
        model = fit_standardizer([[5.0, 1.0], [5.0, 3.0]])
        z = apply_standardizer(model, [[5.0, 2.0], [5.0, 0.0]])
        assert z[:, 0].tolist() == [0.0, 0.0]

    def test_self_application_centers(self):
        rng = np.random.default_rng(0)
        matrix = rng.normal(size=(20, 5))
        model = fit_standardizer(matrix)
        z = apply_standardizer(model, matrix)
        assert np.all(np.abs(z.mean(axis=0)) < 1e-9)

    def test_refit_on_output_is_identity(self):
        rng = np.random.default_rng(1)
        matrix = rng.normal(size=(15, 4))
        z = apply_standardizer(fit_standardizer(matrix), matrix)
        z2 = apply_standardizer(fit_standardizer(z), z)
        assert np.allclose(z, z2, atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            fit_standardizer(np.empty((0, 3)))


class TestCsv:
    def test_round_trip(self, tmp_path):
        rng = random.Random(4)
        vectors = [document_features(random_signal_sequence(rng),
                                     doc_id=f"d{i}",
                                     label="poetry" if i % 2 else "prose")
                   for i in range(6)]
        path = tmp_path / "features.csv"
        write_features(path, vectors)
        ids, labels, matrix, names = read_features(path)
        assert ids == [f"d{i}" for i in range(6)]
        assert labels == ["prose", "poetry"] * 3
        assert names == feature_names()
        for i, vec in enumerate(vectors):
            assert matrix[i].tolist() == vec.values

    def test_write_is_deterministic(self, tmp_path):
        rng = random.Random(4)
        vec = document_features(random_signal_sequence(rng), doc_id="a",
                                label="prose")
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_features(p1, [vec])
        write_features(p2, [vec])
        assert p1.read_bytes() == p2.read_bytes()

    def test_length_mismatch_rejected(self, tmp_path):
        from prosodex.features import FeatureVector
        with pytest.raises(DomainError):
            write_features(tmp_path / "x.csv",
                           [FeatureVector("d", "prose", [1.0, 2.0])])
