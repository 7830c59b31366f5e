"""Command-line pipeline: artifacts, exit codes, reproducibility."""

import csv
import json
import os

import pytest

from prosodex.cli import main
from prosodex.corpus import generate_synthetic_corpus
from prosodex.phonetics import load_fixture_lexicon
from prosodex.timeline import WORD, tokenize

FAST_CONFIG = 'classifiers = ["lda"]\nnf_min = 3\nnf_max = 3\n'


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def corpus_dir(tmp_path):
    path = tmp_path / "corpus"
    assert run("synth", "--count", "3", "--seed", "7",
               "--out-dir", str(path)) == 0
    return path


@pytest.fixture()
def fast_config(tmp_path):
    path = tmp_path / "fast.toml"
    path.write_text(FAST_CONFIG)
    return path


class TestSynth:
    def test_writes_manifest_and_documents(self, corpus_dir):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        assert len(manifest) == 6
        labels = [entry["label"] for entry in manifest]
        assert labels.count("poetry") == 3
        assert labels.count("prose") == 3
        for entry in manifest:
            assert (corpus_dir / entry["path"]).is_file()

    def test_matches_library_output(self, corpus_dir):
        expected = generate_synthetic_corpus(3, 7, load_fixture_lexicon())
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        for doc, entry in zip(expected, manifest):
            assert doc.id == entry["id"]
            assert (corpus_dir / entry["path"]).read_text() == doc.text


class TestStats:
    def test_writes_rows_and_histograms(self, corpus_dir, tmp_path):
        out = tmp_path / "stats_run"
        assert run("stats", "--corpus", str(corpus_dir),
                   "--out-dir", str(out)) == 0
        with open(out / "stats.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:3] == ["doc_id", "label", "phone_count"]
        assert len(rows) == 7
        payload = json.loads((out / "stats.json").read_text())
        assert set(payload) == {"histograms", "weibull"}
        assert "phone_count" in payload["histograms"]
        counts = payload["histograms"]["phone_count"]["counts"]
        assert sum(counts) == 6


class TestExtract:
    def test_feature_matrix_shape(self, corpus_dir, tmp_path):
        out = tmp_path / "features_run"
        assert run("extract", "--corpus", str(corpus_dir),
                   "--out-dir", str(out)) == 0
        with open(out / "features.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 7
        assert len(rows[0]) == 2 + 175

    def test_restricted_grid_from_config(self, corpus_dir, tmp_path):
        config = tmp_path / "grid.toml"
        config.write_text("pair_counts = [2]\ncv_jumps = [0.2]\n")
        out = tmp_path / "small_grid"
        assert run("extract", "--config", str(config),
                   "--corpus", str(corpus_dir), "--out-dir", str(out)) == 0
        with open(out / "features.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert len(header) == 2 + 7
        assert header[2] == "f_2_0.20_span_mean"

    def test_window_dump_on_rhymed_sentences(self, tmp_path):
        # Three close rhymes then a distant one force a closed window
        # at two seed pairs and a jump threshold of 0.2.
        corpus = tmp_path / "tiny"
        (corpus / "poetry").mkdir(parents=True)
        (corpus / "poetry" / "doc.txt").write_text(
            "Hi. Hi. Hi. Understand butterfly orange hi.")
        config = tmp_path / "fig.toml"
        config.write_text("pair_counts = [2]\ncv_jumps = [0.2]\n")
        out = tmp_path / "dump_run"
        assert run("extract", "--config", str(config), "--corpus", str(corpus),
                   "--out-dir", str(out), "--dump-windows",
                   "--dump-timeline") == 0
        windows = json.loads((out / "windows.json").read_text())
        assert len(windows["doc"]["2_0.20"]) >= 1
        timelines = json.loads((out / "timelines.json").read_text())
        assert timelines["doc"]["total_duration"] > 0

    def test_no_dump_flags_no_dump_files(self, corpus_dir, tmp_path):
        out = tmp_path / "plain_run"
        assert run("extract", "--corpus", str(corpus_dir),
                   "--out-dir", str(out)) == 0
        assert not (out / "windows.json").exists()
        assert not (out / "timelines.json").exists()


@pytest.fixture()
def features_csv(corpus_dir, tmp_path):
    out = tmp_path / "pipeline"
    assert run("extract", "--corpus", str(corpus_dir),
               "--out-dir", str(out)) == 0
    return out / "features.csv"


class TestClassify:
    def test_report_artifacts(self, features_csv, fast_config, tmp_path):
        out = tmp_path / "report_run"
        assert run("classify", "--config", str(fast_config),
                   "--features", str(features_csv),
                   "--out-dir", str(out)) == 0
        with open(out / "report.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["classifier", "n_f", "precision_poetry",
                           "precision_prose", "recall_poetry", "recall_prose",
                           "accuracy"]
        assert [row[0] for row in rows[1:]] == ["lda"]
        best = json.loads((out / "report.json").read_text())
        assert best["lda"]["n_f"] == 3

    def test_single_class_corpus_names_the_missing_one(
            self, features_csv, fast_config, tmp_path, capsys):
        lines = features_csv.read_text().splitlines(True)
        poetry_only = tmp_path / "poetry_only.csv"
        poetry_only.write_text(
            lines[0] + "".join(l for l in lines[1:] if ",poetry," in l))
        code = run("classify", "--config", str(fast_config),
                   "--features", str(poetry_only), "--out-dir", str(tmp_path))
        assert code == 2
        assert "prose" in capsys.readouterr().err

    def test_missing_feature_file(self, tmp_path, capsys):
        code = run("classify", "--features", str(tmp_path / "absent.csv"))
        assert code == 2
        assert "absent.csv" in capsys.readouterr().err


class TestShuffle:
    def test_preserves_ids_and_word_multisets(self, corpus_dir, tmp_path):
        out = tmp_path / "shuffled"
        assert run("shuffle", "--corpus", str(corpus_dir), "--seed", "1",
                   "--out-dir", str(out)) == 0
        before = json.loads((corpus_dir / "manifest.json").read_text())
        after = json.loads((out / "manifest.json").read_text())
        assert [e["id"] for e in before] == [e["id"] for e in after]
        changed = 0
        for entry_b, entry_a in zip(before, after):
            text_b = (corpus_dir / entry_b["path"]).read_text()
            text_a = (out / entry_a["path"]).read_text()
            words = lambda text: sorted(t.surface for t in tokenize(text)
                                        if t.kind == WORD)
            assert words(text_b) == words(text_a)
            changed += text_b != text_a
        assert changed > 0

    def test_deterministic(self, corpus_dir, tmp_path):
        first = tmp_path / "s1"
        second = tmp_path / "s2"
        for out in (first, second):
            assert run("shuffle", "--corpus", str(corpus_dir), "--seed", "4",
                       "--out-dir", str(out)) == 0
        for entry in json.loads((first / "manifest.json").read_text()):
            assert ((first / entry["path"]).read_bytes() ==
                    (second / entry["path"]).read_bytes())


class TestGraph:
    def test_svg_json_dot_variants(self, features_csv, tmp_path):
        for name in ("fig.svg", "fig.json", "fig.dot"):
            assert run("graph", "--features", str(features_csv),
                       "--out", str(tmp_path / name)) == 0
            assert (tmp_path / name).stat().st_size > 0
        payload = json.loads((tmp_path / "fig.json").read_text())
        assert len(payload["nodes"]) == 6
        assert payload["threshold"] == 0.5

    def test_top_k_selection_runs(self, features_csv, tmp_path):
        out = tmp_path / "top3.json"
        assert run("graph", "--features", str(features_csv),
                   "--top-k", "3", "--out", str(out)) == 0
        assert json.loads(out.read_text())["nodes"]

    def test_tau_flag_beats_config(self, features_csv, tmp_path):
        config = tmp_path / "tau.toml"
        config.write_text("tau = 1.5\n")
        strict = tmp_path / "strict.json"
        loose = tmp_path / "loose.json"
        assert run("graph", "--config", str(config),
                   "--features", str(features_csv),
                   "--out", str(strict)) == 0
        assert json.loads(strict.read_text())["edges"] == []
        assert run("graph", "--config", str(config), "--tau", "-1.0",
                   "--features", str(features_csv),
                   "--out", str(loose)) == 0
        assert len(json.loads(loose.read_text())["edges"]) == 15

    def test_usage_errors(self, features_csv, tmp_path, capsys):
        base = ("graph", "--features", str(features_csv))
        assert run(*base, "--top-k", "seven") == 1
        assert run(*base, "--top-k", "0") == 1
        assert run(*base, "--top-k", "9999") == 1
        assert run(*base, "--out", str(tmp_path / "fig.pdf")) == 1
        capsys.readouterr()


class TestExitCodes:
    def test_unknown_command(self, capsys):
        assert run("transmogrify") == 1
        capsys.readouterr()

    def test_missing_corpus_directory(self, tmp_path, capsys):
        assert run("stats", "--corpus", str(tmp_path / "nope")) == 2
        assert "nope" in capsys.readouterr().err

    def test_no_corpus_given(self, capsys):
        assert run("stats") == 1
        assert "corpus" in capsys.readouterr().err

    def test_missing_lexicon(self, corpus_dir, tmp_path, capsys):
        assert run("stats", "--corpus", str(corpus_dir),
                   "--lexicon", str(tmp_path / "no.dict"),
                   "--out-dir", str(tmp_path)) == 2
        assert "no.dict" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert run("synth", "--config", "/absent.toml") == 1
        assert "absent.toml" in capsys.readouterr().err

    def test_environment_config(self, corpus_dir, tmp_path, monkeypatch):
        config = tmp_path / "env.toml"
        config.write_text("pair_counts = [2]\ncv_jumps = [0.2]\n")
        monkeypatch.setenv("PROSODEX_CONFIG", str(config))
        out = tmp_path / "env_run"
        assert run("extract", "--corpus", str(corpus_dir),
                   "--out-dir", str(out)) == 0
        with open(out / "features.csv", newline="") as fh:
            assert len(next(csv.reader(fh))) == 2 + 7

    def test_help_exits_zero(self, capsys):
        assert run("--help") == 0
        capsys.readouterr()


class TestReproducibility:
    def test_pipeline_runs_are_byte_identical(self, fast_config, tmp_path):
        outputs = []
        for name in ("one", "two"):
            root = tmp_path / name
            corpus = root / "corpus"
            assert run("synth", "--count", "3", "--seed", "5",
                       "--out-dir", str(corpus)) == 0
            assert run("extract", "--corpus", str(corpus),
                       "--out-dir", str(root)) == 0
            assert run("classify", "--config", str(fast_config),
                       "--features", str(root / "features.csv"),
                       "--out-dir", str(root)) == 0
            assert run("graph", "--features", str(root / "features.csv"),
                       "--out", str(root / "fig.svg")) == 0
            outputs.append(root)
        first, second = outputs
        for name in ("corpus/manifest.json", "features.csv", "report.csv",
                     "report.json", "fig.svg"):
            assert ((first / name).read_bytes() ==
                    (second / name).read_bytes()), name
