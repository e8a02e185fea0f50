import json

import pytest

from sketch2site.evaluate import control_pipeline, detection_pipeline, evaluate_corpus, oracle_pipeline
from sketch2site.synth import easy_corpus_config, gen_dataset


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory, corpus):
    root = tmp_path_factory.mktemp("dataset")
    gen_dataset(root, count=6, seed=50, config=easy_corpus_config(), corpus=corpus)
    return root


# conftest's corpus fixture is session scoped; redeclare for module scope use
@pytest.fixture(scope="module")
def corpus():
    from sketch2site.synth import build_corpus

    return build_corpus(seed=2018, per_class=18)


class TestEvaluateCorpus:
    def test_oracle_pipeline_is_perfect(self, small_dataset, tmp_path):
        out = tmp_path / "report.jsonl"
        report = evaluate_corpus(oracle_pipeline(small_dataset), small_dataset, out)
        assert report.summary["macro_f1"] == 1.0
        assert report.summary["edit_total_median"] == 0.0
        assert all(s.mse == 0 for s in report.samples)
        assert all(abs(s.ssim - 1.0) < 1e-9 for s in report.samples)

    def test_control_pipeline_scores_poorly(self, small_dataset):
        report = evaluate_corpus(control_pipeline(small_dataset), small_dataset)
        assert report.summary["macro_f1"] < 0.3
        assert report.summary["edit_total_median"] > 0

    def test_report_file_structure(self, small_dataset, tmp_path):
        out = tmp_path / "report.jsonl"
        evaluate_corpus(oracle_pipeline(small_dataset), small_dataset, out)
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        kinds = [l["kind"] for l in lines]
        assert kinds.count("sample") == 6
        assert kinds[-1] == "summary"
        sample = lines[0]
        for field in ("counts", "per_class_f1", "edits", "mse", "ssim"):
            assert field in sample

    def test_detection_pipeline_smoke(self, small_dataset, trained_params):
        report = evaluate_corpus(detection_pipeline(trained_params), small_dataset)
        assert report.summary["macro_f1"] >= 0.7
        assert report.summary["samples"] == 6

    def test_missing_dataset_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            evaluate_corpus(lambda s, i: None, tmp_path / "nope")

    def test_deterministic(self, small_dataset):
        a = evaluate_corpus(oracle_pipeline(small_dataset), small_dataset)
        b = evaluate_corpus(oracle_pipeline(small_dataset), small_dataset)
        assert a.summary == b.summary
