import numpy as np
import pytest

from sketch2site.dsl import serialize
from sketch2site.metrics import macro_prf1, match_elements
from sketch2site.pipeline import run_pipeline, tree_from_photo, tree_from_sketch
from sketch2site.raster import save_png
from sketch2site.synth import (
    SketchParams,
    easy_corpus_config,
    gen_layout,
    render_photo,
    sketch_render,
    sketch_to_page,
)


def page_macro_f1(pred, truth, w_px, h_px):
    leaves_p = [(n.label.value, n.box) for n in pred.leaves()]
    leaves_t = [(n.label.value, n.box) for n in truth.leaves()]
    branches_p = [(n.label.value, n.box) for n in pred.branches() if n is not pred]
    branches_t = [(n.label.value, n.box) for n in truth.branches() if n is not truth]
    m = match_elements(leaves_p + branches_p, leaves_t + branches_t, 0.05, (2 / w_px, 2 / h_px))
    return macro_prf1(m)[1][2]


class TestSketchEntry:
    def test_blank_sketch_gives_empty_page(self, trained_params):
        blank = np.zeros((320, 256), dtype=bool)
        tree = tree_from_sketch(blank, trained_params)
        assert tree.children == []

    def test_deterministic_dsl_bytes(self, corpus, trained_params, tmp_path):
        tree = gen_layout(21, easy_corpus_config())
        sketch = sketch_render(tree, corpus, SketchParams(jitter=0.025, seed=21), 512, 640)
        path = tmp_path / "sketch.png"
        save_png(sketch, path)
        a = serialize(run_pipeline(path, trained_params))
        b = serialize(run_pipeline(path, trained_params))
        assert a == b

    def test_sketch_macro_f1(self, corpus, trained_params):
        cfg = easy_corpus_config()
        tree = gen_layout(33, cfg)
        sketch = sketch_render(tree, corpus, SketchParams(jitter=0.025, seed=33), 512, 640)
        pred = tree_from_sketch(sketch, trained_params)
        assert page_macro_f1(pred, tree, 512, 640) >= 0.8


class TestPhotoEntry:
    def test_photo_macro_f1(self, corpus, trained_params):
        # a realistic camera shot: ~1 mm pen on a page captured near the
        # working resolution, slightly rotated
        cfg = easy_corpus_config()
        tree = gen_layout(4, cfg)
        sketch = sketch_render(tree, corpus, SketchParams(jitter=0.025, seed=4, stroke="pen"), 820, 1024)
        photo, _ = render_photo(sketch_to_page(sketch), angle_deg=4.0)
        pred = tree_from_photo(photo, trained_params)
        assert page_macro_f1(pred, tree, 820, 1024) >= 0.8

    def test_run_pipeline_reads_photo_file(self, corpus, trained_params, tmp_path):
        tree = gen_layout(4, easy_corpus_config())
        sketch = sketch_render(tree, corpus, SketchParams(jitter=0.025, seed=4, stroke="pen"), 820, 1024)
        photo, _ = render_photo(sketch_to_page(sketch), angle_deg=4.0)
        path = tmp_path / "photo.png"
        save_png(photo, path)
        doc = run_pipeline(path, trained_params)
        assert doc.type == "page"
        assert doc.leaf_count() > 0

    def test_blank_page_photo_empty_contains(self, trained_params):
        page = np.full((640, 512, 3), 250, dtype=np.uint8)
        photo, _ = render_photo(page, angle_deg=6.0)
        tree = tree_from_photo(photo, trained_params)
        assert tree.children == []
