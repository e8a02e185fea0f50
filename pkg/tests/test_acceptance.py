"""The acceptance gate: one test per release criterion, each printing a
PASS line and enforcing its runtime budget."""

import itertools
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from sketch2site.geometry import pre_order_labels, tree_equal


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    assert elapsed < budget_s, f"{name} took {elapsed:.1f}s (budget {budget_s}s)"
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.1f}s)")


@pytest.fixture(scope="module")
def corpus():
    from sketch2site.synth import build_corpus

    return build_corpus(seed=2018, per_class=18)


@pytest.fixture(scope="module")
def easy_dataset(tmp_path_factory, corpus):
    from sketch2site.synth import easy_corpus_config, gen_dataset

    root = tmp_path_factory.mktemp("easy_corpus")
    gen_dataset(root, count=50, seed=1000, config=easy_corpus_config(), corpus=corpus)
    return root


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    from sketch2site.mlp import TrainConfig, save_checkpoint, train
    from sketch2site.synth import gen_container_dataset

    data = gen_container_dataset(seed=400, n_per_class=220)
    params, _ = train(data, TrainConfig(seed=11, max_epochs=60, patience=5))
    path = tmp_path_factory.mktemp("ckpt") / "container.ckpt.json"
    save_checkpoint(params, path)
    return path, params


def test_metric_correctness():
    from sketch2site.metrics import MatchResult, macro_prf1

    with criterion("metric-correctness", 1.0):
        m = MatchResult(tp={"image": 351}, fp={}, fn={"image": 649})
        per_class, _ = macro_prf1(m)
        p, r, f1 = per_class["image"]
        assert round(p, 3) == 1.000
        assert round(r, 3) == 0.351
        assert round(f1, 3) == 0.520

        rng = np.random.default_rng(0)
        for _ in range(1000):
            tp, fp, fn = (int(v) for v in rng.integers(0, 60, 3))
            got = macro_prf1(MatchResult(tp={"c": tp}, fp={"c": fp}, fn={"c": fn}))[0]["c"]
            want_p = tp / (tp + fp) if tp + fp else 0.0
            want_r = tp / (tp + fn) if tp + fn else 0.0
            want_f = 2 * want_p * want_r / (want_p + want_r) if want_p + want_r else 0.0
            assert got == (pytest.approx(want_p), pytest.approx(want_r), pytest.approx(want_f))


def test_round_trip_oracle():
    from sketch2site.synth import extract_structure, gen_layout, render_normalized

    with criterion("render-extract-round-trip", 60.0):
        for seed in range(200):
            tree = gen_layout(seed)
            back = extract_structure(render_normalized(tree, w_px=512, h_px=640))
            assert tree_equal(tree, back, box_tol=1.01 / 512), f"seed {seed}"


def exhaustive_levenshtein(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[0] == b[0] else 1
    return min(
        exhaustive_levenshtein(a[1:], b[1:]) + cost,
        exhaustive_levenshtein(a[1:], b) + 1,
        exhaustive_levenshtein(a, b[1:]) + 1,
    )


def test_tree_edit_distance_oracle():
    from sketch2site.metrics import tree_edit_distance

    from test_metrics import random_tree

    with criterion("tree-edit-distance-oracle", 30.0):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = random_tree(rng, int(rng.integers(1, 9)))
            b = random_tree(rng, int(rng.integers(1, 9)))
            ops = tree_edit_distance(a, b)
            assert ops.total == exhaustive_levenshtein(pre_order_labels(a), pre_order_labels(b))
            assert (ops.total == 0) == (pre_order_labels(a) == pre_order_labels(b))
            assert ops.total == ops.insertions + ops.deletions + ops.substitutions


def test_mann_whitney_and_cliffs_delta():
    from sketch2site.metrics import cliffs_delta, mann_whitney_u

    with criterion("mann-whitney-and-cliffs-delta", 30.0):
        rng = np.random.default_rng(6)

        # every split with n1+n2 <= 10: the approximate branch must stay
        # within 0.02 of exact enumeration
        for n1 in range(1, 10):
            for n2 in range(1, 11 - n1):
                for trial in range(4):
                    x = rng.normal(0, 1, n1)
                    y = rng.normal(0.4, 1, n2)
                    for alt in ("less", "greater"):
                        exact = mann_whitney_u(x, y, alt, method="exact").p_value
                        approx = mann_whitney_u(x, y, alt, method="approx").p_value
                        assert abs(approx - exact) <= 0.02, (n1, n2, alt)

        # the public function agrees with enumeration on the exact branch
        res = mann_whitney_u([1, 2, 3], [4, 5, 6], "less")
        assert res.u == 0 and res.p_value == pytest.approx(0.05)

        for _ in range(100):
            x = rng.integers(0, 12, int(rng.integers(1, 9))).astype(float)
            y = rng.integers(0, 12, int(rng.integers(1, 9))).astype(float)
            want = float(np.mean([np.sign(a - b) for a in x for b in y]))
            assert cliffs_delta(x, y) == pytest.approx(want)


def test_container_net(checkpoint):
    from sketch2site.mlp import MlpParams, accuracy, loss_and_grads
    from sketch2site.synth import gen_container_dataset

    with criterion("container-net", 600.0):
        # gradient check: analytic vs central differences, 10 random draws
        rng = np.random.default_rng(3)
        geom = rng.uniform(0, 1, (6, 4))
        child = np.zeros((6, 300))
        child[np.arange(6)[:, None], rng.integers(0, 300, (6, 8))] = 1.0
        labels = rng.integers(0, 5, 6)
        h = 1e-4
        for draw in range(10):
            params = MlpParams.init(500 + draw)
            _, grads = loss_and_grads(params, geom, child, labels)
            for name, arr in params.arrays():
                flat = arr.reshape(-1)
                g_flat = getattr(grads, name).reshape(-1)
                for idx in rng.integers(0, flat.size, 2):
                    orig = flat[idx]
                    flat[idx] = orig + h
                    up, _ = loss_and_grads(params, geom, child, labels)
                    flat[idx] = orig - h
                    down, _ = loss_and_grads(params, geom, child, labels)
                    flat[idx] = orig
                    numeric = (up - down) / (2 * h)
                    denom = max(abs(numeric), abs(g_flat[idx]), 1e-8)
                    assert abs(numeric - g_flat[idx]) / denom < 1e-3

        # held-out accuracy on fresh synthetic containers
        _, params = checkpoint
        holdout = gen_container_dataset(seed=9000, n_per_class=80)
        acc = accuracy(params, holdout)
        assert acc >= 0.90, f"held-out accuracy {acc:.3f}"


def test_detection_suite(easy_dataset, checkpoint):
    from sketch2site.dsl import dsl_to_tree, parse_file
    from sketch2site.metrics import MatchResult, macro_prf1, match_elements, tree_edit_distance
    from sketch2site.pipeline import run_pipeline
    from sketch2site.synth import dataset_ids

    ckpt_path, _ = checkpoint
    with criterion("detection-suite", 300.0):
        agg = MatchResult()
        edit_totals = []
        for sample_id in dataset_ids(easy_dataset):
            truth = dsl_to_tree(parse_file(easy_dataset / f"{sample_id}.truth.wire.json"))
            doc = run_pipeline(easy_dataset / f"{sample_id}.sketch.png", ckpt_path)
            pred = dsl_to_tree(doc)

            def flat(tree):
                out = [(n.label.value, n.box) for n in tree.leaves()]
                out += [(n.label.value, n.box) for n in tree.branches() if n is not tree]
                return out

            m = match_elements(flat(pred), flat(truth), tol=0.05, px_floor=(2 / 512, 2 / 640))
            for cls in m.classes():
                agg.add(agg.tp, cls, m.tp.get(cls, 0))
                agg.add(agg.fp, cls, m.fp.get(cls, 0))
                agg.add(agg.fn, cls, m.fn.get(cls, 0))
            edit_totals.append(tree_edit_distance(pred, truth).total)

        per_class, macro = macro_prf1(agg)
        print("\n  per-class F1:", {c: round(v[2], 3) for c, v in sorted(per_class.items())})
        print(f"  macro F1 {macro[2]:.3f}, median edits {np.median(edit_totals)}")
        for cls, (p, r, f1) in per_class.items():
            assert f1 >= 0.8, f"{cls}: F1 {f1:.3f} < 0.8"
        assert float(np.median(edit_totals)) <= 2.0


def test_capture_suite(corpus):
    from sketch2site.capture import NoPageFound, find_page_quad
    from sketch2site.synth import SketchParams, easy_corpus_config, gen_layout, render_photo, sketch_render, sketch_to_page

    with criterion("capture-skew-recovery", 300.0):
        rng = np.random.default_rng(77)
        cfg = easy_corpus_config()
        for i in range(50):
            tree = gen_layout(200 + i, cfg)
            sketch = sketch_render(tree, corpus, SketchParams(jitter=0.025, seed=i, stroke="pen"), 512, 640)
            page = sketch_to_page(sketch)
            angle = float(rng.uniform(-20, 20))
            photo, corners = render_photo(page, angle_deg=angle)
            quad = find_page_quad(photo)
            diag = math.hypot(*photo.shape[:2])
            err = max(math.hypot(*(q - c)) for q, c in zip(quad, corners))
            assert err < 0.005 * diag, f"photo {i} at {angle:.1f} deg: corner error {err:.1f}px"

        blank = np.full((500, 500, 3), 128, dtype=np.uint8)
        with pytest.raises(NoPageFound):
            find_page_quad(blank)


def test_image_metric_identities():
    from sketch2site.metrics import mse, ssim

    with criterion("image-metric-identities", 60.0):
        rng = np.random.default_rng(8)
        for _ in range(20):
            img = rng.integers(0, 255, (48, 64)).astype(np.uint8)
            assert ssim(img, img) == pytest.approx(1.0, abs=1e-9)
            assert mse(img, img) == 0

        a = rng.integers(0, 255, (31, 27)).astype(np.uint8)
        b = rng.integers(0, 255, (31, 27)).astype(np.uint8)
        acc = 0
        for i in range(31):
            for j in range(27):
                d = int(a[i, j]) - int(b[i, j])
                acc += d * d
        assert mse(a, b) == acc / (31 * 27)


def test_broadcast_suite():
    from fastapi.testclient import TestClient

    from sketch2site.dsl import parse, serialize
    from sketch2site.service import create_app

    from test_service import doc_dict

    with criterion("broadcast", 30.0):
        with TestClient(create_app()) as client:
            sockets = [client.websocket_connect("/ws").__enter__() for _ in range(10)]
            try:
                for ws in sockets:
                    first = json.loads(ws.receive_text())
                    assert first["kind"] == "hello"
                last_seq = 0
                for i in range(100):
                    last_seq = client.post("/publish", json=doc_dict(i % 5 + 1)).json()["seq"]
                final = []
                for ws in sockets:
                    seqs = []
                    payload = None
                    while True:
                        msg = json.loads(ws.receive_text())
                        if msg["kind"] != "dsl_update":
                            continue
                        seqs.append(msg["seq"])
                        payload = msg["payload"]
                        if msg["seq"] == last_seq:
                            break
                    assert seqs == sorted(set(seqs)), "seq regressed"
                    final.append(payload)
                want = serialize(parse(json.dumps(doc_dict((100 - 1) % 5 + 1))))
                assert all(p == want for p in final)
            finally:
                for ws in sockets:
                    ws.__exit__(None, None, None)

            # join after publish: the latest document greets the newcomer
            with client.websocket_connect("/ws") as late:
                msg = json.loads(late.receive_text())
                assert msg["kind"] == "dsl_update"
                assert msg["seq"] == last_seq
