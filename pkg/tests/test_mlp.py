import numpy as np
import pytest

from sketch2site.geometry import BBox, ContainerClass, ElementClass, LayoutNode, page_root
from sketch2site.mlp import (
    CONTAINER_ORDER,
    CheckpointError,
    ContainerFeatures,
    MlpParams,
    TrainConfig,
    accuracy,
    classify_tree,
    featurize,
    forward,
    load_checkpoint,
    loss_and_grads,
    save_checkpoint,
    train,
)


def header_node(n_buttons=3):
    kids = [
        LayoutNode(ElementClass.BUTTON, BBox(0.05 + 0.22 * i, 0.02, 0.15, 0.05))
        for i in range(n_buttons)
    ]
    return LayoutNode(ContainerClass.HEADER, BBox(0.0, 0.0, 1.0, 0.1), kids)


class TestFeaturize:
    def test_header_geometry_and_slots(self):
        f = featurize(header_node())
        assert np.allclose(f.geom, [0.0, 0.0, 1.0, 0.1])
        button_idx = list(ElementClass).index(ElementClass.BUTTON)
        for slot in range(3):
            assert f.children[slot, button_idx] == 1.0
        assert (f.children[3:, -1] == 1.0).all()

    def test_rows_one_hot(self):
        f = featurize(header_node())
        assert np.allclose(f.children.sum(axis=1), 1.0)

    def test_empty_container_all_null(self):
        node = LayoutNode(None, BBox(0.1, 0.1, 0.5, 0.5), [])
        node.children.append(LayoutNode(ElementClass.IMAGE, BBox(0.2, 0.2, 0.1, 0.1)))
        node.children.pop()
        with pytest.raises(ValueError):
            featurize(node)  # leaf input rejected

    def test_sixty_children_capped_at_fifty(self):
        kids = [
            LayoutNode(ElementClass.IMAGE, BBox(0.01 + 0.015 * i, 0.2, 0.01, 0.01))
            for i in range(60)
        ]
        node = LayoutNode(None, BBox(0.0, 0.0, 1.0, 1.0), kids)
        f = featurize(node)
        image_idx = list(ElementClass).index(ElementClass.IMAGE)
        assert (f.children[:, image_idx] == 1.0).sum() == 50


class TestForward:
    def rand_features(self, rng):
        geom = rng.uniform(0, 1, 4)
        children = np.zeros((50, 6))
        children[np.arange(50), rng.integers(0, 6, 50)] = 1.0
        return ContainerFeatures(geom=geom, children=children)

    def test_zero_params_uniform(self):
        f = self.rand_features(np.random.default_rng(0))
        probs = forward(MlpParams.zeros(), f)
        assert np.allclose(probs, 0.2)

    def test_sums_to_one(self):
        rng = np.random.default_rng(1)
        params = MlpParams.init(7)
        for _ in range(20):
            probs = forward(params, self.rand_features(rng))
            assert abs(probs.sum() - 1.0) < 1e-6

    def test_matches_straight_line_oracle(self):
        # independent re-implementation with explicit loops
        rng = np.random.default_rng(42)
        params = MlpParams.init(42)
        f = self.rand_features(rng)
        x1 = f.geom
        x2 = f.flat_children()

        def dense(x, w, b):
            out = []
            for j in range(w.shape[1]):
                acc = b[j]
                for i in range(w.shape[0]):
                    acc += x[i] * w[i, j]
                out.append(max(acc, 0.0))
            return np.array(out)

        a1 = dense(x1, params.w1, params.b1)
        a2 = dense(x2, params.w2, params.b2)
        merged = np.concatenate([a1, a2])
        a3 = dense(merged, params.w3, params.b3)
        logits = np.array(
            [params.b4[j] + sum(a3[i] * params.w4[i, j] for i in range(64)) for j in range(5)]
        )
        exp = np.exp(logits - logits.max())
        want = exp / exp.sum()
        got = forward(params, f)
        assert np.allclose(got, want, atol=1e-10)

    def test_constant_logit_shift_keeps_argmax(self):
        rng = np.random.default_rng(3)
        params = MlpParams.init(3)
        f = self.rand_features(rng)
        base = forward(params, f).argmax()
        shifted = params.copy()
        shifted.b4 = shifted.b4 + 7.5
        assert forward(shifted, f).argmax() == base

    def test_nonfinite_params_rejected(self):
        params = MlpParams.init(0)
        params.w1[0, 0] = np.nan
        f = self.rand_features(np.random.default_rng(0))
        with pytest.raises(ValueError):
            forward(params, f)


def toy_blobs(n=240, seed=0):
    """Linearly separable two-class features (classes row vs stack)."""
    rng = np.random.default_rng(seed)
    data = []
    for i in range(n):
        label = CONTAINER_ORDER[i % 2]
        center = 0.25 if label is CONTAINER_ORDER[0] else 0.75
        geom = np.clip(rng.normal(center, 0.05, 4), 0, 1)
        children = np.zeros((50, 6))
        children[:, 5] = 1.0
        data.append((ContainerFeatures(geom=geom, children=children), label))
    return data


class TestTrain:
    def test_separable_blobs_learned(self):
        data = toy_blobs()
        params, history = train(data, TrainConfig(seed=0, batch_size=16, max_epochs=50, patience=10))
        assert accuracy(params, data) >= 0.99
        assert len(history) <= 50

    def test_gradient_check_against_central_differences(self):
        rng = np.random.default_rng(5)
        geom = rng.uniform(0, 1, (6, 4))
        child = np.zeros((6, 300))
        child[np.arange(6)[:, None], rng.integers(0, 300, (6, 10))] = 1.0
        labels = rng.integers(0, 5, 6)
        h = 1e-4
        for draw in range(10):
            params = MlpParams.init(100 + draw)
            _, grads = loss_and_grads(params, geom, child, labels)
            # probe a few coordinates in every parameter array
            for name, arr in params.arrays():
                flat = arr.reshape(-1)
                g_flat = getattr(grads, name).reshape(-1)
                for idx in rng.integers(0, flat.size, 3):
                    orig = flat[idx]
                    flat[idx] = orig + h
                    up, _ = loss_and_grads(params, geom, child, labels)
                    flat[idx] = orig - h
                    down, _ = loss_and_grads(params, geom, child, labels)
                    flat[idx] = orig
                    numeric = (up - down) / (2 * h)
                    analytic = g_flat[idx]
                    denom = max(abs(numeric), abs(analytic), 1e-8)
                    assert abs(numeric - analytic) / denom < 1e-3

    def test_loss_non_increasing_without_shuffle(self):
        data = toy_blobs(n=160, seed=2)
        cfg = TrainConfig(seed=1, learning_rate=1e-4, batch_size=160, max_epochs=12, patience=12, shuffle=False, val_fraction=0.1)
        _, history = train(data, cfg)
        losses = [h["train_loss"] for h in history]
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_deterministic_history(self):
        data = toy_blobs(n=160, seed=3)
        cfg = TrainConfig(seed=9, max_epochs=8, patience=8)
        _, h1 = train(data, cfg)
        _, h2 = train(data, cfg)
        assert h1 == h2

    def test_empty_and_single_class_rejected(self):
        with pytest.raises(ValueError):
            train([])
        single = [r for r in toy_blobs(40) if r[1] is CONTAINER_ORDER[0]]
        with pytest.raises(ValueError):
            train(single)


class TestClassifyTree:
    def test_leaf_only_tree_unchanged(self):
        tree = page_root([LayoutNode(ElementClass.IMAGE, BBox(0.2, 0.2, 0.3, 0.3))])
        out = classify_tree(MlpParams.init(0), tree)
        assert out.children[0].label is ElementClass.IMAGE
        assert out.label is ContainerClass.PAGE

    def test_branches_get_container_labels(self):
        tree = page_root([header_node()])
        out = classify_tree(MlpParams.init(0), tree)
        assert out.children[0].label in CONTAINER_ORDER


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        params = MlpParams.init(13)
        path = tmp_path / "ckpt.json"
        save_checkpoint(params, path)
        loaded = load_checkpoint(path)
        for (_, a), (_, b) in zip(params.arrays(), loaded.arrays()):
            assert np.array_equal(a, b)

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_wrong_shape_rejected(self, tmp_path):
        params = MlpParams.init(0)
        path = tmp_path / "ckpt.json"
        save_checkpoint(params, path)
        import json

        payload = json.loads(path.read_text())
        payload["weights"]["w1"]["shape"] = [4, 16]
        path.write_text(json.dumps(payload))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)
