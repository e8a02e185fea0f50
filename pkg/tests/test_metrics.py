import itertools

import numpy as np
import pytest

from sketch2site.geometry import BBox, ElementClass, LayoutNode, page_root
from sketch2site.metrics import (
    EditOps,
    cliffs_delta,
    macro_prf1,
    mann_whitney_u,
    match_elements,
    mse,
    sequence_edit_ops,
    ssim,
    tree_edit_distance,
)


def boxes(*specs):
    return [(label, BBox(*rest)) for label, *rest in specs]


class TestMatch:
    def test_identical_lists_all_tp(self):
        truth = boxes(("image", 0.1, 0.1, 0.2, 0.2), ("title", 0.5, 0.1, 0.3, 0.05))
        result = match_elements(truth, truth)
        assert result.tp == {"image": 1, "title": 1}
        assert result.fp == {} and result.fn == {}

    def test_shifted_by_ten_percent_no_match(self):
        truth = boxes(("image", 0.1, 0.1, 0.2, 0.2))
        pred = boxes(("image", 0.2, 0.2, 0.2, 0.2))
        result = match_elements(pred, truth)
        assert result.tp == {} and result.fp == {"image": 1} and result.fn == {"image": 1}

    def test_four_percent_scale_matches(self):
        truth = boxes(("image", 0.1, 0.1, 0.25, 0.25))
        pred = boxes(("image", 0.1, 0.1, 0.26, 0.26))  # 4% size error
        result = match_elements(pred, truth)
        assert result.tp == {"image": 1}

    def test_label_mismatch_never_matches(self):
        truth = boxes(("image", 0.1, 0.1, 0.2, 0.2))
        pred = boxes(("title", 0.1, 0.1, 0.2, 0.2))
        result = match_elements(pred, truth)
        assert result.tp == {}

    def test_one_to_one_assignment(self):
        truth = boxes(("image", 0.1, 0.1, 0.2, 0.2), ("image", 0.101, 0.1, 0.2, 0.2))
        pred = boxes(("image", 0.1, 0.1, 0.2, 0.2))
        result = match_elements(pred, truth)
        assert result.tp == {"image": 1}
        assert result.fn == {"image": 1}

    def test_counts_partition(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            truth = [("image", BBox(*rng.uniform(0.05, 0.4, 2), *rng.uniform(0.1, 0.3, 2))) for _ in range(4)]
            pred = truth[:2] + [("title", BBox(0.6, 0.6, 0.2, 0.1))]
            m = match_elements(pred, truth)
            for cls in m.classes():
                assert m.tp.get(cls, 0) + m.fn.get(cls, 0) == sum(1 for l, _ in truth if l == cls)
                assert m.tp.get(cls, 0) + m.fp.get(cls, 0) == sum(1 for l, _ in pred if l == cls)


class TestPrf1:
    def test_paper_image_row(self):
        # P=1.000, R=0.351 must give F1=0.520 to three decimals
        from sketch2site.metrics import MatchResult

        m = MatchResult(tp={"image": 351}, fp={}, fn={"image": 649})
        per_class, _ = macro_prf1(m)
        p, r, f1 = per_class["image"]
        assert p == pytest.approx(1.000, abs=5e-4)
        assert r == pytest.approx(0.351, abs=5e-4)
        assert round(f1, 3) == 0.520

    def test_perfect_scores(self):
        from sketch2site.metrics import MatchResult

        m = MatchResult(tp={"a": 5})
        per_class, macro = macro_prf1(m)
        assert per_class["a"] == (1.0, 1.0, 1.0)
        assert macro == (1.0, 1.0, 1.0)

    def test_zero_tp_gives_zero_f1(self):
        from sketch2site.metrics import MatchResult

        m = MatchResult(fp={"a": 3}, fn={"a": 2})
        per_class, _ = macro_prf1(m)
        assert per_class["a"] == (0.0, 0.0, 0.0)

    def test_identities_on_random_counts(self):
        rng = np.random.default_rng(1)
        from sketch2site.metrics import MatchResult

        for _ in range(1000):
            tp, fp, fn = (int(x) for x in rng.integers(0, 50, 3))
            m = MatchResult(tp={"c": tp}, fp={"c": fp}, fn={"c": fn})
            (p, r, f1) = macro_prf1(m)[0]["c"]
            want_p = tp / (tp + fp) if tp + fp else 0.0
            want_r = tp / (tp + fn) if tp + fn else 0.0
            want_f = 2 * want_p * want_r / (want_p + want_r) if want_p + want_r else 0.0
            assert (p, r, f1) == (pytest.approx(want_p), pytest.approx(want_r), pytest.approx(want_f))

    def test_macro_invariant_under_relabeling(self):
        from sketch2site.metrics import MatchResult

        m1 = MatchResult(tp={"a": 3, "b": 1}, fp={"a": 1}, fn={"b": 2})
        m2 = MatchResult(tp={"b": 3, "a": 1}, fp={"b": 1}, fn={"a": 2})
        assert macro_prf1(m1)[1] == macro_prf1(m2)[1]


def exhaustive_levenshtein(a, b):
    """Plain exponential recursion; the independent oracle."""
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


def random_tree(rng, n):
    labels = [c.value for c in ElementClass]
    nodes = [page_root()]
    for _ in range(n - 1):
        parent = nodes[rng.integers(0, len(nodes))]
        x, y = rng.uniform(0.01, 0.5, 2)
        child = LayoutNode(ElementClass(labels[rng.integers(0, 5)]), BBox(x, y, 0.1, 0.1))
        parent.children.append(child)
        nodes.append(child)
    return nodes[0]


class TestEditDistance:
    def test_identical_trees_zero(self):
        t = random_tree(np.random.default_rng(0), 6)
        ops = tree_edit_distance(t, t)
        assert (ops.insertions, ops.deletions, ops.substitutions, ops.total) == (0, 0, 0, 0)

    def test_single_substitution(self):
        ops = sequence_edit_ops(["a", "b", "c"], ["a", "b", "d"])
        assert ops.substitutions == 1 and ops.total == 1

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            a = random_tree(rng, int(rng.integers(1, 9)))
            b = random_tree(rng, int(rng.integers(1, 9)))
            got = tree_edit_distance(a, b).total
            from sketch2site.geometry import pre_order_labels

            want = exhaustive_levenshtein(pre_order_labels(a), pre_order_labels(b))
            assert got == want

    def test_zero_iff_equal_sequences(self):
        rng = np.random.default_rng(8)
        for _ in range(60):
            a = random_tree(rng, int(rng.integers(1, 8)))
            b = random_tree(rng, int(rng.integers(1, 8)))
            from sketch2site.geometry import pre_order_labels

            same = pre_order_labels(a) == pre_order_labels(b)
            assert (tree_edit_distance(a, b).total == 0) == same

    def test_metric_properties(self):
        rng = np.random.default_rng(9)
        trees = [random_tree(rng, int(rng.integers(1, 8))) for _ in range(12)]
        for a, b in itertools.combinations(trees, 2):
            dab = tree_edit_distance(a, b).total
            dba = tree_edit_distance(b, a).total
            assert dab == dba
        for _ in range(100):
            a, b, c = (trees[rng.integers(0, len(trees))] for _ in range(3))
            assert (
                tree_edit_distance(a, c).total
                <= tree_edit_distance(a, b).total + tree_edit_distance(b, c).total
            )


class TestImageMetrics:
    def test_mse_identical_zero(self):
        img = np.random.default_rng(0).integers(0, 255, (20, 20)).astype(np.uint8)
        assert mse(img, img) == 0

    def test_mse_full_scale(self):
        a = np.zeros((8, 8), dtype=np.uint8)
        b = np.full((8, 8), 255, dtype=np.uint8)
        assert mse(a, b) == 255**2

    def test_mse_matches_two_loop_oracle_exactly(self):
        rng = np.random.default_rng(2)
        a = rng.integers(0, 255, (13, 17)).astype(np.uint8)
        b = rng.integers(0, 255, (13, 17)).astype(np.uint8)
        acc = 0.0
        for i in range(13):
            for j in range(17):
                d = int(a[i, j]) - int(b[i, j])
                acc += d * d
        assert mse(a, b) == acc / (13 * 17)

    def test_mse_shape_mismatch(self):
        with pytest.raises(ValueError):
            mse(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_ssim_identical_one(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            img = rng.integers(0, 255, (40, 40)).astype(np.uint8)
            assert ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    def test_ssim_inverted_low(self):
        rng = np.random.default_rng(4)
        img = rng.integers(0, 255, (64, 64)).astype(np.uint8)
        assert ssim(img, 255 - img) < 0.2

    def test_ssim_small_noise_high(self):
        rng = np.random.default_rng(5)
        img = np.full((64, 64), 128, dtype=np.float64)
        noisy = img + rng.normal(0, 2, img.shape)
        assert ssim(img, noisy) > 0.9


def exact_mw_p(x, y, alternative):
    """Enumeration oracle over all rank splits."""
    import itertools as it

    from sketch2site.metrics import _u_statistic

    pooled = np.concatenate([x, y])
    n1 = len(x)
    u_obs = _u_statistic(np.asarray(x, float), np.asarray(y, float))
    count = total = 0
    for idx in it.combinations(range(len(pooled)), n1):
        mask = np.zeros(len(pooled), dtype=bool)
        mask[list(idx)] = True
        u = _u_statistic(pooled[mask], pooled[~mask])
        total += 1
        if alternative == "less" and u <= u_obs:
            count += 1
        if alternative == "greater" and u >= u_obs:
            count += 1
    return count / total


class TestMannWhitney:
    def test_textbook_case(self):
        # x entirely below y: U=0, one-tailed exact p = 1/C(6,3) = 0.05
        res = mann_whitney_u([1, 2, 3], [4, 5, 6], "less")
        assert res.u == 0
        assert res.p_value == pytest.approx(0.05)

    def test_identical_samples_not_significant(self):
        res = mann_whitney_u([5, 5, 5, 5], [5, 5, 5, 5], "less")
        assert res.p_value >= 0.5

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0], "less")

    def test_exact_matches_oracle_small(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n1 = int(rng.integers(2, 5))
            n2 = int(rng.integers(2, 5))
            x = rng.integers(0, 6, n1).astype(float)
            y = rng.integers(0, 6, n2).astype(float)
            for alt in ("less", "greater"):
                got = mann_whitney_u(x, y, alt).p_value
                assert got == pytest.approx(exact_mw_p(x, y, alt))

    def test_approx_branch_close_to_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            n1 = int(rng.integers(1, 6))
            n2 = int(rng.integers(1, 6))
            x = rng.normal(0, 1, n1)
            y = rng.normal(0.5, 1, n2)
            for alt in ("less", "greater"):
                exact = mann_whitney_u(x, y, alt, method="exact").p_value
                approx = mann_whitney_u(x, y, alt, method="approx").p_value
                assert abs(approx - exact) <= 0.02

    def test_large_sample_approximation_sane(self):
        rng = np.random.default_rng(9)
        x = rng.normal(0, 1, 40)
        y = rng.normal(1.0, 1, 45)
        res = mann_whitney_u(x, y, "less")
        assert res.p_value < 0.01  # clearly shifted down


class TestCliffsDelta:
    def test_fully_separated(self):
        assert cliffs_delta([4, 5, 6], [1, 2, 3]) == 1.0

    def test_identical(self):
        assert cliffs_delta([1, 2, 3], [1, 2, 3]) == 0.0

    def test_hand_computed(self):
        assert cliffs_delta([1, 2], [1, 3]) == -0.25

    def test_matches_enumeration(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.integers(0, 10, int(rng.integers(1, 8))).astype(float)
            y = rng.integers(0, 10, int(rng.integers(1, 8))).astype(float)
            want = np.mean([np.sign(a - b) for a in x for b in y])
            assert cliffs_delta(x, y) == pytest.approx(want)
