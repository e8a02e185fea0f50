import numpy as np

from sketch2site.contours import approx_polygon, contour_children, polygon_area, trace_contours


def rect_outline(h, w, y0, x0, hh, ww):
    img = np.zeros((h, w), dtype=bool)
    img[y0, x0 : x0 + ww] = True
    img[y0 + hh - 1, x0 : x0 + ww] = True
    img[y0 : y0 + hh, x0] = True
    img[y0 : y0 + hh, x0 + ww - 1] = True
    return img


class TestTrace:
    def test_empty_image(self):
        assert trace_contours(np.zeros((10, 10), bool)) == []

    def test_filled_square_single_outer(self):
        img = np.zeros((20, 20), dtype=bool)
        img[5:15, 4:16] = True
        cs = trace_contours(img)
        assert len(cs) == 1
        assert cs[0].is_outer and cs[0].parent is None
        assert cs[0].bbox == (4, 5, 12, 10)

    def test_hollow_ring_outer_plus_hole(self):
        img = np.zeros((9, 9), dtype=bool)
        img[2:7, 2:7] = True
        img[3:6, 3:6] = False
        cs = trace_contours(img)
        assert len(cs) == 2
        outer = [c for c in cs if c.is_outer]
        holes = [c for c in cs if not c.is_outer]
        assert len(outer) == 1 and len(holes) == 1
        assert holes[0].parent == cs.index(outer[0])

    def test_nested_hierarchy(self):
        img = rect_outline(30, 30, 2, 2, 26, 26)
        img[10:20, 10:20] = True  # solid block inside the ring
        cs = trace_contours(img)
        kinds = [(c.is_outer, c.parent) for c in cs]
        # ring outer, ring hole (parent ring), block outer (parent hole)
        assert (True, None) in kinds
        hole_idx = next(i for i, c in enumerate(cs) if not c.is_outer)
        block = next(c for c in cs if c.is_outer and c.parent is not None)
        assert block.parent == hole_idx

    def test_points_are_8_connected(self):
        rng = np.random.default_rng(6)
        img = rng.random((30, 30)) > 0.7
        for c in trace_contours(img):
            pts = c.points
            if len(pts) < 2:
                continue
            steps = np.abs(np.diff(pts, axis=0))
            assert (steps.max(axis=1) <= 1).all()

    def test_deterministic_scan_order(self):
        rng = np.random.default_rng(12)
        img = rng.random((40, 40)) > 0.8
        a = trace_contours(img)
        b = trace_contours(img)
        assert len(a) == len(b)
        for ca, cb in zip(a, b):
            assert np.array_equal(ca.points, cb.points)
            assert (ca.is_outer, ca.parent) == (cb.is_outer, cb.parent)

    def test_single_pixel_contour(self):
        img = np.zeros((5, 5), bool)
        img[2, 3] = True
        cs = trace_contours(img)
        assert len(cs) == 1
        assert np.array_equal(cs[0].points, [[3, 2]])


class TestApprox:
    def test_rectangle_four_vertices(self):
        img = np.zeros((40, 60), bool)
        img[5:35, 10:50] = True
        c = trace_contours(img)[0]
        assert len(approx_polygon(c, 0.02)) == 4

    def test_rectangle_with_notch_still_four(self):
        img = np.zeros((40, 60), bool)
        img[5:35, 10:50] = True
        img[5, 30] = False  # 1 px notch on the top edge
        c = trace_contours(img)[0]
        assert len(approx_polygon(c, 0.02)) == 4

    def test_triangle_three_vertices(self):
        img = np.zeros((50, 50), bool)
        for y in range(8, 40):
            half = (y - 8) * 2 // 3
            img[y, 25 - half : 25 + half + 1] = True
        c = trace_contours(img)[0]
        assert len(approx_polygon(c, 0.02)) == 3

    def test_degenerate_contour_unchanged(self):
        pts = np.array([[3, 3], [4, 3]], dtype=np.int32)
        assert np.array_equal(approx_polygon(pts, 0.02), pts)

    def test_random_rectangles_recovered(self):
        # 100 random rectangles: 4 vertices, bbox within 1 px
        rng = np.random.default_rng(42)
        for _ in range(100):
            h, w = int(rng.integers(40, 90)), int(rng.integers(40, 120))
            y0, x0 = int(rng.integers(2, 10)), int(rng.integers(2, 10))
            hh, ww = int(rng.integers(12, h - y0 - 2)), int(rng.integers(12, w - x0 - 2))
            img = np.zeros((h, w), bool)
            img[y0 : y0 + hh, x0 : x0 + ww] = True
            c = trace_contours(img)[0]
            poly = approx_polygon(c, 0.02)
            assert len(poly) == 4
            bx0, by0 = poly[:, 0].min(), poly[:, 1].min()
            bx1, by1 = poly[:, 0].max(), poly[:, 1].max()
            assert abs(bx0 - x0) <= 1 and abs(by0 - y0) <= 1
            assert abs(bx1 - (x0 + ww - 1)) <= 1 and abs(by1 - (y0 + hh - 1)) <= 1


def test_polygon_area_square():
    poly = np.array([[0, 0], [10, 0], [10, 10], [0, 10]])
    assert polygon_area(poly) == 100.0


def test_contour_children_index():
    img = np.zeros((9, 9), dtype=bool)
    img[2:7, 2:7] = True
    img[3:6, 3:6] = False
    cs = trace_contours(img)
    kids = contour_children(cs)
    outer_idx = next(i for i, c in enumerate(cs) if c.is_outer)
    assert kids[outer_idx] == [1 - outer_idx]
