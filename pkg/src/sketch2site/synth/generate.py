"""Procedural ground-truth page layouts.

Substitutes the crawled website corpus: every tree is a plausible page
(optional header and footer, rows/stacks/forms in between) with sibling
boxes nested-or-disjoint at a configurable minimum gap.  The container
mix follows the crawl's observed counts (rows and stacks dominate, forms
are rare).

Conventions the rest of the pipeline relies on:

* title and paragraph leaves span their parent's inner width,
* titles and buttons keep the locked pixel aspect of their glyph
  canvases so aspect-preserving sketch scaling still fills the box,
* paragraphs stacked above one another get extra clearance so their
  line groups never merge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import BBox, ContainerClass, ElementClass, LayoutNode, page_root
from .glyphs import BUTTON_ASPECT, TITLE_ASPECT

# paper-reported container counts, normalized (rows 4830, stacks 4192,
# footers 1459, headers 1388, forms 562)
PAPER_CONTAINER_DISTRIBUTION = {
    ContainerClass.ROW: 0.389,
    ContainerClass.STACK: 0.337,
    ContainerClass.FOOTER: 0.117,
    ContainerClass.HEADER: 0.112,
    ContainerClass.FORM: 0.045,
}


class LayoutError(Exception):
    """The config cannot be satisfied (gaps or minimum sizes too large)."""


@dataclass
class LayoutConfig:
    min_gap: float = 0.015          # clearance between sibling boxes
    min_dim: float = 0.03           # smallest element extent per dimension
    page_aspect: float = 0.8        # render target W/H; pixel aspect -> relative
    margin: float = 0.02
    pad: float = 0.015              # container inner padding
    jitter_pad: float = 0.03        # extra padding per unit of container size
    header_prob: float = 0.55
    footer_prob: float = 0.55
    sections_lo: int = 2
    sections_hi: int = 4
    bare_leaf_prob: float = 0.22
    nest_prob: float = 0.12
    paragraph_gap: float = 0.05     # stacked paragraph clearance
    body_weights: dict = field(
        default_factory=lambda: {
            ContainerClass.ROW: 0.48,
            ContainerClass.STACK: 0.44,
            ContainerClass.FORM: 0.08,
        }
    )

    @property
    def rel_title_aspect(self) -> float:
        return TITLE_ASPECT * self.page_aspect

    @property
    def rel_button_aspect(self) -> float:
        return BUTTON_ASPECT * self.page_aspect


def easy_corpus_config() -> LayoutConfig:
    """The evaluation corpus: well separated, no tiny elements."""
    return LayoutConfig(min_gap=0.03, min_dim=0.04, nest_prob=0.08)


def _snap(v: float) -> float:
    return round(v, 4)


def _leaf(label: ElementClass, x, y, w, h) -> LayoutNode:
    return LayoutNode(label, BBox(_snap(x), _snap(y), _snap(w), _snap(h)))


def _branch(label, x, y, w, h, children) -> LayoutNode:
    return LayoutNode(label, BBox(_snap(x), _snap(y), _snap(w), _snap(h)), children)


def _button(rng, cfg: LayoutConfig, x, y, max_w, max_h):
    a = cfg.rel_button_aspect
    # floor keeps glyph downscaling mild enough that the boxed text survives
    w_min = max(cfg.min_dim / a, 0.19)
    w_max = min(max_w, max_h / a, 0.26)
    if w_max < w_min:
        return None
    w = rng.uniform(w_min, w_max)
    return _leaf(ElementClass.BUTTON, x, y, w, a * w)


def _image(rng, cfg: LayoutConfig, x, y, max_w, max_h, square=False):
    if max_w < cfg.min_dim or max_h < cfg.min_dim:
        return None
    px_aspect = rng.uniform(0.8, 1.2) if square else rng.uniform(0.5, 1.3)
    a = px_aspect * cfg.page_aspect
    w_min = max(cfg.min_dim, cfg.min_dim / a)
    w_max = min(max_w, max_h / a)
    if w_max < w_min:
        return None
    w = rng.uniform(w_min, w_max)
    return _leaf(ElementClass.IMAGE, x, y, w, a * w)


def _input(rng, cfg: LayoutConfig, x, y, w, max_h):
    a_lo = max(0.10, cfg.min_dim / (cfg.page_aspect * w))
    a_hi = min(0.22, max_h / (cfg.page_aspect * w))
    if a_hi < a_lo or w < 0.18:
        return None
    a = rng.uniform(a_lo, a_hi)
    return _leaf(ElementClass.INPUT, x, y, w, a * cfg.page_aspect * w)


def _title(cfg: LayoutConfig, x, y, w):
    h = cfg.rel_title_aspect * w
    if h < cfg.min_dim:
        return None
    return _leaf(ElementClass.TITLE, x, y, w, h)


def _paragraph(rng, cfg: LayoutConfig, x, y, w, max_h):
    h_max = min(0.10, 0.8 * cfg.page_aspect * w, max_h)
    if h_max < cfg.min_dim or w < 0.12:
        return None
    h = rng.uniform(cfg.min_dim, h_max)
    return _leaf(ElementClass.PARAGRAPH, x, y, w, h)


def _pads(cfg: LayoutConfig, w_est: float, h_est: float) -> tuple[float, float]:
    """Inner padding wide enough that +-2.5% jitter of the container box
    never lands its stroke on a child's."""
    return cfg.pad + cfg.jitter_pad * w_est, cfg.pad + cfg.jitter_pad * h_est


def _button_bar(rng, cfg: LayoutConfig, label, y: float | None, with_logo: bool):
    """A header/footer: buttons (and maybe a logo image) left to right."""
    x0 = cfg.margin
    w = 1 - 2 * cfg.margin
    inner_h = rng.uniform(max(cfg.min_dim, 0.055), 0.075)
    pad_x, pad_y = _pads(cfg, w, inner_h + 2 * cfg.pad)
    children = []
    x = x0 + pad_x
    box_y = y if y is not None else 0.0  # placeholder until height known
    cy = box_y + pad_y
    if with_logo:
        logo = _image(rng, cfg, x, cy, 0.1, inner_h, square=True)
        if logo is not None:
            children.append(logo)
            x = logo.box.right + rng.uniform(cfg.min_gap, 0.06)
    n_buttons = int(rng.integers(2, 5))
    for _ in range(n_buttons):
        btn = _button(rng, cfg, x, cy, min(0.26, x0 + w - pad_x - x), inner_h)
        if btn is None:
            break
        children.append(btn)
        x = btn.box.right + rng.uniform(cfg.min_gap, 0.05)
    if len(children) < 2:
        return None
    content_h = max(c.box.h for c in children)
    box_h = content_h + 2 * pad_y
    return _branch(label, x0, box_y, w, box_h, children)


def _shift_tree(node: LayoutNode, dy: float) -> None:
    node.box = BBox(node.box.x, _snap(node.box.y + dy), node.box.w, node.box.h)
    for child in node.children:
        _shift_tree(child, dy)


def _make_row(rng, cfg: LayoutConfig, x0, y0, max_w, max_h, depth) -> LayoutNode | None:
    if depth > 0:
        w = max_w
    elif max_w < 0.55:
        return None
    else:
        w = rng.uniform(max(0.55, max_w * 0.7), max_w)
    pad_x, pad_y = _pads(cfg, w, 0.2)
    inner_h = min(max_h - 2 * pad_y, rng.uniform(0.06, 0.18))
    if inner_h < cfg.min_dim:
        return None
    k = int(rng.integers(2, 5))
    for attempt_k in range(k, 1, -1):
        inner_w = w - 2 * pad_x
        slot_w = (inner_w - (attempt_k - 1) * cfg.min_gap) / attempt_k
        if slot_w < max(cfg.min_dim, 0.11):
            continue
        children = []
        x = x0 + pad_x
        cy = y0 + pad_y
        ok = True
        for i in range(attempt_k):
            choices = ["image", "button"]
            if slot_w >= 0.18:
                choices.append("input")
            if depth == 0 and cfg.nest_prob > 0 and slot_w >= 0.25 and rng.random() < cfg.nest_prob:
                nested = _make_stack(rng, cfg, x, cy, slot_w, inner_h, depth + 1)
                if nested is not None:
                    children.append(nested)
                    x += slot_w + cfg.min_gap
                    continue
            kind = choices[int(rng.integers(0, len(choices)))]
            child = None
            if kind == "image":
                child = _image(rng, cfg, x, cy, slot_w, inner_h)
            elif kind == "button":
                child = _button(rng, cfg, x, cy, slot_w, inner_h)
            elif kind == "input":
                child = _input(rng, cfg, x, cy, slot_w * rng.uniform(0.85, 1.0), inner_h)
            if child is None:
                child = _image(rng, cfg, x, cy, slot_w, inner_h)
            if child is None:
                ok = False
                break
            children.append(child)
            x += slot_w + cfg.min_gap
        if not ok or len(children) < 2:
            continue
        content_h = max(c.box.bottom for c in children) - y0 - pad_y
        return _branch(ContainerClass.ROW, x0, y0, w, content_h + 2 * pad_y, children)
    return None


def _make_stack(rng, cfg: LayoutConfig, x0, y0, max_w, max_h, depth) -> LayoutNode | None:
    hi = min(max_w, 0.55)
    if depth > 0:
        w = max_w
    elif hi < 0.35:
        return None
    else:
        w = rng.uniform(0.35, hi)
    pad_x, pad_y = _pads(cfg, w, min(max_h, 0.4))
    inner_w = w - 2 * pad_x
    if inner_w < 0.2:
        return None
    k = int(rng.integers(2, 4))
    children = []
    y = y0 + pad_y
    cx = x0 + pad_x
    prev_kind = None
    for i in range(k):
        remaining = (y0 + max_h - pad_y) - y
        if remaining < cfg.min_dim:
            break
        if i == 0 and rng.random() < 0.8:
            kind = "title" if rng.random() < 0.45 else "paragraph"
        elif depth == 0 and inner_w >= 0.35 and rng.random() < cfg.nest_prob:
            kind = "row"
        else:
            kind = ["paragraph", "image", "button"][int(rng.integers(0, 3))]
        gap = cfg.paragraph_gap if (kind == "paragraph" and prev_kind == "paragraph") else cfg.min_gap
        if children:
            y = children[-1].box.bottom + gap
            remaining = (y0 + max_h - pad_y) - y
            if remaining < cfg.min_dim:
                break
        child = None
        if kind == "title":
            child = _title(cfg, cx, y, inner_w)
            if child is not None and child.box.h > remaining:
                child = None
        elif kind == "paragraph":
            child = _paragraph(rng, cfg, cx, y, inner_w, remaining)
        elif kind == "image":
            child = _image(rng, cfg, cx + inner_w * 0.1, y, inner_w * 0.8, remaining)
        elif kind == "button":
            child = _button(rng, cfg, cx, y, inner_w, remaining)
        elif kind == "row":
            child = _make_row(rng, cfg, cx, y, inner_w, remaining, depth + 1)
        if child is None:
            continue
        children.append(child)
        prev_kind = kind
    if len(children) < 2:
        return None
    h = children[-1].box.bottom + pad_y - y0
    return _branch(ContainerClass.STACK, x0, y0, w, h, children)


def _make_form(rng, cfg: LayoutConfig, x0, y0, max_w, max_h) -> LayoutNode | None:
    w = rng.uniform(max(0.4, max_w * 0.6), min(max_w, 0.7))
    pad_x, pad_y = _pads(cfg, w, min(max_h, 0.4))
    inner_w = w - 2 * pad_x
    if inner_w < 0.25:
        return None
    field_w = inner_w * rng.uniform(0.8, 0.97)
    want_button = rng.random() < 0.7

    # fit the fields to the slot height up front instead of running out
    for k in (3, 2):
        usable = max_h - 2 * pad_y - (k - 1) * cfg.min_gap
        if want_button:
            usable -= cfg.min_gap + cfg.rel_button_aspect * 0.19
        budget = usable / k
        a_hi = min(0.22, budget / (cfg.page_aspect * field_w))
        a_lo = max(0.10, cfg.min_dim / (cfg.page_aspect * field_w))
        if a_hi < a_lo:
            continue
        children = []
        y = y0 + pad_y
        cx = x0 + pad_x
        a = rng.uniform(a_lo, a_hi)
        for _ in range(k):
            children.append(_leaf(ElementClass.INPUT, cx, y, field_w, a * cfg.page_aspect * field_w))
            y = children[-1].box.bottom + cfg.min_gap
        if want_button:
            remaining = (y0 + max_h - pad_y) - y
            btn = _button(rng, cfg, cx, y, min(inner_w, field_w - 0.05), remaining)
            if btn is not None:
                children.append(btn)
        h = children[-1].box.bottom + pad_y - y0
        return _branch(ContainerClass.FORM, x0, y0, w, h, children)
    return None


def _bare_leaf(rng, cfg: LayoutConfig, y0, max_h, previous_kind) -> LayoutNode | None:
    inner_w = 1 - 2 * cfg.margin
    kind = ["image", "paragraph", "title"][int(rng.integers(0, 3))]
    if kind == "paragraph" and previous_kind == "paragraph":
        kind = "image"  # full-width paragraph blocks need clearance
    if kind == "image":
        node = _image(rng, cfg, 0, y0, 0.6, max_h)
        if node is not None:
            x = _snap(rng.uniform(cfg.margin, 1 - cfg.margin - node.box.w))
            node.box = BBox(x, node.box.y, node.box.w, node.box.h)
        return node
    if kind == "paragraph":
        return _paragraph(rng, cfg, cfg.margin, y0, inner_w, max_h)
    node = _title(cfg, cfg.margin, y0, inner_w)
    if node is not None and node.box.h > max_h:
        return None
    return node


def gen_layout(seed: int, config: LayoutConfig | None = None) -> LayoutNode:
    """Deterministic random page tree for ``seed``."""
    cfg = config or LayoutConfig()
    rng = np.random.default_rng(seed)

    children: list[LayoutNode] = []
    top = cfg.margin
    bottom = 1 - cfg.margin
    section_gap = max(cfg.min_gap, 0.025)

    if rng.random() < cfg.header_prob:
        header = _button_bar(rng, cfg, ContainerClass.HEADER, top, with_logo=rng.random() < 0.3)
        if header is not None:
            children.append(header)
            top = header.box.bottom + section_gap
    if rng.random() < cfg.footer_prob:
        footer = _button_bar(rng, cfg, ContainerClass.FOOTER, None, with_logo=False)
        if footer is not None:
            _shift_tree(footer, 1 - cfg.margin - footer.box.h)
            children.append(footer)
            bottom = footer.box.y - section_gap

    band = bottom - top
    min_section = 0.08
    n_sections = int(rng.integers(cfg.sections_lo, cfg.sections_hi + 1))
    while n_sections > cfg.sections_lo and band < n_sections * min_section + (n_sections - 1) * section_gap:
        n_sections -= 1
    if band < n_sections * min_section + (n_sections - 1) * section_gap:
        raise LayoutError(
            f"page band of {band:.3f} cannot host {n_sections} sections at gap {section_gap:.3f}"
        )

    weights = rng.uniform(0.7, 1.6, n_sections)
    usable = band - (n_sections - 1) * section_gap
    heights = np.maximum(min_section, weights / weights.sum() * usable)
    heights *= usable / heights.sum()

    kinds = list(cfg.body_weights)
    probs = np.array([cfg.body_weights[k] for k in kinds], dtype=float)
    probs /= probs.sum()

    # decide section content up front so a form can claim the tallest slot
    plans = []
    for _ in heights:
        if rng.random() < cfg.bare_leaf_prob:
            plans.append("leaf")
        else:
            plans.append(kinds[int(rng.choice(len(kinds), p=probs))])
    heights = list(heights)
    if ContainerClass.FORM in plans:
        form_at = plans.index(ContainerClass.FORM)
        tallest = int(np.argmax(heights))
        heights[form_at], heights[tallest] = heights[tallest], heights[form_at]

    y = top
    previous_kind = None
    for height, plan in zip(heights, plans):
        slot_h = float(height)
        node = None
        if plan == "leaf":
            node = _bare_leaf(rng, cfg, y, slot_h, previous_kind)
            previous_kind = node.label.value if node is not None else previous_kind
        if node is None and plan != "leaf":
            kind = plan
            max_w = 1 - 2 * cfg.margin
            if kind is ContainerClass.FORM:
                node = _make_form(rng, cfg, 0, y, max_w, slot_h)
                if node is not None:
                    x0 = rng.uniform(cfg.margin, 1 - cfg.margin - node.box.w)
                    _shift_tree_x(node, _snap(x0) - node.box.x)
                else:
                    kind = ContainerClass.ROW  # short slots still host a row
            if kind is ContainerClass.ROW:
                x0 = cfg.margin + rng.uniform(0, max(0.0, max_w - 0.9) / 2)
                node = _make_row(rng, cfg, x0, y, min(max_w - (x0 - cfg.margin) * 2, max_w), slot_h, 0)
            elif kind is ContainerClass.STACK:
                node = _make_stack(rng, cfg, 0, y, max_w, slot_h, 0)
                if node is not None:
                    x0 = rng.uniform(cfg.margin, 1 - cfg.margin - node.box.w)
                    dx = _snap(x0) - node.box.x
                    _shift_tree_x(node, dx)
            previous_kind = None
        if node is not None:
            children.append(node)
            y = node.box.bottom + section_gap
        else:
            y += slot_h * 0.5 + section_gap

    root = page_root(children)
    root.sort_recursive()
    return root


def _shift_tree_x(node: LayoutNode, dx: float) -> None:
    node.box = BBox(_snap(node.box.x + dx), node.box.y, node.box.w, node.box.h)
    for child in node.children:
        _shift_tree_x(child, dx)
