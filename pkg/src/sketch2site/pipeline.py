"""End-to-end compilation: photo (or sketch) -> layout tree -> DSL."""

from __future__ import annotations

from pathlib import Path

from .capture import capture_page
from .config import DEFAULT_CONFIG, PipelineConfig
from .detect import detect_all
from .dsl import DslNode, tree_to_dsl
from .geometry import LayoutNode, to_relative
from .hierarchy import build_tree, normalize_layout
from .mlp import MlpParams, classify_tree, load_checkpoint
from .raster import BinaryImage, load_png, morphology
from .synth.sketch import as_gray_sketch


def detections_to_tree(elements, containers, page_w: int, page_h: int, cfg: PipelineConfig):
    items = [(det.label, to_relative(det.box, page_w, page_h)) for det in elements]
    items += [(None, to_relative(box, page_w, page_h)) for box in containers]
    return build_tree(items, cfg.tree)


def tree_from_sketch(
    sketch: BinaryImage,
    params: MlpParams,
    cfg: PipelineConfig | None = None,
) -> LayoutNode:
    """Detection onward, for already-clean binary sketches (no capture).

    No dilation here: it exists to fuse Canny double edges on the photo
    path, and would only bridge the clearances of clean strokes.
    """
    cfg = cfg or DEFAULT_CONFIG
    gray = as_gray_sketch(sketch)
    elements, containers = detect_all(gray, sketch, cfg.detect)
    h, w = sketch.shape
    tree = detections_to_tree(elements, containers, w, h, cfg)
    tree = classify_tree(params, tree)
    return normalize_layout(tree, cfg.tree)


def tree_from_photo(
    photo,
    params: MlpParams,
    cfg: PipelineConfig | None = None,
) -> LayoutNode:
    cfg = cfg or DEFAULT_CONFIG
    gray, edges = capture_page(photo, cfg.capture)
    elements, containers = detect_all(gray, edges, cfg.detect)
    h, w = edges.shape
    tree = detections_to_tree(elements, containers, w, h, cfg)
    tree = classify_tree(params, tree)
    return normalize_layout(tree, cfg.tree)


def run_pipeline(
    input_image_path,
    mlp_checkpoint,
    cfg: PipelineConfig | None = None,
) -> DslNode:
    """The paper pipeline: crop, detect, build, classify, normalize, emit."""
    cfg = cfg or DEFAULT_CONFIG
    params = mlp_checkpoint if isinstance(mlp_checkpoint, MlpParams) else load_checkpoint(mlp_checkpoint)
    image = load_png(Path(input_image_path))
    if image.ndim == 2 or image.dtype == bool:
        sketch = image > 0 if image.dtype != bool else image
        tree = tree_from_sketch(sketch, params, cfg)
    else:
        tree = tree_from_photo(image, params, cfg)
    return tree_to_dsl(tree)
