"""Corpus evaluation: run a pipeline over a generated dataset and score it.

The report is line-delimited JSON (one record per sample, then a summary
block) so partial runs stay inspectable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .dsl import parse_file, dsl_to_tree
from .geometry import LayoutNode
from .metrics import MatchResult, macro_prf1, match_elements, mse, ssim, tree_edit_distance
from .raster import load_png, rgb_to_gray
from .synth.dataset import dataset_ids
from .synth.palette import DEFAULT_PALETTE
from .synth.render import render_normalized

Pipeline = Callable[[np.ndarray, str], LayoutNode]
"""A pipeline maps (sketch image, sample id) to a predicted layout tree."""


@dataclass
class SampleScore:
    sample_id: str
    counts: dict
    per_class_f1: dict
    macro_f1: float
    edits: dict
    mse: float
    ssim: float


@dataclass
class EvalReport:
    samples: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def macro_f1(self) -> float:
        return self.summary.get("macro_f1", 0.0)


def _leaves(tree: LayoutNode):
    return [(n.label.value, n.box) for n in tree.leaves()]


def _branch_boxes(tree: LayoutNode):
    return [(n.label.value, n.box) for n in tree.branches() if n is not tree and n.label is not None]


def evaluate_sample(pred: LayoutNode, truth: LayoutNode, norm_img, w_px: int, h_px: int):
    floor = (2 / w_px, 2 / h_px)
    matches = match_elements(
        _leaves(pred) + _branch_boxes(pred),
        _leaves(truth) + _branch_boxes(truth),
        tol=0.05,
        px_floor=floor,
    )
    per_class, macro = macro_prf1(matches)
    edits = tree_edit_distance(pred, truth)
    pred_render = render_normalized(pred, DEFAULT_PALETTE, w_px, h_px)
    gray_pred = rgb_to_gray(pred_render)
    gray_truth = rgb_to_gray(norm_img)
    return matches, per_class, macro, edits, mse(gray_pred, gray_truth), ssim(gray_pred, gray_truth)


def evaluate_corpus(
    pipeline: Pipeline,
    dataset_dir,
    out_path=None,
) -> EvalReport:
    """Score ``pipeline`` over every sample in ``dataset_dir``."""
    root = Path(dataset_dir)
    ids = dataset_ids(root)
    if not ids:
        raise FileNotFoundError(f"no samples under {root}")

    report = EvalReport()
    agg = MatchResult()
    edit_totals = []
    lines = []
    for sample_id in ids:
        truth = dsl_to_tree(parse_file(root / f"{sample_id}.truth.wire.json"))
        sketch = load_png(root / f"{sample_id}.sketch.png")
        if sketch.ndim == 3:
            sketch = rgb_to_gray(sketch)
        sketch = sketch > 127 if sketch.dtype != bool else sketch
        norm_img = load_png(root / f"{sample_id}.norm.png")
        h_px, w_px = sketch.shape

        pred = pipeline(sketch, sample_id)
        matches, per_class, macro, edits, sample_mse, sample_ssim = evaluate_sample(
            pred, truth, norm_img, w_px, h_px
        )
        for cls in matches.classes():
            agg.add(agg.tp, cls, matches.tp.get(cls, 0))
            agg.add(agg.fp, cls, matches.fp.get(cls, 0))
            agg.add(agg.fn, cls, matches.fn.get(cls, 0))
        edit_totals.append(edits.total)

        score = SampleScore(
            sample_id=sample_id,
            counts={
                "tp": dict(matches.tp),
                "fp": dict(matches.fp),
                "fn": dict(matches.fn),
            },
            per_class_f1={cls: round(v[2], 4) for cls, v in per_class.items()},
            macro_f1=round(macro[2], 4),
            edits={
                "insertions": edits.insertions,
                "deletions": edits.deletions,
                "substitutions": edits.substitutions,
                "total": edits.total,
            },
            mse=round(sample_mse, 4),
            ssim=round(sample_ssim, 6),
        )
        report.samples.append(score)
        lines.append(json.dumps({"kind": "sample", **score.__dict__}, sort_keys=True))

    per_class, macro = macro_prf1(agg)
    report.summary = {
        "samples": len(ids),
        "per_class": {
            cls: {"precision": round(v[0], 4), "recall": round(v[1], 4), "f1": round(v[2], 4)}
            for cls, v in per_class.items()
        },
        "macro_precision": round(macro[0], 4),
        "macro_recall": round(macro[1], 4),
        "macro_f1": round(macro[2], 4),
        "edit_total_median": float(np.median(edit_totals)),
        "edit_total_mean": round(float(np.mean(edit_totals)), 3),
        "mse_mean": round(float(np.mean([s.mse for s in report.samples])), 3),
        "ssim_mean": round(float(np.mean([s.ssim for s in report.samples])), 5),
    }
    lines.append(json.dumps({"kind": "summary", **report.summary}, sort_keys=True))

    if out_path is not None:
        Path(out_path).write_text("\n".join(lines) + "\n")
    return report


def oracle_pipeline(dataset_dir) -> Pipeline:
    """Returns the ground truth; the evaluation's upper bound."""
    root = Path(dataset_dir)

    def run(_sketch, sample_id):
        return dsl_to_tree(parse_file(root / f"{sample_id}.truth.wire.json"))

    return run


def control_pipeline(dataset_dir) -> Pipeline:
    """Returns a different sample's truth; the study's control arm."""
    root = Path(dataset_dir)
    ids = dataset_ids(root)

    def run(_sketch, sample_id):
        pos = ids.index(sample_id)
        other = ids[(pos + 1) % len(ids)]
        return dsl_to_tree(parse_file(root / f"{other}.truth.wire.json"))

    return run


def detection_pipeline(params, cfg=None) -> Pipeline:
    """The real recognizer, entering after capture (sketches are clean)."""
    from .pipeline import tree_from_sketch

    def run(sketch, _sample_id):
        return tree_from_sketch(sketch, params, cfg)

    return run
