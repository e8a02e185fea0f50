"""Tunable pipeline parameters with JSON file round-tripping.

Defaults are the values the shipped pipeline is calibrated against; a
config file can override any subset.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


@dataclass
class CaptureConfig:
    white_lo: tuple = (0.0, 0.0, 160.0)   # HSV lows for the white page band
    white_hi: tuple = (360.0, 60.0, 255.0)
    page_median: int = 9                   # large blur that fills pen strokes
    page_canny_lo: float = 50.0
    page_canny_hi: float = 150.0
    page_dilate: int = 3
    approx_eps: float = 0.02
    min_page_area_frac: float = 0.10
    sketch_median: int = 3
    sketch_canny_lo: float = 50.0
    sketch_canny_hi: float = 150.0
    sketch_fuse: int = 5
    max_side: int = 1024


@dataclass
class DetectConfig:
    approx_eps: float = 0.02
    closed_area_ratio: float = 0.5         # polygon/bbox area floor for "closed"
    image_triangle_majority: float = 0.5
    paragraph_line_aspect: float = 0.15
    paragraph_len_tol: float = 0.25
    paragraph_min_lines: int = 3
    paragraph_gap_len_frac: float = 0.35   # merge gap cap as fraction of line length
    paragraph_gap_page_frac: float = 0.045
    input_aspect: float = 0.3
    button_area_ratio: float = 1.5
    button_ratio_mode: str = "area"        # "area" or "dimension"
    swt_max_stroke: int = 24
    swt_angle_tol_dot: float = -0.866      # cos(pi - pi/6)
    text_min_height: int = 8
    text_max_height_frac: float = 0.30
    letter_aspect_max: float = 8.0
    letter_var_ratio: float = 0.75     # stroke-width std <= ratio * mean
    connect_width_ratio: float = 3.0
    group_stroke_ratio: float = 2.0
    group_height_ratio: float = 2.0
    group_gap_stroke_mult: float = 3.0
    text_final_aspect: float = 0.8
    canny_lo: float = 50.0
    canny_hi: float = 150.0
    dedupe_iou: float = 0.9
    spur_px: int = 5                       # dead-end branch length to prune


@dataclass
class TreeConfig:
    containment_tol: float = 0.01
    overlap_attach_frac: float = 0.5
    snap_eps: float = 0.003


@dataclass
class PipelineConfig:
    capture: CaptureConfig = field(default_factory=CaptureConfig)
    detect: DetectConfig = field(default_factory=DetectConfig)
    tree: TreeConfig = field(default_factory=TreeConfig)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True))

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text())
        cfg = cls()
        for section_field in fields(cls):
            section = getattr(cfg, section_field.name)
            for key, value in raw.get(section_field.name, {}).items():
                if not hasattr(section, key):
                    raise ValueError(f"unknown config key {section_field.name}.{key}")
                if isinstance(getattr(section, key), tuple):
                    value = tuple(value)
                setattr(section, key, value)
        return cfg


DEFAULT_CONFIG = PipelineConfig()
