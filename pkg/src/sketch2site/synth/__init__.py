"""Procedural dataset machinery: layouts, normalized renders, sketches."""

from .dataset import (
    dataset_ids,
    gen_container_dataset,
    gen_dataset,
    load_container_csv,
    save_container_csv,
)
from .generate import LayoutConfig, LayoutError, PAPER_CONTAINER_DISTRIBUTION, easy_corpus_config, gen_layout
from .glyphs import Glyph, GlyphCorpus, build_corpus, load_corpus, save_corpus
from .palette import DEFAULT_PALETTE, LabelPalette
from .photo import render_photo, sketch_to_page
from .render import extract_structure, render_normalized
from .sketch import SketchParams, sketch_render

__all__ = [
    "DEFAULT_PALETTE",
    "Glyph",
    "GlyphCorpus",
    "LabelPalette",
    "LayoutConfig",
    "LayoutError",
    "PAPER_CONTAINER_DISTRIBUTION",
    "SketchParams",
    "build_corpus",
    "dataset_ids",
    "easy_corpus_config",
    "extract_structure",
    "gen_container_dataset",
    "gen_dataset",
    "gen_layout",
    "load_container_csv",
    "load_corpus",
    "render_normalized",
    "render_photo",
    "save_container_csv",
    "save_corpus",
    "sketch_render",
    "sketch_to_page",
]
