"""Dataset materialization: sample directories and container training rows.

Directory layout per sample index NNNN:
    NNNN.truth.wire.json   canonical DSL of the ground-truth tree
    NNNN.norm.png          normalized (class-colored) rendering
    NNNN.sketch.png        synthetic hand sketch
plus one shared ``corpus/<class>/<k>.png`` glyph bank.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..dsl import tree_to_dsl, write_file
from ..geometry import ContainerClass
from ..mlp import CHILD_CLASSES, CHILD_SLOTS, ContainerFeatures, ELEMENT_ORDER, featurize
from ..raster import save_png
from .generate import LayoutConfig, gen_layout
from .glyphs import GlyphCorpus, build_corpus, save_corpus
from .palette import DEFAULT_PALETTE, LabelPalette
from .render import render_normalized
from .sketch import SketchParams, sketch_render


def gen_dataset(
    out_dir,
    count: int,
    seed: int = 0,
    config: LayoutConfig | None = None,
    corpus: GlyphCorpus | None = None,
    palette: LabelPalette = DEFAULT_PALETTE,
    w_px: int = 512,
    h_px: int = 640,
    jitter: float = 0.025,
) -> list[Path]:
    """Write ``count`` samples; returns the truth file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = corpus or build_corpus()
    save_corpus(corpus, out / "corpus")

    truths = []
    for i in range(count):
        tree = gen_layout(seed + i, config)
        truth_path = out / f"{i:04d}.truth.wire.json"
        write_file(tree_to_dsl(tree), truth_path)
        save_png(render_normalized(tree, palette, w_px, h_px), out / f"{i:04d}.norm.png")
        sketch = sketch_render(tree, corpus, SketchParams(jitter=jitter, seed=seed + i), w_px, h_px)
        save_png(sketch, out / f"{i:04d}.sketch.png")
        truths.append(truth_path)
    return truths


def dataset_ids(dataset_dir) -> list[str]:
    root = Path(dataset_dir)
    return sorted(p.name.split(".")[0] for p in root.glob("*.truth.wire.json"))


# ---------------------------------------------------------------------------
# container training data
# ---------------------------------------------------------------------------


def gen_container_dataset(
    seed: int,
    n_per_class: int,
    config: LayoutConfig | None = None,
) -> list[tuple[ContainerFeatures, ContainerClass]]:
    """Balanced (features, label) rows harvested from generated layouts.

    Layouts themselves follow the natural container mix; collection keeps
    drawing pages until every class reaches its quota.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    wanted = {cls: n_per_class for cls in ContainerClass if cls is not ContainerClass.PAGE}
    rows: list[tuple[ContainerFeatures, ContainerClass]] = []
    page_seed = seed
    # forms are ~4.5% of containers, so the page budget is generous
    for _ in range(n_per_class * 400):
        if all(v == 0 for v in wanted.values()):
            break
        tree = gen_layout(page_seed, config)
        page_seed += 1
        for node in tree.branches():
            if node is tree or wanted.get(node.label, 0) == 0:
                continue
            rows.append((featurize(node), node.label))
            wanted[node.label] -= 1
    missing = {k.value: v for k, v in wanted.items() if v > 0}
    if missing:
        raise RuntimeError(f"could not fill container quota: {missing}")
    return rows


def save_container_csv(rows, path) -> None:
    """CSV export: label, 4 geometry reals, 50 child class codes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for features, label in rows:
            codes = features.children.argmax(axis=1)
            codes = [0 if c == CHILD_CLASSES - 1 else int(c) + 1 for c in codes]
            writer.writerow([label.value, *[f"{v:.6f}" for v in features.geom], *codes])


def load_container_csv(path) -> list[tuple[ContainerFeatures, ContainerClass]]:
    rows = []
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            label = ContainerClass(record[0])
            geom = np.array([float(v) for v in record[1:5]], dtype=np.float64)
            codes = [int(v) for v in record[5 : 5 + CHILD_SLOTS]]
            children = np.zeros((CHILD_SLOTS, CHILD_CLASSES), dtype=np.float64)
            for slot, code in enumerate(codes):
                children[slot, CHILD_CLASSES - 1 if code == 0 else code - 1] = 1.0
            rows.append((ContainerFeatures(geom=geom, children=children), label))
    return rows
