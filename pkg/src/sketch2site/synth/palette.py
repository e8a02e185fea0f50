"""Class color/id assignments for normalized page rendering."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..geometry import ContainerClass, ElementClass, NodeLabel

_DEFAULT_COLORS: dict[NodeLabel, tuple[int, int, int]] = {
    ElementClass.TITLE: (0xFF, 0x00, 0x00),
    ElementClass.PARAGRAPH: (0x00, 0xFF, 0x00),
    ElementClass.BUTTON: (0x00, 0x00, 0xFF),
    ElementClass.INPUT: (0x00, 0xFF, 0xFF),
    ElementClass.IMAGE: (0xFF, 0x00, 0xFF),
    ContainerClass.HEADER: (0x80, 0x80, 0x00),
    ContainerClass.FOOTER: (0x00, 0x00, 0x80),
    ContainerClass.ROW: (0xFF, 0xA5, 0x00),
    ContainerClass.STACK: (0x00, 0x80, 0x80),
    ContainerClass.FORM: (0x80, 0x00, 0x80),
}

_ID_ORDER: tuple[NodeLabel, ...] = (
    ElementClass.TITLE,
    ElementClass.PARAGRAPH,
    ElementClass.BUTTON,
    ElementClass.INPUT,
    ElementClass.IMAGE,
    ContainerClass.HEADER,
    ContainerClass.FOOTER,
    ContainerClass.ROW,
    ContainerClass.STACK,
    ContainerClass.FORM,
)


@dataclass(frozen=True)
class LabelPalette:
    """Mapping class -> RGB fill and class -> segmentation id (1..10).

    Id 0 is the background. Colors must stay pairwise separated by at
    least 64 in some channel so extraction can threshold exactly.
    """

    colors: dict = field(default_factory=lambda: dict(_DEFAULT_COLORS))

    def __post_init__(self):
        labels = list(self.colors)
        for i, a in enumerate(labels):
            for b in labels[i + 1 :]:
                ca, cb = self.colors[a], self.colors[b]
                if max(abs(x - y) for x, y in zip(ca, cb)) < 64:
                    raise ValueError(f"palette colors too close: {a} vs {b}")

    def color(self, label: NodeLabel) -> tuple[int, int, int]:
        return self.colors[label]

    def label_id(self, label: NodeLabel) -> int:
        return _ID_ORDER.index(label) + 1

    def label_for_color(self, rgb) -> NodeLabel | None:
        for label, color in self.colors.items():
            if tuple(rgb) == color:
                return label
        return None

    @property
    def drawable_labels(self) -> list[NodeLabel]:
        return list(self.colors)


DEFAULT_PALETTE = LabelPalette()
