"""The intermediate layout DSL: a JSON tree of typed, relatively
positioned nodes, plus its translation to HTML.

Canonical form: keys sorted, fractions fixed to 6 decimals.  Canonical
text is byte-stable, which the broadcast protocol and golden tests rely
on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .geometry import BBox, ContainerClass, ElementClass, LayoutNode

ELEMENT_TYPES = {c.value for c in ElementClass}
CONTAINER_TYPES = {c.value for c in ContainerClass}
KNOWN_TYPES = ELEMENT_TYPES | CONTAINER_TYPES


class DslError(ValueError):
    """Malformed DSL text or document."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass
class DslNode:
    type: str
    x: float
    y: float
    width: float
    height: float
    left_padding: float = 0.0
    top_padding: float = 0.0
    contains: list["DslNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.contains:
            yield from child.walk()

    def leaf_count(self) -> int:
        return sum(1 for n in self.walk() if not n.contains and n.type in ELEMENT_TYPES)


# ---------------------------------------------------------------------------
# tree <-> DSL
# ---------------------------------------------------------------------------


def tree_to_dsl(tree: LayoutNode) -> DslNode:
    """Structure-preserving mapping; paddings are derived from geometry."""

    def convert(node: LayoutNode, parent_box: BBox, prev_bottom: float | None) -> DslNode:
        box = node.box
        doc = DslNode(
            type=node.label.value,
            x=box.x,
            y=box.y,
            width=box.w,
            height=box.h,
            left_padding=box.x - parent_box.x,
            top_padding=box.y - (prev_bottom if prev_bottom is not None else parent_box.y),
        )
        last_bottom = None
        for child in node.children:
            doc.contains.append(convert(child, box, last_bottom))
            last_bottom = child.box.bottom
        return doc

    root = convert(tree, tree.box, None)
    root.left_padding = 0.0
    root.top_padding = 0.0
    return root


def dsl_to_tree(doc: DslNode) -> LayoutNode:
    label = _label_for(doc.type)
    return LayoutNode(label, BBox(doc.x, doc.y, doc.width, doc.height), [dsl_to_tree(c) for c in doc.contains])


def _label_for(type_name: str):
    if type_name in ELEMENT_TYPES:
        return ElementClass(type_name)
    if type_name in CONTAINER_TYPES:
        return ContainerClass(type_name)
    raise DslError(f"unknown node type {type_name!r}")


# ---------------------------------------------------------------------------
# codec
# ---------------------------------------------------------------------------

_NUM_FIELDS = ("x", "y", "width", "height", "left_padding", "top_padding")


def serialize(doc: DslNode) -> str:
    """Canonical text: sorted keys, fixed 6-decimal fractions."""

    def emit(node: DslNode) -> str:
        fields = {name: f"{getattr(node, name):.6f}" for name in _NUM_FIELDS}
        fields["contains"] = "[" + ", ".join(emit(c) for c in node.contains) + "]"
        fields["type"] = json.dumps(node.type)
        body = ", ".join(f'"{k}": {v}' for k, v in sorted(fields.items()))
        return "{" + body + "}"

    return emit(doc) + "\n"


def parse(text: str) -> DslNode:
    """Parse DSL text in any field order; reject unknown types."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise DslError(f"malformed DSL: {err.msg}", offset=err.pos) from err
    return _from_obj(raw)


def _from_obj(obj) -> DslNode:
    if not isinstance(obj, dict):
        raise DslError(f"DSL node must be an object, got {type(obj).__name__}")
    if "type" not in obj:
        raise DslError("DSL node is missing 'type'")
    type_name = obj["type"]
    if type_name not in KNOWN_TYPES:
        raise DslError(f"unknown node type {type_name!r}")
    try:
        node = DslNode(
            type=type_name,
            x=float(obj.get("x", 0.0)),
            y=float(obj.get("y", 0.0)),
            width=float(obj.get("width", 0.0)),
            height=float(obj.get("height", 0.0)),
            left_padding=float(obj.get("left_padding", 0.0)),
            top_padding=float(obj.get("top_padding", 0.0)),
        )
    except (TypeError, ValueError) as err:
        raise DslError(f"bad numeric field in DSL node: {err}") from err
    contains = obj.get("contains", [])
    if not isinstance(contains, list):
        raise DslError("'contains' must be a list")
    node.contains = [_from_obj(c) for c in contains]
    return node


def parse_file(path) -> DslNode:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def write_file(doc: DslNode, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(doc))


# ---------------------------------------------------------------------------
# HTML emission
# ---------------------------------------------------------------------------

_LEAF_TAGS = {
    "image": "img",
    "title": "h1",
    "paragraph": "p",
    "button": "button",
    "input": "input",
}
_SEMANTIC_TAGS = {"header": "header", "footer": "footer"}

_STYLE = """\
body { margin: 0; }
.page { position: relative; width: 100%; min-height: 100vh; }
.page div, .page header, .page footer { box-sizing: border-box; }
img.placeholder { background: #d0d0d0; object-fit: cover; }
"""


def _pct(v: float) -> str:
    return f"{v * 100:.4f}%"


def emit_html(doc: DslNode) -> str:
    """One standalone HTML document realizing the DSL geometry."""

    def node_style(node: DslNode, parent: DslNode) -> str:
        # geometry realized as percentages of the parent box
        w = node.width / parent.width if parent.width else 0.0
        h = node.height / parent.height if parent.height else 0.0
        left = node.left_padding / parent.width if parent.width else 0.0
        top = node.top_padding / parent.height if parent.height else 0.0
        return (
            f"width: {_pct(w)}; height: {_pct(h)}; "
            f"margin-left: {_pct(left)}; margin-top: {_pct(top)};"
        )

    def render(node: DslNode, parent: DslNode, indent: int) -> list[str]:
        pad = "  " * indent
        style = node_style(node, parent)
        if node.type in _LEAF_TAGS:
            tag = _LEAF_TAGS[node.type]
            if tag == "img":
                return [f'{pad}<img class="placeholder" alt="image placeholder" style="{style}">']
            if tag == "input":
                return [f'{pad}<input type="text" style="{style}">']
            text = {"h1": "Title", "p": "Paragraph text", "button": "Button"}[tag]
            return [f'{pad}<{tag} style="{style}">{text}</{tag}>']
        tag = _SEMANTIC_TAGS.get(node.type, "div")
        cls = f' class="{node.type}"' if tag == "div" else ""
        lines = [f"{pad}<{tag}{cls} style=\"{style}\">"]
        for child in node.contains:
            lines.extend(render(child, node, indent + 1))
        lines.append(f"{pad}</{tag}>")
        return lines

    body: list[str] = ['  <div class="page">']
    for child in doc.contains:
        body.extend(render(child, doc, 2))
    body.append("  </div>")

    return "\n".join(
        [
            "<!DOCTYPE html>",
            "<html>",
            "<head>",
            '<meta charset="utf-8">',
            "<title>Generated wireframe</title>",
            "<style>",
            _STYLE.rstrip(),
            "</style>",
            "</head>",
            "<body>",
            *body,
            "</body>",
            "</html>",
            "",
        ]
    )
