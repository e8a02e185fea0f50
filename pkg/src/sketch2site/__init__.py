"""sketch2site: hand-drawn wireframe photos -> layout DSL -> HTML, live."""

__version__ = "0.1.0"
