"""Output-directed programming engine for SVG designs."""

__version__ = "0.1.0"
