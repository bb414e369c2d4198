"""Generate, refine, validate and score ODRL usage policies."""

__version__ = "0.1.0"
