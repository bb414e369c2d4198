"""Access to the data files shipped inside the package."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent / "data"
ONTOLOGY_FILE = DATA_DIR / "ontology" / "ODRL22.ttl"
TEMPLATES_DIR = DATA_DIR / "templates"
RULES_FILE = DATA_DIR / "rules" / "scr.yaml"
SHAPES_DIR = DATA_DIR / "shapes"
USE_CASES_FILE = DATA_DIR / "use_cases.yaml"
GOLD_DIR = DATA_DIR / "gold"
REPLAY_DIR = DATA_DIR / "replay"
BENCH_DIR = DATA_DIR / "bench"


def ontology_text() -> str:
    return ONTOLOGY_FILE.read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def odrl_ontology():
    """The bundled ODRL 2.2 ontology, parsed once per process."""
    from .rdf import parse_turtle

    return parse_turtle(ontology_text())
