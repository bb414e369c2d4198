"""Recompute the reference SHACL results for the mutation corpus.

    python3 tests/freeze_shacl_oracle.py

Writes tests/data/shacl_oracle.json. test_shacl checks the frozen file
against a live reference run, so the file cannot drift silently.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import mutation_corpus  # noqa: E402
from oracles import reference_validate  # noqa: E402

from odrlkit.resources import odrl_ontology  # noqa: E402
from odrlkit.shacl import load_shapes_graph  # noqa: E402

ORACLE_FILE = Path(__file__).resolve().parent / "data" / "shacl_oracle.json"


def encode(conforms, keys) -> dict:
    return {
        "conforms": conforms,
        "results": [[f.n3(), p.n3() if p is not None else None, c] for f, p, c in keys],
    }


def compute() -> dict:
    shapes, ontology = load_shapes_graph(), odrl_ontology()
    return {fid: encode(*reference_validate(g, shapes, ontology)) for fid, _, _, g in mutation_corpus()}


def main() -> int:
    ORACLE_FILE.parent.mkdir(parents=True, exist_ok=True)
    frozen = compute()
    ORACLE_FILE.write_text(json.dumps(frozen, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{len(frozen)} fixtures -> {ORACLE_FILE}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
