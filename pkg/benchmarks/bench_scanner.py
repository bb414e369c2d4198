"""Compare the compiled and pure-Python Turtle tokenizers.

    python3 benchmarks/bench_scanner.py [--repeat 20]

Inputs are the bundled ODRL ontology and the gold policies concatenated. The
two backends must produce identical token streams before anything is timed.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import timeit

from odrlkit.rdf import lexer
from odrlkit.resources import GOLD_DIR, ontology_text


def corpora() -> dict:
    gold = "\n".join(p.read_text(encoding="utf-8") for p in sorted(GOLD_DIR.glob("*.ttl")))
    return {"ontology": ontology_text(), "gold policies": gold}


def measure(fn, text: str, repeat: int) -> float:
    runs = timeit.repeat(lambda: fn(text), number=1, repeat=repeat)
    return statistics.median(runs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Tokenizer benchmark")
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args(argv)
    if lexer.compiled_tokenize is None:
        print("compiled scanner is not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1
    print(f"{'input':15s} {'chars':>8s} {'tokens':>7s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, text in corpora().items():
        tokens = lexer.python_tokenize(text)
        if lexer.compiled_tokenize(text) != tokens:
            print(f"{name}: token streams differ", file=sys.stderr)
            return 1
        py = measure(lexer.python_tokenize, text, args.repeat)
        cy = measure(lexer.compiled_tokenize, text, args.repeat)
        print(f"{name:15s} {len(text):8d} {len(tokens):7d} {py * 1e3:10.2f} {cy * 1e3:10.2f} {py / cy:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
