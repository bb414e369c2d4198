"""Pick the Turtle tokenizer at import time.

The compiled ``_scanner`` extension is used when it was built; otherwise the
regex implementation in ``_pyscan`` takes over.  Setting
``ODRLKIT_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _pyscan
from ._pyscan import (  # noqa: F401  (token kinds are re-exported)
    A,
    BASE_AT,
    BNODE,
    BOOLEAN,
    COMMA,
    DECIMAL,
    DOT,
    DOUBLE,
    DTYPE,
    INTEGER,
    IRI,
    LANGTAG,
    LBRACKET,
    LPAREN,
    PNAME,
    PREFIX_AT,
    RBRACKET,
    RPAREN,
    SEMI,
    SPARQL_BASE,
    SPARQL_PREFIX,
    STRING,
)

python_tokenize = _pyscan.tokenize

try:
    from ._scanner import tokenize as compiled_tokenize
except ImportError:  # extension not built
    compiled_tokenize = None

if compiled_tokenize is not None and os.environ.get("ODRLKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    tokenize = compiled_tokenize
    BACKEND = "cython"
else:
    tokenize = python_tokenize
    BACKEND = "python"
