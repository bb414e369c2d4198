# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled Turtle tokenizer.

Character-level state machine equivalent to ``_pyscan.tokenize``; token kinds
and error positions must stay in lockstep with that module.
"""

from .errors import TurtleSyntaxError, excerpt_at

cdef enum:
    IRI = 1
    PNAME = 2
    BNODE = 3
    STRING = 4
    LANGTAG = 5
    INTEGER = 6
    DECIMAL = 7
    DOUBLE = 8
    BOOLEAN = 9
    A = 10
    PREFIX_AT = 11
    BASE_AT = 12
    SPARQL_PREFIX = 13
    SPARQL_BASE = 14
    DOT = 15
    SEMI = 16
    COMMA = 17
    LBRACKET = 18
    RBRACKET = 19
    LPAREN = 20
    RPAREN = 21
    DTYPE = 22


cdef inline bint is_base(Py_UCS4 c):
    if c < 0x80:
        return (65 <= c <= 90) or (97 <= c <= 122)
    return ((0xC0 <= c <= 0xD6) or (0xD8 <= c <= 0xF6) or (0xF8 <= c <= 0x2FF)
            or (0x370 <= c <= 0x37D) or (0x37F <= c <= 0x1FFF) or (0x200C <= c <= 0x200D)
            or (0x2070 <= c <= 0x218F) or (0x2C00 <= c <= 0x2FEF) or (0x3001 <= c <= 0xD7FF)
            or (0xF900 <= c <= 0xFDCF) or (0xFDF0 <= c <= 0xFFFD) or (0x10000 <= c <= 0xEFFFF))


cdef inline bint is_u(Py_UCS4 c):
    return c == 95 or is_base(c)


cdef inline bint is_digit(Py_UCS4 c):
    return 48 <= c <= 57


cdef inline bint is_chars(Py_UCS4 c):
    return (is_u(c) or c == 45 or is_digit(c) or c == 0xB7
            or (0x300 <= c <= 0x36F) or (0x203F <= c <= 0x2040))


cdef inline bint is_hex(Py_UCS4 c):
    return is_digit(c) or (65 <= c <= 70) or (97 <= c <= 102)


cdef inline bint is_alpha(Py_UCS4 c):
    return (65 <= c <= 90) or (97 <= c <= 122)


cdef inline bint is_local_escape(Py_UCS4 c):
    return c in u"_~.-!$&'()*+,;=/?#@%"


cdef Py_ssize_t hex_run(str text, Py_ssize_t i, Py_ssize_t n, Py_ssize_t count):
    """Return i + count if count hex digits start at i, else -1."""
    cdef Py_ssize_t k
    if i + count > n:
        return -1
    for k in range(i, i + count):
        if not is_hex(text[k]):
            return -1
    return i + count


cdef Py_ssize_t escape_end(str text, Py_ssize_t i, Py_ssize_t n, bint iri_only):
    """End of the escape sequence whose backslash is at i, or -1."""
    cdef Py_UCS4 c
    if i + 1 >= n:
        return -1
    c = text[i + 1]
    if c == u'u':
        return hex_run(text, i + 2, n, 4)
    if c == u'U':
        return hex_run(text, i + 2, n, 8)
    if iri_only:
        return -1
    if c in u"tbnrf\"'\\":
        return i + 2
    return -1


cdef Py_ssize_t plx_end(str text, Py_ssize_t i, Py_ssize_t n):
    cdef Py_UCS4 c = text[i]
    if c == u'%':
        return hex_run(text, i + 1, n, 2)
    if c == u'\\':
        if i + 1 < n and is_local_escape(text[i + 1]):
            return i + 2
    return -1


cdef Py_ssize_t name_end(str text, Py_ssize_t i, Py_ssize_t n):
    """Scan (PN_CHARS | '.')* from i and drop trailing dots."""
    cdef Py_ssize_t good = i
    cdef Py_UCS4 c
    while i < n:
        c = text[i]
        if is_chars(c):
            i += 1
            good = i
        elif c == u'.':
            i += 1
        else:
            break
    return good


cdef Py_ssize_t local_end(str text, Py_ssize_t i, Py_ssize_t n):
    """End of PN_LOCAL starting at i (returns i when empty)."""
    cdef Py_ssize_t good = i
    cdef Py_ssize_t e
    cdef Py_UCS4 c
    if i >= n:
        return i
    c = text[i]
    if is_u(c) or c == u':' or is_digit(c):
        i += 1
    elif c == u'%' or c == u'\\':
        e = plx_end(text, i, n)
        if e < 0:
            return i
        i = e
    else:
        return i
    good = i
    while i < n:
        c = text[i]
        if is_chars(c) or c == u':':
            i += 1
            good = i
        elif c == u'.':
            i += 1
        elif c == u'%' or c == u'\\':
            e = plx_end(text, i, n)
            if e < 0:
                break
            i = e
            good = i
        else:
            break
    return good


cdef str unescape(str raw):
    cdef list out
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t n = len(raw)
    cdef Py_UCS4 c
    if u'\\' not in raw:
        return raw
    out = []
    while i < n:
        c = raw[i]
        if c != u'\\':
            out.append(c)
            i += 1
            continue
        c = raw[i + 1]
        if c == u'u':
            out.append(chr(int(raw[i + 2:i + 6], 16)))
            i += 6
        elif c == u'U':
            out.append(chr(int(raw[i + 2:i + 10], 16)))
            i += 10
        else:
            if c == u't':
                out.append(u'\t')
            elif c == u'b':
                out.append(u'\b')
            elif c == u'n':
                out.append(u'\n')
            elif c == u'r':
                out.append(u'\r')
            elif c == u'f':
                out.append(u'\f')
            else:
                out.append(c)
            i += 2
    return u"".join(out)


cdef str unescape_local(str raw):
    cdef list out
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t n = len(raw)
    if u'\\' not in raw:
        return raw
    out = []
    while i < n:
        if raw[i] == u'\\':
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(raw[i])
            i += 1
    return u"".join(out)


cdef Py_ssize_t exp_end(str text, Py_ssize_t i, Py_ssize_t n):
    cdef Py_ssize_t j
    if i >= n or (text[i] != u'e' and text[i] != u'E'):
        return -1
    j = i + 1
    if j < n and (text[j] == u'+' or text[j] == u'-'):
        j += 1
    if j >= n or not is_digit(text[j]):
        return -1
    while j < n and is_digit(text[j]):
        j += 1
    return j


def tokenize(str text):
    cdef list tokens = []
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t end, j, k, m, e
    cdef Py_ssize_t line = 1
    cdef Py_ssize_t line_start = 0
    cdef Py_ssize_t col, d1, frac
    cdef Py_UCS4 c, q
    cdef str word

    while pos < n:
        c = text[pos]
        col = pos - line_start + 1

        if c == u' ' or c == u'\t' or c == u'\r':
            pos += 1
            continue
        if c == u'\n':
            pos += 1
            line += 1
            line_start = pos
            continue
        if c == u'#':
            while pos < n and text[pos] != u'\n' and text[pos] != u'\r':
                pos += 1
            continue

        if c == u'<':
            j = pos + 1
            while True:
                if j >= n:
                    raise _error(text, u"unterminated IRI", line, col)
                q = text[j]
                if q == u'>':
                    break
                if q == u'\\':
                    e = escape_end(text, j, n, True)
                    if e < 0:
                        raise _error(text, u"invalid IRI escape", line, col)
                    j = e
                    continue
                if q <= 0x20 or q in u'<"{}|^`':
                    raise _error(text, u"invalid IRI character", line, col)
                j += 1
            tokens.append((IRI, unescape(text[pos + 1:j]), line, col))
            pos = j + 1
            continue

        if c == u'"' or c == u"'":
            if pos + 2 < n and text[pos + 1] == c and text[pos + 2] == c:
                j = pos + 3
                k = 0
                while True:
                    if j >= n:
                        raise _error(text, u"unterminated string", line, col)
                    q = text[j]
                    if q == u'\\':
                        e = escape_end(text, j, n, False)
                        if e < 0:
                            raise _error(text, u"invalid string escape", line, col)
                        j = e
                        continue
                    if q == c and j + 2 < n and text[j + 1] == c and text[j + 2] == c:
                        break
                    if q == u'\n':
                        k += 1
                        m = j + 1
                    j += 1
                tokens.append((STRING, unescape(text[pos + 3:j]), line, col))
                pos = j + 3
                if k:
                    line += k
                    line_start = m
                continue
            j = pos + 1
            while True:
                if j >= n:
                    raise _error(text, u"unterminated string", line, col)
                q = text[j]
                if q == c:
                    break
                if q == u'\n' or q == u'\r':
                    raise _error(text, u"unterminated string", line, col)
                if q == u'\\':
                    e = escape_end(text, j, n, False)
                    if e < 0:
                        raise _error(text, u"invalid string escape", line, col)
                    j = e
                    continue
                j += 1
            tokens.append((STRING, unescape(text[pos + 1:j]), line, col))
            pos = j + 1
            continue

        if c == u'@':
            j = pos + 1
            while j < n and is_alpha(text[j]):
                j += 1
            if j == pos + 1:
                raise _error(text, u"unexpected character '@'", line, col)
            while j + 1 < n and text[j] == u'-' and (is_alpha(text[j + 1]) or is_digit(text[j + 1])):
                j += 1
                while j < n and (is_alpha(text[j]) or is_digit(text[j])):
                    j += 1
            word = text[pos + 1:j]
            if word == u"prefix":
                tokens.append((PREFIX_AT, word, line, col))
            elif word == u"base":
                tokens.append((BASE_AT, word, line, col))
            else:
                tokens.append((LANGTAG, word, line, col))
            pos = j
            continue

        if is_digit(c) or c == u'+' or c == u'-' or c == u'.':
            j = pos
            if c == u'+' or c == u'-':
                j += 1
            k = j
            while k < n and is_digit(text[k]):
                k += 1
            d1 = k - j
            end = -1
            if k < n and text[k] == u'.':
                m = k + 1
                while m < n and is_digit(text[m]):
                    m += 1
                frac = m - (k + 1)
                e = exp_end(text, m, n) if (d1 > 0 or frac > 0) else -1
                if e >= 0:
                    tokens.append((DOUBLE, text[pos:e], line, col))
                    end = e
                elif frac > 0:
                    tokens.append((DECIMAL, text[pos:m], line, col))
                    end = m
                elif d1 > 0:
                    tokens.append((INTEGER, text[pos:k], line, col))
                    end = k
            elif d1 > 0:
                e = exp_end(text, k, n)
                if e >= 0:
                    tokens.append((DOUBLE, text[pos:e], line, col))
                    end = e
                else:
                    tokens.append((INTEGER, text[pos:k], line, col))
                    end = k
            if end >= 0:
                pos = end
                continue
            if c == u'.':
                tokens.append((DOT, u".", line, col))
                pos += 1
                continue
            raise _error(text, u"unexpected character %r" % c, line, col)

        if c == u'_':
            if pos + 2 < n and text[pos + 1] == u':' and (is_u(text[pos + 2]) or is_digit(text[pos + 2])):
                j = name_end(text, pos + 3, n)
                tokens.append((BNODE, text[pos + 2:j], line, col))
                pos = j
                continue
            raise _error(text, u"unexpected character '_'", line, col)

        if c == u':' or is_base(c):
            j = pos
            if c != u':':
                j = name_end(text, pos + 1, n)
            if j < n and text[j] == u':':
                k = local_end(text, j + 1, n)
                tokens.append((PNAME, unescape_local(text[pos:k]), line, col))
                pos = k
                continue
            word = text[pos:j]
            if word == u"a":
                tokens.append((A, word, line, col))
            elif word == u"true" or word == u"false":
                tokens.append((BOOLEAN, word, line, col))
            elif word.upper() == u"PREFIX":
                tokens.append((SPARQL_PREFIX, word, line, col))
            elif word.upper() == u"BASE":
                tokens.append((SPARQL_BASE, word, line, col))
            else:
                raise _error(text, u"unexpected word %r" % word, line, col)
            pos = j
            continue

        if c == u'^':
            if pos + 1 < n and text[pos + 1] == u'^':
                tokens.append((DTYPE, u"^^", line, col))
                pos += 2
                continue
            raise _error(text, u"unexpected character '^'", line, col)

        if c == u';':
            tokens.append((SEMI, u";", line, col))
        elif c == u',':
            tokens.append((COMMA, u",", line, col))
        elif c == u'[':
            tokens.append((LBRACKET, u"[", line, col))
        elif c == u']':
            tokens.append((RBRACKET, u"]", line, col))
        elif c == u'(':
            tokens.append((LPAREN, u"(", line, col))
        elif c == u')':
            tokens.append((RPAREN, u")", line, col))
        else:
            raise _error(text, u"unexpected character %r" % c, line, col)
        pos += 1

    return tokens


cdef object _error(str text, str message, Py_ssize_t line, Py_ssize_t col):
    return TurtleSyntaxError(message, line, col, excerpt_at(text, line))
