# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_elim_py``: fraction-free sparse elimination.

Same contract and same deterministic reduction order as the pure kernel;
entries are arbitrary-precision Python ints, the speedup comes from typed
loop bookkeeping and avoiding interpreter dispatch in the inner update.
"""

from math import gcd

KERNEL_NAME = "cython"


cdef dict _normalize(dict row):
    if not row:
        return row
    cdef object g = 0
    cdef object v
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if row[min(row)] < 0:
        g = -g
    if g != 0 and g != 1:
        return {c: v // g for c, v in row.items()}
    return row


def echelon(rows):
    """Reduce integer rows to row-echelon form; see ``_elim_py.echelon``."""
    cdef dict basis = {}
    cdef dict row, piv, new
    cdef object a, b, g, ma, mb, c, col, v, w
    for orig in rows:
        if not orig:
            continue
        row = _normalize(dict(orig))
        while row:
            c = min(row)
            piv = basis.get(c)
            if piv is None:
                basis[c] = _normalize(row)
                break
            a = piv[c]
            b = row[c]
            g = gcd(a, b)
            ma = a // g
            mb = b // g
            new = {}
            for col, v in row.items():
                new[col] = v * ma
            for col, v in piv.items():
                w = new.get(col, 0) - v * mb
                if w:
                    new[col] = w
                elif col in new:
                    del new[col]
            row = new
    pivots = sorted(basis)
    return pivots, [basis[c] for c in pivots]


def rank(rows):
    """Rank of the integer row list."""
    return len(echelon(rows)[0])
