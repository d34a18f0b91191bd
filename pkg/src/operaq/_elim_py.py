"""Pure-Python fraction-free sparse Gaussian elimination over the integers.

Rows are dicts {column index: nonzero int}.  All routines are exact and
deterministic: rows are folded one by one into an incremental echelon basis
keyed by pivot column (smallest live column of the row).  The compiled twin
in ``_elim_cy`` implements the same contract.
"""

from math import gcd

KERNEL_NAME = "python"


def _normalize(row):
    """Divide a row by the gcd of its entries (sign fixed by leading entry)."""
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        return {c: v // g for c, v in row.items()}
    return row


def echelon(rows):
    """Reduce integer rows to row-echelon form.

    Returns (pivots, reduced) where pivots is the sorted list of pivot
    columns and reduced the corresponding echelon rows (same order).
    """
    basis = {}  # pivot column -> row
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
            a, b = piv[c], row[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
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
