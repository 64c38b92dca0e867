"""Integer Smith normal form, used to read off abelian invariants.

Classic pivot algorithm with exact integer arithmetic: pick the nonzero
entry of least magnitude, move it to the pivot position, reduce its row and
column by division with remainder until it divides everything it meets, then
recurse on the remaining minor.  Finally the diagonal is fixed up so each
entry divides the next.  Matrices here are small (relator count x generator
count of a subgroup presentation), so no care is taken to limit coefficient
growth beyond the usual smallest-pivot heuristic.
"""

from __future__ import annotations


def smith_diagonal(matrix):
    """Diagonal of the Smith normal form of an integer matrix.

    ``matrix`` is a list of rows; the result is a list of nonnegative
    integers of length min(rows, cols) with the divisibility chain
    d1 | d2 | ... (trailing zeros included).
    """
    m = [list(row) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    t = 0
    while t < rows and t < cols:
        # locate the entry of least nonzero magnitude in the minor
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = m[i][j]
                if v and (pivot is None or abs(v) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        m[t], m[i0] = m[i0], m[t]
        for row in m:
            row[t], row[j0] = row[j0], row[t]
        while True:
            # clear the pivot column
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    for j in range(t, cols):
                        m[i][j] -= q * m[t][j]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        dirty = True
            # clear the pivot row
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for i in range(t, rows):
                        m[i][j] -= q * m[i][t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        dirty = True
            if not dirty:
                break
        # make the pivot divide the whole remaining minor
        stray = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % m[t][t]:
                    stray = i
                    break
            if stray is not None:
                break
        if stray is not None:
            for j in range(t, cols):
                m[t][j] += m[stray][j]
            continue
        diag.append(abs(m[t][t]))
        t += 1
    diag.extend([0] * (min(rows, cols) - len(diag)))
    return diag
