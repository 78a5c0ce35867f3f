"""Exact integer and F_p linear algebra on small dense matrices.

Matrices are lists of rows of Python ints.  Everything here is exact; the
matrices that come out of graded pieces are tiny, so clarity wins over speed.
"""

from fractions import Fraction


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b, inner=None):
    if not a:
        return []
    if inner is None:
        inner = len(b)
    ncols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(ncols)]
            for i in range(len(a))]


def vecmat(x, m, ncols):
    """Row vector times matrix (entries may be Fractions)."""
    out = [0] * ncols
    for xi, row in zip(x, m):
        if xi:
            for j in range(ncols):
                if row[j]:
                    out[j] += xi * row[j]
    return out


def smith_normal_form(matrix, ncols=None):
    """Return ``(U, D, V)`` with ``U @ matrix @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative
    entries and each diagonal entry divides the next.  ``ncols`` is only
    needed when ``matrix`` has no rows.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else (ncols or 0)
    D = [[int(v) for v in row] for row in matrix]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        swap_rows(i, t)
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        swap_cols(j, t)
                        changed = True
            if changed:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(D[i][j] % D[t][t] for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return U, D, V


def invariant_factors(matrix, ncols=None):
    """Nonzero diagonal of the Smith normal form, in divisibility order."""
    _, D, _ = smith_normal_form(matrix, ncols)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def in_row_lattice(rows, x, p=None):
    """Decide whether ``x`` lies in the row lattice of ``rows``.

    With ``p`` given the lattice is tensored with the p-local integers, so
    coefficients may have denominators prime to ``p``.
    """
    n = len(x)
    if not rows:
        return not any(x)
    U, D, V = smith_normal_form(rows, n)
    y = vecmat(x, V, n)
    rank = sum(1 for i in range(min(len(D), n)) if D[i][i])
    for i, yi in enumerate(y):
        if i >= rank:
            if yi:
                return False
            continue
        d = D[i][i]
        if p is None:
            if yi % d:
                return False
        elif p_valuation(yi, p) < p_valuation(d, p):
            return False
    return True


def p_valuation(n, p):
    """Exponent of ``p`` in the nonzero integer (or Fraction) ``n``; zero maps to infinity."""
    if n == 0:
        return float("inf")
    n = Fraction(n)
    num, den = abs(n.numerator), n.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def echelon_basis(rows, ncols):
    """Integer row-echelon basis of the row lattice (unimodular row operations).

    Returns ``(basis, pivots)``; pivot entries are positive and pivot columns
    strictly increase.
    """
    work = [list(r) for r in rows if any(r)]
    basis = []
    pivots = []
    r = 0
    for col in range(ncols):
        while True:
            live = [i for i in range(r, len(work)) if work[i][col]]
            if not live:
                break
            best = min(live, key=lambda i: abs(work[i][col]))
            work[r], work[best] = work[best], work[r]
            clean = True
            for i in range(r + 1, len(work)):
                if work[i][col]:
                    q = work[i][col] // work[r][col]
                    work[i] = [a - q * b for a, b in zip(work[i], work[r])]
                    if work[i][col]:
                        clean = False
            if clean:
                break
        if r < len(work) and work[r][col]:
            if work[r][col] < 0:
                work[r] = [-v for v in work[r]]
            pivots.append(col)
            r += 1
    basis = work[:r]
    return basis, pivots


def solve_in_basis(basis, pivots, x):
    """Coordinates ``z`` (Fractions) with ``z @ basis == x``, or None."""
    n = len(x)
    residual = [Fraction(v) for v in x]
    z = []
    for row, col in zip(basis, pivots):
        c = residual[col] / row[col]
        z.append(c)
        if c:
            residual = [a - c * b for a, b in zip(residual, row)]
    if any(residual[j] for j in range(n)):
        return None
    return z


def row_reduce_mod_p(rows, p):
    """Reduced echelon form over F_p; returns list of nonzero rows."""
    work = [[v % p for v in r] for r in rows]
    out = []
    ncols = len(work[0]) if work else 0
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(work)) if work[i][col]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = pow(work[r][col], -1, p)
        work[r] = [(v * inv) % p for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[r])]
        r += 1
    out = work[:r]
    return out


def rank_mod_p(rows, p):
    return len(row_reduce_mod_p(rows, p)) if rows else 0
