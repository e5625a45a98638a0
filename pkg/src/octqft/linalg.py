"""Dense exact linear algebra over the coefficient fields.

Sizes here are desk scale (a few hundred rows at most), so everything is
straightforward Gaussian elimination.  Three flavours are provided:

* generic elimination over a Field object (Fractions or residues),
* a vectorised numpy path for ranks over a prime field (exact integer
  arithmetic mod p; no floating point anywhere),
* fraction-free Bareiss solving for integer matrices over Q, used by the
  free-module decomposers where the raw Fraction path would be slow.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .field import PrimeField

# largest prime below 2^31; (p-1)^2 plus slack stays inside int64
SHADOW_PRIME = 2147483629


class SingularMatrixError(ArithmeticError):
    """A solve expected an invertible system and did not get one."""


def rank(rows: list[list], field) -> int:
    """Rank by exact Gaussian elimination; ``rows`` is consumed as scratch."""
    if isinstance(field, PrimeField):
        return rank_mod_p(rows, field.p)
    m = [[x if isinstance(x, Fraction) else Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        prow = m[r]
        pval = prow[c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f == 0:
                continue
            ratio = f / pval
            row = m[i]
            for j in range(c, ncols):
                row[j] = row[j] - ratio * prow[j]
        r += 1
        if r == len(m):
            break
    return r


def rank_mod_p(rows: list[list[int]] | np.ndarray, p: int) -> int:
    """Rank over F_p, vectorised with int64 arithmetic (exact)."""
    if isinstance(rows, np.ndarray):
        a = rows.astype(np.int64) % p
    else:
        if not rows:
            return 0
        a = np.array(rows, dtype=np.int64) % p
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = a[r] * inv % p
        below = a[r + 1:, c]
        mask = below != 0
        if mask.any():
            a[r + 1:][mask] = (a[r + 1:][mask] - np.outer(below[mask], a[r])) % p
        r += 1
    return r


def solve_field(a_rows: list[list], rhs_cols: list[list], field) -> list[list]:
    """Solve A X = B over a field for square invertible A.

    ``rhs_cols`` is a list of right-hand-side column vectors; the result is
    the list of solution columns.  Raises SingularMatrixError when A is not
    invertible.
    """
    n = len(a_rows)
    k = len(rhs_cols)
    aug = [list(a_rows[i]) + [rhs_cols[j][i] for j in range(k)] for i in range(n)]
    width = n + k
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not field.is_zero(aug[i][c]):
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("system is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = field.inv(aug[c][c])
        row = aug[c]
        for j in range(c, width):
            row[j] = field.mul(row[j], inv)
        for i in range(n):
            if i == c:
                continue
            f = aug[i][c]
            if field.is_zero(f):
                continue
            tgt = aug[i]
            for j in range(c, width):
                tgt[j] = field.sub(tgt[j], field.mul(f, row[j]))
    return [[aug[i][n + j] for i in range(n)] for j in range(k)]


def _clear_denominators(rows: list[list[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale a rational matrix row-wise... no: globally, to integers."""
    lcm = 1
    for row in rows:
        for x in row:
            d = x.denominator if isinstance(x, Fraction) else 1
            if d != 1:
                g = _gcd(lcm, d)
                lcm = lcm // g * d
    out = [[int(x * lcm) if isinstance(x, Fraction) else int(x) * lcm for x in row]
           for row in rows]
    return out, lcm


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def bareiss_solve(a_rows: list[list], rhs_cols: list[list]) -> list[list[Fraction]]:
    """Solve A X = B exactly over Q for square invertible A.

    Fraction-free forward elimination (Bareiss) on integer-scaled data keeps
    the intermediate entries as big ints, which is markedly faster than
    Fraction pivoting at the sizes the decomposers produce.
    """
    n = len(a_rows)
    if n == 0:
        return [[] for _ in rhs_cols]
    k = len(rhs_cols)
    a_int, a_scale = _clear_denominators([list(r) for r in a_rows])
    b_int, b_scale = _clear_denominators(
        [[rhs_cols[j][i] for j in range(k)] for i in range(n)])
    m = [a_int[i] + b_int[i] for i in range(n)]
    width = n + k
    prev = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("system is singular")
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
        pval = m[c][c]
        prow = m[c]
        for i in range(c + 1, n):
            row = m[i]
            f = row[c]
            for j in range(c + 1, width):
                row[j] = (pval * row[j] - f * prow[j]) // prev
            row[c] = 0
        prev = pval
    # back substitution with exact rational arithmetic
    cols: list[list[Fraction]] = []
    scale = Fraction(a_scale, b_scale)
    for j in range(k):
        x: list[Fraction] = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            s = Fraction(m[i][n + j])
            for t in range(i + 1, n):
                s -= m[i][t] * x[t]
            x[i] = s / m[i][i]
        cols.append([v * scale for v in x])
    return cols


class SquareSolver:
    """Cached exact solver for a fixed square system over Q or F_p.

    solve(rhs) returns the solution column; inverse_rows(indices) returns the
    selected rows of A^{-1}, which is all the operation tables need to read
    off single coordinates of a decomposition cheaply.
    """

    def __init__(self, a_rows: list[list], field):
        self.field = field
        self.n = len(a_rows)
        self._rows = [list(r) for r in a_rows]
        self._inv_rows_cache: dict[int, list] = {}

    def solve(self, rhs: list) -> list:
        if isinstance(self.field, PrimeField):
            return solve_field(self._rows, [rhs], self.field)[0]
        return bareiss_solve(self._rows, [rhs])[0]

    def inverse_rows(self, indices: list[int]) -> list[list]:
        missing = [i for i in indices if i not in self._inv_rows_cache]
        if missing:
            # row i of A^{-1} is the solution of A^T w = e_i
            at = [[self._rows[r][c] for r in range(self.n)] for c in range(self.n)]
            units = []
            for i in missing:
                e = [self.field.zero] * self.n
                e[i] = self.field.one
                units.append(e)
            if isinstance(self.field, PrimeField):
                sols = solve_field(at, units, self.field)
            else:
                sols = bareiss_solve(at, units)
            for i, w in zip(missing, sols):
                self._inv_rows_cache[i] = w
        return [self._inv_rows_cache[i] for i in indices]
