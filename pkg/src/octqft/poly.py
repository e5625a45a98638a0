"""Exact multivariate polynomials with a weighted (cohomological) grading.

A ring context fixes an ordered list of variables, each carrying a positive
weight, and a coefficient field.  Monomials are exponent tuples aligned with
the variable list; the term order is graded reverse lexicographic on the
weighted degree, so printed output is deterministic.

Besides the ring arithmetic this module houses the two constructions the
operation modules lean on: telescoping divided-difference splits (writing
f(u) - f(v) as an exact combination of the differences u_j - v_j) and exact
determinants of polynomial matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


Monomial = tuple  # exponent vector aligned with PolyRing.variables


class RingMismatchError(ValueError):
    """Operands do not share a ring context."""


class NonDivisibleError(ArithmeticError):
    """Exact division was requested but the divisor does not divide."""


class DegreeError(ValueError):
    """A degree-preservation contract was violated."""


class CertificateError(RuntimeError):
    """An internal re-verification identity failed (engine bug)."""


@dataclass(frozen=True)
class Variable:
    """A graded variable; ``block`` tags the tensor factor or family."""

    name: str
    degree: int
    block: int = 0

    def __post_init__(self):
        if self.degree <= 0:
            raise DegreeError(f"variable {self.name} needs positive degree")

    def __repr__(self):
        return self.name


class PolyRing:
    """Ordered variable list with weights over a fixed coefficient field."""

    __slots__ = ("field", "variables", "_index", "_by_name", "_weights",
                 "_mono_cache", "_sig")

    def __init__(self, field, variables: Sequence[Variable]):
        variables = tuple(variables)
        index: dict[Variable, int] = {}
        by_name: dict[str, Variable] = {}
        for i, v in enumerate(variables):
            if v in index:
                raise ValueError(f"duplicate variable {v.name} (block {v.block})")
            index[v] = i
            if v.name in by_name:
                by_name[v.name] = None  # ambiguous across blocks
            else:
                by_name[v.name] = v
        self.field = field
        self.variables = variables
        self._index = index
        self._by_name = by_name
        self._weights = tuple(v.degree for v in variables)
        self._mono_cache: dict[int, tuple] = {}
        self._sig = (field, variables)

    # -- identity ------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, PolyRing) and other._sig == self._sig

    def __hash__(self):
        return hash(self._sig)

    def __repr__(self):
        vs = ", ".join(f"{v.name}:{v.degree}" for v in self.variables)
        return f"PolyRing({self.field!r}; {vs})"

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def var_index(self, v: Variable) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise RingMismatchError(f"{v!r} is not a variable of {self!r}") from None

    def variable(self, name: str, block: int | None = None) -> Variable:
        if block is None:
            v = self._by_name.get(name)
            if v is None:
                raise KeyError(f"no unique variable named {name!r} in ring")
            return v
        for v in self.variables:
            if v.name == name and v.block == block:
                return v
        raise KeyError(f"no variable {name!r} in block {block}")

    # -- element constructors -------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: self.field.one})

    def const(self, c) -> "Polynomial":
        c = self.field.of(c)
        if self.field.is_zero(c):
            return self.zero()
        return Polynomial(self, {(0,) * self.nvars: c})

    def gen(self, v: Variable) -> "Polynomial":
        i = self.var_index(v)
        mono = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, {mono: self.field.one})

    # -- monomial helpers -------------------------------------------------
    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * w for e, w in zip(mono, self._weights))

    def term_key(self, mono: Monomial):
        # graded reverse lexicographic: higher weighted degree wins, ties
        # broken by the smaller exponent at the last differing position.
        return (self.monomial_degree(mono),) + tuple(-e for e in reversed(mono))

    def mono_mul(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(x + y for x, y in zip(a, b))

    def mono_divides(self, a: Monomial, b: Monomial) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def mono_div(self, a: Monomial, b: Monomial) -> Monomial:
        return tuple(x - y for x, y in zip(a, b))

    def mono_str(self, mono: Monomial) -> str:
        parts = []
        for v, e in zip(self.variables, mono):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"

    def monomials_of_degree(self, degree: int) -> tuple:
        """All exponent tuples of weighted degree exactly ``degree``."""
        if degree < 0:
            return ()
        cached = self._mono_cache.get(degree)
        if cached is not None:
            return cached
        out: list[Monomial] = []
        n = self.nvars
        weights = self._weights

        def rec(i: int, remaining: int, prefix: list):
            if i == n:
                if remaining == 0:
                    out.append(tuple(prefix))
                return
            w = weights[i]
            if i == n - 1:
                if remaining % w == 0:
                    out.append(tuple(prefix + [remaining // w]))
                return
            for e in range(remaining // w + 1):
                rec(i + 1, remaining - e * w, prefix + [e])

        rec(0, degree, [])
        out.sort(key=self.term_key, reverse=True)
        result = tuple(out)
        self._mono_cache[degree] = result
        return result


class Polynomial:
    """Immutable sparse polynomial: map exponent tuple -> nonzero coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict, _clean: bool = False):
        if not _clean:
            fld = ring.field
            terms = {m: c for m, c in terms.items() if not fld.is_zero(c)}
        self.ring = ring
        self.terms = terms

    # -- basic queries -----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Maximal weighted degree of a term; None for the zero polynomial."""
        if not self.terms:
            return None
        return max(self.ring.monomial_degree(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {self.ring.monomial_degree(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_components(self) -> dict[int, "Polynomial"]:
        comps: dict[int, dict] = {}
        for m, c in self.terms.items():
            comps.setdefault(self.ring.monomial_degree(m), {})[m] = c
        return {d: Polynomial(self.ring, t, _clean=True) for d, t in comps.items()}

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.term_key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def coefficient(self, mono: Monomial):
        return self.terms.get(mono, self.ring.field.zero)

    def variables_used(self) -> set[Variable]:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.ring.variables[i])
        return used

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError("polynomials live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = fld.add(res.get(m, fld.zero), c)
            if fld.is_zero(s):
                res.pop(m, None)
            else:
                res[m] = s
        return Polynomial(self.ring, res, _clean=True)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = fld.sub(res.get(m, fld.zero), c)
            if fld.is_zero(s):
                res.pop(m, None)
            else:
                res[m] = s
        return Polynomial(self.ring, res, _clean=True)

    def __neg__(self) -> "Polynomial":
        fld = self.ring.field
        return Polynomial(self.ring, {m: fld.neg(c) for m, c in self.terms.items()},
                          _clean=True)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        res: dict = {}
        mono_mul = self.ring.mono_mul
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = fld.add(res.get(m, fld.zero), fld.mul(c1, c2))
                if fld.is_zero(s):
                    res.pop(m, None)
                else:
                    res[m] = s
        return Polynomial(self.ring, res, _clean=True)

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        c = fld.of(c)
        if fld.is_zero(c):
            return self.ring.zero()
        return Polynomial(self.ring, {m: fld.mul(v, c) for m, v in self.terms.items()},
                          _clean=True)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and other.ring == self.ring
                and other.terms == self.terms)

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    # -- calculus / structural operations ------------------------------------
    def substitute(self, mapping: Mapping[Variable, "Polynomial"],
                   check_degree: bool = True) -> "Polynomial":
        """Composite polynomial under variable -> polynomial substitution.

        Every variable occurring in ``self`` must be a key of ``mapping``;
        image polynomials must share one target ring.  With ``check_degree``
        the substitution must be degree-preserving (deg image = weight of the
        variable), matching how restriction maps act on generators.
        """
        used = self.variables_used()
        target: PolyRing | None = None
        for v in used:
            img = mapping.get(v)
            if img is None:
                raise KeyError(f"substitution does not cover variable {v.name!r}")
            if target is None:
                target = img.ring
            elif img.ring != target:
                raise RingMismatchError("substitution images in different rings")
            if check_degree and not img.is_zero:
                if not img.is_homogeneous() or img.degree() != v.degree:
                    raise DegreeError(
                        f"image of {v.name} (degree {v.degree}) is not "
                        f"homogeneous of the same degree")
        if target is None:
            # constant polynomial: land in the ring of any provided image,
            # else stay put.
            target = next(iter(mapping.values())).ring if mapping else self.ring
        fld = target.field
        result = target.zero()
        pow_cache: dict[tuple[Variable, int], Polynomial] = {}
        for mono, coeff in self.terms.items():
            term = target.const(fld.of(coeff))
            for i, e in enumerate(mono):
                if not e:
                    continue
                v = self.ring.variables[i]
                key = (v, e)
                p = pow_cache.get(key)
                if p is None:
                    p = mapping[v] ** e
                    pow_cache[key] = p
                term = term * p
            result = result + term
        return result

    def diff(self, v: Variable) -> "Polynomial":
        """Formal partial derivative with respect to ``v``."""
        i = self.ring.var_index(v)
        fld = self.ring.field
        res: dict = {}
        for m, c in self.terms.items():
            e = m[i]
            if not e:
                continue
            dm = m[:i] + (e - 1,) + m[i + 1:]
            dc = fld.mul(c, fld.of(e))
            if fld.is_zero(dc):
                continue
            s = fld.add(res.get(dm, fld.zero), dc)
            if fld.is_zero(s):
                res.pop(dm, None)
            else:
                res[dm] = s
        return Polynomial(self.ring, res, _clean=True)

    def exact_div(self, q: "Polynomial") -> "Polynomial":
        """Return r with self = q * r, raising NonDivisibleError otherwise."""
        self._check(q)
        if q.is_zero:
            raise ZeroDivisionError("exact division by the zero polynomial")
        ring, fld = self.ring, self.ring.field
        lt_q = q.leading_monomial()
        lc_q_inv = fld.inv(q.terms[lt_q])
        q_tail = [(m, c) for m, c in q.terms.items() if m != lt_q]
        rem = dict(self.terms)
        quo: dict = {}
        while rem:
            m = max(rem, key=ring.term_key)
            c = rem.pop(m)
            if not ring.mono_divides(lt_q, m):
                raise NonDivisibleError("exact division left a remainder")
            qm = ring.mono_div(m, lt_q)
            qc = fld.mul(c, lc_q_inv)
            quo[qm] = fld.add(quo.get(qm, fld.zero), qc)
            for tm, tc in q_tail:
                key = ring.mono_mul(qm, tm)
                s = fld.sub(rem.get(key, fld.zero), fld.mul(qc, tc))
                if fld.is_zero(s):
                    rem.pop(key, None)
                else:
                    rem[key] = s
        return Polynomial(ring, quo)

    # -- printing -------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        ring, fld = self.ring, self.ring.field
        parts: list[str] = []
        for mono in sorted(self.terms, key=ring.term_key, reverse=True):
            coeff = self.terms[mono]
            mono_s = ring.mono_str(mono)
            c_str = fld.to_str(coeff)
            negative = c_str.startswith("-")
            if negative:
                c_str = c_str[1:]
            if mono_s == "1":
                body = c_str
            elif c_str == "1":
                body = mono_s
            else:
                body = f"{c_str}*{mono_s}"
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"<{self}>"


def poly_arith(op: str, p: Polynomial, q: Polynomial) -> Polynomial:
    """Dispatch add/sub/mul by name (CLI and table plumbing)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown arithmetic op {op!r}")


def telescoping_split(f: Polynomial,
                      pairs: Sequence[tuple[Variable, Variable]],
                      order: Sequence[int] | None = None) -> list[Polynomial]:
    """Split f(u) - f(v) as sum_j c_j * (u_j - v_j), exactly.

    ``pairs`` lists the paired variables (u_j, v_j) in a common ring; ``f``
    may involve only the u-variables.  The split substitutes u_j := v_j one
    index at a time in ``order`` (default: given order) and exact-divides each
    telescoping difference.  The certificate identity is re-verified before
    returning; its failure would signal an engine bug.
    """
    ring = f.ring
    l = len(pairs)
    if order is None:
        order = tuple(range(l))
    if sorted(order) != list(range(l)):
        raise ValueError(f"order {order!r} is not a permutation of 0..{l - 1}")
    u_set = {u for u, _ in pairs}
    stray = f.variables_used() - u_set
    if stray:
        raise ValueError(f"f involves non-u variables: {sorted(v.name for v in stray)}")

    coeffs: list[Polynomial] = [ring.zero()] * l
    current = f
    for idx in order:
        u, v = pairs[idx]
        subst = {w: ring.gen(w) for w in current.variables_used()}
        subst[u] = ring.gen(v)
        nxt = current.substitute(subst, check_degree=False) if current.terms else current
        diff = current - nxt
        if diff.is_zero:
            coeffs[idx] = ring.zero()
        else:
            coeffs[idx] = diff.exact_div(ring.gen(u) - ring.gen(v))
        current = nxt

    total = ring.zero()
    for (u, v), c in zip(pairs, coeffs):
        total = total + c * (ring.gen(u) - ring.gen(v))
    if total + current != f:
        raise CertificateError("telescoping certificate failed")
    return coeffs


class PolyMatrix:
    """Rectangular matrix of polynomials over a shared ring."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: PolyRing, rows: Iterable[Iterable[Polynomial]]):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            width = len(rows[0])
            for r in rows:
                if len(r) != width:
                    raise ValueError("ragged polynomial matrix")
                for p in r:
                    if p.ring != ring:
                        raise RingMismatchError("matrix entry in a different ring")
        self.ring = ring
        self.rows = rows

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.rows[i][j]

    def map_entries(self, fn) -> "PolyMatrix":
        rows = [[fn(p) for p in row] for row in self.rows]
        ring = rows[0][0].ring if rows and rows[0] else self.ring
        return PolyMatrix(ring, rows)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(p) for p in row) for row in self.rows) + "]"


def determinant(matrix: PolyMatrix) -> Polynomial:
    """Exact determinant by cofactor expansion with minor memoization."""
    n, m = matrix.shape
    if n != m:
        raise ValueError(f"determinant of a non-square {n}x{m} matrix")
    ring = matrix.ring
    if n == 0:
        return ring.one()
    rows = matrix.rows
    memo: dict[tuple[int, ...], Polynomial] = {}

    def minor(cols: tuple[int, ...]) -> Polynomial:
        # determinant of the submatrix on rows n-len(cols) .. n-1 and `cols`
        if cols in memo:
            return memo[cols]
        r = n - len(cols)
        if len(cols) == 1:
            result = rows[r][cols[0]]
        else:
            result = ring.zero()
            for k, c in enumerate(cols):
                entry = rows[r][c]
                if entry.is_zero:
                    continue
                sub = minor(cols[:k] + cols[k + 1:])
                term = entry * sub
                result = result + (term if k % 2 == 0 else -term)
        memo[cols] = result
        return result

    return minor(tuple(range(n)))
