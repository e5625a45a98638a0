"""The whistle sector: cohomology models, the zeta matrix, the Jacobian
fundamental class, the dual operations and their composites, and the
degree -1 derivation induced by the Dehn twist.

The three models for a validated pair (G, H):

* loop model      K[x_1..x_l] (x) Lambda(y_1..y_l), deg y_i = deg x_i - 1,
* whistle model   K[u_1..u_l] (x) Lambda(y_1..y_l)  (same odd generators),
* interval model  K[u] (x) K[u] modulo (rho(x_i) (x) 1 - 1 (x) rho(x_i)).

The dual whistle operation sends gamma (x) y_1..y_l to the interval class
(1 (x) rho(gamma)) * det(zeta) and kills every proper odd subset; its opposite
multiplies the two tensor factors together and reads off the top coordinate of
the free-module decomposition, scaled by the fundamental-class normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .catalog import PairDatum, ensure_validated
from .field import PrimeField
from .grobner import FreeModuleDecomposer
from .literals import ParseError, parse_with
from .models import TensorClass, TensorModel
from .poly import (DegreeError, Monomial, PolyMatrix, PolyRing, Polynomial,
                   RingMismatchError, determinant, telescoping_split)


class OperationError(RuntimeError):
    """A dual operation was invoked outside its hypotheses."""


# ---------------------------------------------------------------------------
# Mixed (polynomial x exterior) classes
# ---------------------------------------------------------------------------

class MixedModel:
    """Even polynomial part tensored with an exterior algebra on y_1..y_l."""

    def __init__(self, tag: str, even_ring: PolyRing, odd_degrees: Sequence[int]):
        self.tag = tag
        self.even_ring = even_ring
        self.odd_degrees = tuple(odd_degrees)
        self.odd_names = tuple(f"y{i + 1}" for i in range(len(odd_degrees)))
        for name in self.odd_names:
            if name in {v.name for v in even_ring.variables}:
                raise ValueError(f"even generator collides with odd name {name}")

    @property
    def rank(self) -> int:
        return len(self.odd_degrees)

    def subset_degree(self, subset: tuple) -> int:
        return sum(self.odd_degrees[i] for i in subset)

    def zero(self) -> "MixedClass":
        return MixedClass(self, {})

    def one(self) -> "MixedClass":
        return MixedClass(self, {(): self.even_ring.one()})

    def even(self, poly: Polynomial) -> "MixedClass":
        if poly.ring != self.even_ring:
            raise RingMismatchError("even part in the wrong ring")
        return MixedClass(self, {(): poly})

    def odd(self, index: int) -> "MixedClass":
        return MixedClass(self, {(index,): self.even_ring.one()})

    def top_subset(self) -> tuple:
        return tuple(range(self.rank))

    def basis_through(self, cap: int) -> list:
        """Graded basis keys (even monomial, odd subset) of degree <= cap."""
        keys = []
        subsets = []
        for size in range(self.rank + 1):
            subsets.extend(combinations(range(self.rank), size))
        for subset in subsets:
            base = self.subset_degree(subset)
            d = base
            while d <= cap:
                for mono in self.even_ring.monomials_of_degree(d - base):
                    keys.append((mono, subset))
                d += 1
        keys.sort(key=lambda k: (self.key_degree(k), k[1],
                                 self.even_ring.term_key(k[0])))
        return keys

    def key_degree(self, key: tuple) -> int:
        mono, subset = key
        return self.even_ring.monomial_degree(mono) + self.subset_degree(subset)

    def key_class(self, key: tuple) -> "MixedClass":
        mono, subset = key
        poly = Polynomial(self.even_ring, {mono: self.even_ring.field.one})
        return MixedClass(self, {subset: poly})

    def key_literal(self, key: tuple) -> str:
        mono, subset = key
        even = self.even_ring.mono_str(mono)
        odd = "*".join(self.odd_names[i] for i in subset)
        if not odd:
            return even
        if even == "1":
            return odd
        return f"{even}*{odd}"

    def parse(self, text: str) -> "MixedClass":
        return parse_with(text, _MixedAdapter(self))

    def __repr__(self):
        gens = ", ".join(f"{v.name}:{v.degree}" for v in self.even_ring.variables)
        odds = ", ".join(f"{n}:{d}" for n, d in zip(self.odd_names, self.odd_degrees))
        return f"{self.tag}[{gens}; {odds}]"


def _subset_mul(s: tuple, t: tuple) -> tuple | None:
    """Concatenate exterior subsets; None when they overlap, else
    (sign, sorted union)."""
    if set(s) & set(t):
        return None
    inversions = sum(1 for a in s for b in t if a > b)
    merged = tuple(sorted(s + t))
    return (-1 if inversions % 2 else 1), merged


class MixedClass:
    """Element of a mixed model: map odd subset -> even polynomial."""

    __slots__ = ("model", "parts")

    def __init__(self, model: MixedModel, parts: dict):
        clean = {s: p for s, p in parts.items() if not p.is_zero}
        self.model = model
        self.parts = clean

    @property
    def is_zero(self) -> bool:
        return not self.parts

    def degree(self) -> int | None:
        if not self.parts:
            return None
        return max(self.model.subset_degree(s) + p.degree()
                   for s, p in self.parts.items())

    def is_homogeneous(self) -> bool:
        degs = set()
        for s, p in self.parts.items():
            if not p.is_homogeneous():
                return False
            degs.add(self.model.subset_degree(s) + p.degree())
        return len(degs) <= 1

    def _check(self, other: "MixedClass"):
        if other.model.even_ring != self.model.even_ring or \
                other.model.odd_degrees != self.model.odd_degrees:
            raise RingMismatchError("mixed classes over different models")

    def __add__(self, other: "MixedClass") -> "MixedClass":
        self._check(other)
        parts = dict(self.parts)
        for s, p in other.parts.items():
            parts[s] = parts[s] + p if s in parts else p
        return MixedClass(self.model, parts)

    def __sub__(self, other: "MixedClass") -> "MixedClass":
        return self + (-other)

    def __neg__(self) -> "MixedClass":
        return MixedClass(self.model, {s: -p for s, p in self.parts.items()})

    def __mul__(self, other: "MixedClass") -> "MixedClass":
        self._check(other)
        parts: dict = {}
        for s, p in self.parts.items():
            for t, q in other.parts.items():
                st = _subset_mul(s, t)
                if st is None:
                    continue
                sign, merged = st
                term = p * q
                if sign < 0:
                    term = -term
                parts[merged] = parts[merged] + term if merged in parts else term
        return MixedClass(self.model, parts)

    def scale(self, c) -> "MixedClass":
        return MixedClass(self.model, {s: p.scale(c) for s, p in self.parts.items()})

    def coefficient(self, subset: tuple) -> Polynomial:
        return self.parts.get(tuple(subset), self.model.even_ring.zero())

    def coords(self) -> dict:
        """Coordinates over the (even monomial, odd subset) basis keys."""
        out = {}
        for s, p in self.parts.items():
            for mono, c in p.terms.items():
                out[(mono, s)] = c
        return out

    def __eq__(self, other):
        return (isinstance(other, MixedClass)
                and other.model.even_ring == self.model.even_ring
                and other.model.odd_degrees == self.model.odd_degrees
                and other.parts == self.parts)

    def __hash__(self):
        return hash(tuple(sorted((s, hash(p)) for s, p in self.parts.items())))

    def __str__(self):
        if not self.parts:
            return "0"
        chunks = []
        for s in sorted(self.parts, key=lambda t: (len(t), t)):
            poly = self.parts[s]
            odd = "*".join(self.model.odd_names[i] for i in s)
            body = str(poly)
            if odd:
                if len(poly.terms) > 1 or body.startswith("-"):
                    body = f"({body})*{odd}"
                elif body == "1":
                    body = odd
                else:
                    body = f"{body}*{odd}"
            chunks.append(body)
        return " + ".join(chunks)

    def __repr__(self):
        return f"<{self.model.tag}: {self}>"


class _MixedAdapter:
    """Literal adapter for mixed classes: even generators plus y-names."""

    def __init__(self, model: MixedModel):
        self.model = model
        self.even_scope = {v.name: v for v in model.even_ring.variables}
        self.odd_scope = {n: i for i, n in enumerate(model.odd_names)}

    def const(self, q: Fraction) -> MixedClass:
        return self.model.even(self.model.even_ring.const(
            self.model.even_ring.field.of(q)))

    def ident(self, name: str, pos: int) -> MixedClass:
        if name in self.even_scope:
            return self.model.even(self.model.even_ring.gen(self.even_scope[name]))
        if name in self.odd_scope:
            return self.model.odd(self.odd_scope[name])
        raise ParseError(f"unknown generator {name!r}", pos)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def pow(self, a, n):
        out = self.model.one()
        for _ in range(n):
            out = out * a
        return out

    def tensor(self, parts, pos):
        raise ParseError("(x) is not part of loop/whistle class literals", pos)


# ---------------------------------------------------------------------------
# Models for a pair
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaMatrix:
    """The telescoping matrix: sum_j zeta[i][j] * (u_j (x) 1 - 1 (x) u_j)
    equals rho(x_i) (x) 1 - 1 (x) rho(x_i), and setting both factors equal
    recovers the Jacobian d rho(x_i) / d u_j."""

    matrix: PolyMatrix
    order: tuple
    verified: bool


@dataclass(frozen=True)
class JacobianClass:
    """det(d rho(x_i)/d u_j) together with its class in the restriction
    quotient: lambda * b_top with b_top the unique top standard monomial."""

    matrix: PolyMatrix
    lambda_w: Polynomial
    scalar: object
    b_top: Monomial
    degree: int


@dataclass(frozen=True)
class FibreClasses:
    """Documentation record for the odd fibre generators z_1..z_l of the
    whistle fibration, deg z_i = deg u_i - 1.

    Stored classes never contain the z's: integration along the fibre absorbs
    them through the closed formula (each y_i corresponds to the combination
    sum_j zeta_ij z_j, and the top product z_1..z_l integrates to 1), so this
    type exists only to house the symbols.
    """

    degrees: tuple

    @classmethod
    def for_pair(cls, pair: PairDatum) -> "FibreClasses":
        return cls(tuple(v.degree - 1 for v in pair.u_ring.variables))


class WhistleModels:
    """All whistle-sector data for one validated pair, built once."""

    def __init__(self, pair: PairDatum, degree_cap: int | None = None):
        report = ensure_validated(pair, degree_cap)
        if not report.ok:
            raise OperationError(
                f"pair {pair.name} failed validation: {report.summary()}")
        self.pair = pair
        self.report = report
        odd_degrees = [v.degree - 1 for v in pair.x_ring.variables]
        self.loop = MixedModel("loop", pair.x_ring, odd_degrees)
        self.whistle = MixedModel("whistle", pair.u_ring, odd_degrees)
        self.interval = TensorModel([pair, pair], [(0, 1)], prefixes=("", "v_"))
        self._zeta: ZetaMatrix | None = None
        self._det_class: TensorClass | None = None
        self._jacobian: JacobianClass | None = None
        self._decomposer: FreeModuleDecomposer | None = None
        self._diag_map: dict | None = None

    # -- structure maps ------------------------------------------------------
    def diagonal_map(self) -> dict:
        """The multiplication map on the interval ring: both factors to u."""
        if self._diag_map is None:
            mapping = {}
            for v in self.pair.u_ring.variables:
                mapping[self.interval.ring.variable(v.name)] = self.pair.u_ring.gen(v)
                mapping[self.interval.ring.variable("v_" + v.name)] = \
                    self.pair.u_ring.gen(v)
            self._diag_map = mapping
        return self._diag_map

    def multiply_factors(self, cls: TensorClass) -> Polynomial:
        """h^*: the image of an interval class under factor multiplication."""
        if cls.rep.is_zero:
            return self.pair.u_ring.zero()
        return cls.rep.substitute(self.diagonal_map(), check_degree=False)

    def restrict_even(self, poly: Polynomial) -> Polynomial:
        return self.pair.restrict(poly)

    # -- cached constructions ---------------------------------------------
    @property
    def zeta(self) -> ZetaMatrix:
        if self._zeta is None:
            self._zeta = zeta_matrix(self.pair, interval=self.interval)
        return self._zeta

    @property
    def zeta_det(self) -> Polynomial:
        return determinant(self.zeta.matrix)

    @property
    def det_class(self) -> TensorClass:
        if self._det_class is None:
            self._det_class = self.interval.make(self.zeta_det)
        return self._det_class

    @property
    def jacobian(self) -> JacobianClass:
        if self._jacobian is None:
            self._jacobian = jacobian_class(self.pair)
        return self._jacobian

    @property
    def decomposer(self) -> FreeModuleDecomposer:
        if self._decomposer is None:
            self._decomposer = FreeModuleDecomposer(
                self.pair.restriction_images(), self.pair.x_ring,
                self.pair.restriction_quotient())
        return self._decomposer

    def default_cap(self) -> int:
        return 2 * sum(v.degree for v in self.pair.u_ring.variables)


def build_models(pair: PairDatum, degree_cap: int | None = None) -> WhistleModels:
    """Loop, whistle, and interval presentations for a validated pair."""
    return WhistleModels(pair, degree_cap)


def zeta_matrix(pair: PairDatum, order: Sequence[int] | None = None,
                interval: TensorModel | None = None) -> ZetaMatrix:
    """Telescoping matrix for the pair; both certificate identities checked."""
    if interval is None:
        interval = TensorModel([pair, pair], [(0, 1)], prefixes=("", "v_"))
    ring = interval.ring
    l = pair.u_ring.nvars
    pairs = [(ring.variable(v.name), ring.variable("v_" + v.name))
             for v in pair.u_ring.variables]
    if order is None:
        order = tuple(range(l))
    rows = []
    for xv in pair.x_ring.variables:
        image = interval.embed(0, pair.restriction[xv])
        rows.append(telescoping_split(image, pairs, order=tuple(order)))
    matrix = PolyMatrix(ring, rows)

    # certificate 1: sum_j zeta_ij (u_j - v_j) = rho(x_i)(u) - rho(x_i)(v)
    for xv, row in zip(pair.x_ring.variables, rows):
        lhs = ring.zero()
        for (u, v), c in zip(pairs, row):
            lhs = lhs + c * (ring.gen(u) - ring.gen(v))
        rhs = interval.embed(0, pair.restriction[xv]) - \
            interval.embed(1, pair.restriction[xv])
        if lhs != rhs:
            raise OperationError("zeta certificate (telescoping identity) failed")
    # certificate 2: m(zeta_ij) = d rho(x_i) / d u_j
    diag = {}
    for v in pair.u_ring.variables:
        diag[ring.variable(v.name)] = pair.u_ring.gen(v)
        diag[ring.variable("v_" + v.name)] = pair.u_ring.gen(v)
    for xv, row in zip(pair.x_ring.variables, rows):
        for uv, c in zip(pair.u_ring.variables, row):
            collapsed = (c.substitute(diag, check_degree=False)
                         if not c.is_zero else pair.u_ring.zero())
            if collapsed != pair.restriction[xv].diff(uv):
                raise OperationError("zeta certificate (Jacobian identity) failed")
    return ZetaMatrix(matrix, tuple(order), True)


def jacobian_class(pair: PairDatum) -> JacobianClass:
    """Jacobian determinant and its normal form lambda * b_top."""
    report = ensure_validated(pair)
    if not report.ok:
        raise OperationError(f"pair {pair.name} failed validation")
    if isinstance(pair.field, PrimeField) and not report.coprimality_ok:
        raise OperationError(
            f"pair {pair.name}: degree condition gcd(deg rho(x_i), p) = 1 "
            f"fails; the fundamental-class normalization is unavailable")
    matrix = pair.jacobian_matrix()
    lam_w = determinant(matrix)
    expected_degree = (sum(v.degree for v in pair.x_ring.variables)
                       - sum(v.degree for v in pair.u_ring.variables))
    if not lam_w.is_zero and lam_w.degree() != expected_degree:
        raise OperationError("Jacobian determinant has unexpected degree")
    quotient = pair.restriction_quotient()
    top = max(quotient.all_standard_monomials())
    top_monos = quotient.standard_monomials(top)
    if len(top_monos) != 1:
        raise OperationError(
            f"pair {pair.name}: top degree of the quotient is not 1-dimensional")
    b_top = top_monos[0]
    nf = quotient.normal_form(lam_w)
    if nf.is_zero or set(nf.terms) != {b_top}:
        raise OperationError(
            f"pair {pair.name}: Jacobian class is not a nonzero multiple of the "
            f"top monomial (degree condition violated)")
    lam = nf.terms[b_top]
    return JacobianClass(matrix, lam_w, lam, b_top, expected_degree)


# ---------------------------------------------------------------------------
# Dual operations
# ---------------------------------------------------------------------------

def _require_homogeneous(c, allow_inhomogeneous: bool):
    if not allow_inhomogeneous and not c.is_homogeneous():
        raise DegreeError("operation input must be homogeneous "
                          "(pass allow_inhomogeneous=True to split it)")


def dmu_whistle(c: MixedClass, models: WhistleModels,
                allow_inhomogeneous: bool = False) -> TensorClass:
    """Dual whistle operation: loop classes to interval classes.

    gamma (x) y_1..y_l maps to (1 (x) rho(gamma)) * det(zeta); classes with a
    proper odd subset map to zero.
    """
    if c.model.even_ring != models.loop.even_ring:
        raise RingMismatchError("input is not a loop-model class")
    _require_homogeneous(c, allow_inhomogeneous)
    full = models.loop.top_subset()
    gamma = c.parts.get(full)
    if gamma is None:
        return models.interval.zero()
    rho_gamma = models.restrict_even(gamma)
    second = models.interval.embed(1, rho_gamma)
    return models.interval.make(second * models.zeta_det)


def dmu_whistle_op(c: TensorClass, models: WhistleModels,
                   allow_inhomogeneous: bool = False) -> MixedClass:
    """Dual opposite-whistle operation: interval classes to loop classes.

    Multiplies the two tensor factors, decomposes over the restriction
    quotient basis, and returns the top-monomial coordinate divided by the
    fundamental-class scalar; the image sits in exterior degree zero.
    """
    if c.model.ring != models.interval.ring:
        raise RingMismatchError("input is not an interval-model class")
    _require_homogeneous(c, allow_inhomogeneous)
    jac = models.jacobian
    merged = models.multiply_factors(c)
    if merged.is_zero:
        return models.loop.zero()
    field = models.pair.field
    inv_lambda = field.inv(jac.scalar)
    result = models.loop.even_ring.zero()
    for _, component in sorted(merged.homogeneous_components().items()):
        coeff = models.decomposer.coefficient_of(component, jac.b_top)
        result = result + coeff.scale(inv_lambda)
    return models.loop.even(result)


def composite_whistle(models: WhistleModels, direction: str,
                      cap: int | None = None) -> dict:
    """Operation table of the glued whistles on a graded basis up to cap.

    direction "W_Wop" composes the dual operations loop -> interval -> loop
    (the cylinder with one hole; the top odd class maps to 1); "Wop_W" is the
    interval -> loop -> interval direction, which is identically zero.
    """
    if cap is None:
        cap = models.default_cap()
    if direction not in ("W_Wop", "Wop_W"):
        raise ValueError(f"unknown composite direction {direction!r}")
    if direction == "W_Wop":
        if isinstance(models.pair.field, PrimeField) and \
                not models.report.coprimality_ok:
            raise OperationError(
                f"pair {models.pair.name}: composite operation rejected; "
                f"degree/characteristic coprimality fails")
        table = {}
        for key in models.loop.basis_through(cap):
            value = dmu_whistle_op(dmu_whistle(models.loop.key_class(key), models),
                                   models)
            table[key] = value
        return table
    table = {}
    for mono in models.interval.basis_through(cap):
        cls = models.interval.monomial_class(mono)
        table[mono] = dmu_whistle(dmu_whistle_op(cls, models), models)
    return table


def scalar_ratio(a, b):
    """The nonzero scalar s with a = s * b, or None if there is none.

    Works for MixedClass and TensorClass (anything exposing coords());
    equality assertions that are only defined projectively go through this.
    """
    ca, cb = a.coords(), b.coords()
    if not ca and not cb:
        return a.model.even_ring.field.one if hasattr(a.model, "even_ring") \
            else a.model.field.one
    if set(ca) != set(cb):
        return None
    field = (a.model.even_ring.field if hasattr(a.model, "even_ring")
             else a.model.field)
    ratio = None
    for key, va in ca.items():
        vb = cb[key]
        if field.is_zero(vb):
            return None
        r = field.div(va, vb)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


def projectively_equal(a, b) -> bool:
    """Equality up to multiplication by a nonzero scalar."""
    return scalar_ratio(a, b) is not None


def bv_operator(c: MixedClass) -> MixedClass:
    """The degree -1 derivation with x_i -> y_i and y_i -> 0.

    Extended by the graded Leibniz rule; squares to zero.
    """
    model = c.model
    out = model.zero()
    for subset, poly in c.parts.items():
        inside = set(subset)
        for i, v in enumerate(model.even_ring.variables):
            if i in inside:
                continue  # the Leibniz term carries y_i twice and dies
            d = poly.diff(v)
            if d.is_zero:
                continue
            inversions = sum(1 for s in subset if s < i)
            merged = tuple(sorted(subset + (i,)))
            term = d if inversions % 2 == 0 else -d
            out = out + MixedClass(model, {merged: term})
    return out
