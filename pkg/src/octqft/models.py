"""Tensor products of label cohomologies modulo matching relations.

The interval-type models are all quotients of tensor products of subgroup
polynomial rings: two factors for a labeled interval, three for the basic
open cobordism, four for a disjoint pair of intervals.  Internally the factor
variables carry per-factor prefixes; user-facing input and output always uses
the tensor literal form ``<poly> (x) <poly> ...`` where each factor is written
in its own label's generator names.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .catalog import PairDatum
from .grobner import IdealPresentation, QuotientRing
from .literals import ParseError, parse_with
from .poly import Monomial, PolyRing, Polynomial, RingMismatchError, Variable


class TensorModel:
    """Quotient of a tensor product of subgroup rings by matching relations.

    ``factors`` lists the label pairs in boundary order; ``relation_edges``
    names the adjacent factor indices (i, j) to be glued along the common
    group: one relation rho_i(x) (x) 1 - 1 (x) rho_j(x) per group generator.
    """

    def __init__(self, factors: Sequence[PairDatum],
                 relation_edges: Sequence[tuple[int, int]],
                 prefixes: Sequence[str] | None = None,
                 degree_cap: int | None = None):
        factors = list(factors)
        group = factors[0].group
        for pair in factors:
            if pair.group != group:
                raise RingMismatchError(
                    f"labels {factors[0].name} and {pair.name} have different "
                    f"ambient groups")
            if pair.field != factors[0].field:
                raise RingMismatchError("labels over different fields")
        if prefixes is None:
            prefixes = (("", "v_") if len(factors) == 2
                        else tuple(f"f{i}_" for i in range(len(factors))))
        self.factors = factors
        self.prefixes = tuple(prefixes)
        self.field = factors[0].field
        self.group = group

        variables: list[Variable] = []
        self._offsets: list[int] = []
        self._sizes: list[int] = []
        for i, (pre, pair) in enumerate(zip(prefixes, factors)):
            self._offsets.append(len(variables))
            self._sizes.append(pair.u_ring.nvars)
            for v in pair.u_ring.variables:
                variables.append(Variable(pre + v.name, v.degree, block=i))
        self.ring = PolyRing(self.field, variables)

        relations: list[Polynomial] = []
        for (i, j) in relation_edges:
            for xv in group.generators:
                xvar = factors[i].x_ring.variable(xv[0])
                left = self.embed(i, factors[i].restriction[xvar])
                xvar_j = factors[j].x_ring.variable(xv[0])
                right = self.embed(j, factors[j].restriction[xvar_j])
                rel = left - right
                if not rel.is_zero:
                    relations.append(rel)
        self.relation_edges = tuple(relation_edges)
        self.relations = tuple(relations)
        self.quotient = QuotientRing(IdealPresentation(self.ring, relations),
                                     degree_cap)

    # -- embeddings and maps -------------------------------------------------
    def embed(self, i: int, p: Polynomial) -> Polynomial:
        """Insert a polynomial of factor i's subgroup ring into the tensor ring."""
        if p.ring != self.factors[i].u_ring:
            raise RingMismatchError(f"polynomial not in factor {i}'s ring")
        off, size = self._offsets[i], self._sizes[i]
        total = self.ring.nvars
        terms = {}
        for m, c in p.terms.items():
            terms[(0,) * off + m + (0,) * (total - off - size)] = c
        return Polynomial(self.ring, terms, _clean=True)

    def embed_monomial(self, i: int, mono: Monomial) -> Monomial:
        off, size = self._offsets[i], self._sizes[i]
        return (0,) * off + mono + (0,) * (self.ring.nvars - off - size)

    def split_monomial(self, mono: Monomial) -> tuple:
        """Per-factor exponent tuples of a tensor-ring monomial."""
        parts = []
        for off, size in zip(self._offsets, self._sizes):
            parts.append(tuple(mono[off:off + size]))
        return tuple(parts)

    def factor_map(self, target: "TensorModel", assignment: Sequence[int]) -> dict:
        """Variable map sending factor i of self into factor assignment[i]
        of the target (multiplying factors that share a target index)."""
        mapping: dict[Variable, Polynomial] = {}
        for i, tgt in enumerate(assignment):
            src_pair = self.factors[i]
            if target.factors[tgt].u_ring != src_pair.u_ring:
                raise RingMismatchError(
                    f"factor {i} does not match target factor {tgt}")
            for v in src_pair.u_ring.variables:
                mapping[self.ring.variable(self.prefixes[i] + v.name)] = \
                    target.ring.gen(target.ring.variable(target.prefixes[tgt] + v.name))
        return mapping

    def push(self, cls: "TensorClass", target: "TensorModel",
             assignment: Sequence[int]) -> "TensorClass":
        mapping = self.factor_map(target, assignment)
        rep = cls.rep
        if rep.is_zero:
            return target.zero()
        return target.make(rep.substitute(mapping))

    # -- classes --------------------------------------------------------------
    def make(self, p: Polynomial) -> "TensorClass":
        return TensorClass(self, self.quotient.normal_form(p))

    def zero(self) -> "TensorClass":
        return TensorClass(self, self.ring.zero())

    def one(self) -> "TensorClass":
        return TensorClass(self, self.ring.one())

    def basis(self, degree: int) -> tuple:
        return self.quotient.standard_monomials(degree)

    def basis_through(self, cap: int) -> list:
        out = []
        for d in range(cap + 1):
            out.extend(self.basis(d))
        return out

    def monomial_class(self, mono: Monomial) -> "TensorClass":
        return TensorClass(self, Polynomial(self.ring, {mono: self.field.one}))

    # -- literals ---------------------------------------------------------
    def parse(self, text: str) -> "TensorClass":
        value = parse_with(text, _TensorAdapter(self))
        return self.make(value.bind(None))

    def monomial_literal(self, mono: Monomial) -> str:
        parts = []
        for pair, piece in zip(self.factors, self.split_monomial(mono)):
            parts.append(pair.u_ring.mono_str(piece))
        return " (x) ".join(parts)

    def class_literal(self, cls: "TensorClass") -> str:
        rep = cls.rep
        if rep.is_zero:
            return "0"
        fld = self.field
        chunks = []
        for mono in sorted(rep.terms, key=self.ring.term_key, reverse=True):
            c = rep.terms[mono]
            c_str = fld.to_str(c)
            negative = c_str.startswith("-")
            if negative:
                c_str = c_str[1:]
            body = self.monomial_literal(mono)
            if c_str != "1":
                body = f"{c_str}*{body}"
            if not chunks:
                chunks.append(f"-{body}" if negative else body)
            else:
                chunks.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(chunks)

    def __repr__(self):
        labels = ",".join(p.subgroup.name for p in self.factors)
        return f"TensorModel({labels}; {len(self.relations)} relations)"


class TensorClass:
    """An element of a TensorModel, stored in normal form."""

    __slots__ = ("model", "rep")

    def __init__(self, model: TensorModel, rep: Polynomial):
        self.model = model
        self.rep = rep

    @property
    def is_zero(self) -> bool:
        return self.rep.is_zero

    def degree(self):
        return self.rep.degree()

    def is_homogeneous(self) -> bool:
        return self.rep.is_homogeneous()

    def __add__(self, other: "TensorClass") -> "TensorClass":
        self._check(other)
        return TensorClass(self.model, self.rep + other.rep)

    def __sub__(self, other: "TensorClass") -> "TensorClass":
        self._check(other)
        return TensorClass(self.model, self.rep - other.rep)

    def __neg__(self):
        return TensorClass(self.model, -self.rep)

    def __mul__(self, other: "TensorClass") -> "TensorClass":
        self._check(other)
        return self.model.make(self.rep * other.rep)

    def scale(self, c) -> "TensorClass":
        return TensorClass(self.model, self.rep.scale(c))

    def _check(self, other):
        if other.model is not self.model and other.model.ring != self.model.ring:
            raise RingMismatchError("classes from different models")

    def coords(self) -> dict:
        """Coordinates over the standard-monomial basis."""
        return dict(self.rep.terms)

    def __eq__(self, other):
        return (isinstance(other, TensorClass) and other.model.ring == self.model.ring
                and other.rep == self.rep)

    def __hash__(self):
        return hash(self.rep)

    def __str__(self):
        return self.model.class_literal(self)

    def __repr__(self):
        return f"[{self}]"


class _Deferred:
    """Literal value whose identifiers bind to a tensor factor lazily.

    Until a ``(x)`` separator fixes the factor, an identifier like ``u1`` may
    be legal in several factors (torus labels share generator names), so
    expression nodes are closures ``bind(factor | None) -> Polynomial``.
    """

    __slots__ = ("bind",)

    def __init__(self, bind):
        self.bind = bind


class _TensorAdapter:
    """Literal adapter: scalars, per-factor identifiers, and (x) products."""

    def __init__(self, model: TensorModel):
        self.model = model
        self.ring = model.ring
        self.scopes = []
        for i, pair in enumerate(model.factors):
            self.scopes.append({v.name: model.ring.variable(model.prefixes[i] + v.name)
                                for v in pair.u_ring.variables})

    def const(self, q: Fraction) -> _Deferred:
        poly = self.ring.const(self.ring.field.of(q))
        return _Deferred(lambda i: poly)

    def ident(self, name: str, pos: int) -> _Deferred:
        def bind(i):
            if i is None:
                hits = [scope[name] for scope in self.scopes if name in scope]
                if not hits:
                    raise ParseError(f"unknown generator {name!r}", pos)
                if len(hits) > 1:
                    raise ParseError(
                        f"generator {name!r} is ambiguous; write the full "
                        f"tensor form with (x) separators", pos)
                return self.ring.gen(hits[0])
            scope = self.scopes[i]
            if name not in scope:
                raise ParseError(
                    f"generator {name!r} does not belong to tensor factor "
                    f"{i + 1}", pos)
            return self.ring.gen(scope[name])
        return _Deferred(bind)

    def add(self, a, b):
        return _Deferred(lambda i: a.bind(i) + b.bind(i))

    def sub(self, a, b):
        return _Deferred(lambda i: a.bind(i) - b.bind(i))

    def mul(self, a, b):
        return _Deferred(lambda i: a.bind(i) * b.bind(i))

    def neg(self, a):
        return _Deferred(lambda i: -a.bind(i))

    def pow(self, a, n):
        return _Deferred(lambda i: a.bind(i) ** n)

    def tensor(self, parts: list, pos: int) -> _Deferred:
        if len(parts) != len(self.model.factors):
            raise ParseError(
                f"expected {len(self.model.factors)} tensor factors, "
                f"got {len(parts)}", pos)
        bound = self.ring.one()
        for k, part in enumerate(parts):
            bound = bound * part.bind(k)
        return _Deferred(lambda i: bound)
