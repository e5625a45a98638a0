"""Textual DSL for labeled open-closed cobordism words, with a parser,
boundary-signature checking, and an evaluator that composes the dual
operations into explicit graded tables.

Grammar:  expr := union (";" union)* ; union := atom ("|" atom)* ;
          atom := IDENT "(" [IDENT ("," IDENT)*] ")" | IDENT | "(" expr ")".

A word lists dual operations in application order: ``whistle(H); cowhistle(H)``
applies the dual whistle first and the dual opposite second, which is the
dual of the one-holed cylinder.  Geometrically the rightmost factor is glued
first, so consecutive words must satisfy out(right) = in(left); the input
basis of a word's table is the model of its leftmost factor's outgoing
boundary.  Disjoint unions tensor the tables in left-to-right order; any sign
discrepancies of odd operations across unions are absorbed by the
up-to-scalar flag.

Closed-sector pair-of-pants generators are plug-in slots: without a
registered plug-in evaluation yields an explicit ``unsupported`` outcome,
never a silent zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .catalog import PairDatum
from .literals import ParseError, _tokenize
from .models import TensorClass, TensorModel
from .poly import PolyRing, Polynomial, Variable
from .whistle import (MixedClass, MixedModel, OperationError, WhistleModels,
                      bv_operator, dmu_whistle, dmu_whistle_op)
from . import openstr


class SignatureError(ValueError):
    """Boundary signatures do not glue, or a label does not resolve."""


class DegreeCapExceeded(RuntimeError):
    def __init__(self, degree: int, cap: int):
        super().__init__(f"intermediate class of degree {degree} exceeds the "
                         f"table cap {cap}")
        self.degree = degree


class UnsupportedOperation(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

GENERATOR_ARITY = {
    "whistle": 1,
    "cowhistle": 1,
    "upsilon": 3,
    "coupsilon": 3,
    "cyl_closed": 0,
    "cyl_open": 2,
    "bv": 0,
    "pants_plug": 1,
}


@dataclass(frozen=True)
class Gen:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Seq:
    parts: tuple


@dataclass(frozen=True)
class Union:
    parts: tuple


Expr = object


def parse(text: str) -> Expr:
    """Parse a cobordism word; unknown generator names and arities are
    rejected here, label resolution happens at signature checking."""
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]]

    def take(kind=None):
        tok = tokens[pos[0]]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        pos[0] += 1
        return tok

    def atom():
        kind, val, at = peek()
        if kind == "(":
            take()
            inner = expr()
            take(")")
            return inner
        if kind != "IDENT":
            raise ParseError("expected a generator name", at)
        take()
        name = val
        args: tuple = ()
        if peek()[0] == "(":
            take()
            items = []
            if peek()[0] == "IDENT":
                items.append(take()[1])
                while peek()[0] == ",":
                    take()
                    items.append(take("IDENT")[1])
            take(")")
            args = tuple(items)
        if name not in GENERATOR_ARITY:
            raise ParseError(f"unknown generator {name!r}", at)
        if len(args) != GENERATOR_ARITY[name]:
            raise ParseError(
                f"{name} takes {GENERATOR_ARITY[name]} label(s), got {len(args)}",
                at)
        return Gen(name, args)

    def union():
        parts = [atom()]
        while peek()[0] == "|":
            take()
            parts.append(atom())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def expr():
        parts = [union()]
        while peek()[0] == ";":
            take()
            parts.append(union())
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))

    out = expr()
    kind, val, at = peek()
    if kind != "END":
        raise ParseError(f"trailing input {val!r}", at)
    return out


def normalize(expr: Expr) -> Expr:
    """Flatten associativity of ; and | and collapse singletons."""
    if isinstance(expr, Gen):
        return expr
    if isinstance(expr, Seq):
        parts = []
        for p in expr.parts:
            q = normalize(p)
            if isinstance(q, Seq):
                parts.extend(q.parts)
            else:
                parts.append(q)
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))
    if isinstance(expr, Union):
        parts = []
        for p in expr.parts:
            q = normalize(p)
            if isinstance(q, Union):
                parts.extend(q.parts)
            else:
                parts.append(q)
        return parts[0] if len(parts) == 1 else Union(tuple(parts))
    raise TypeError(f"not a cobordism expression: {expr!r}")


def print_expr(expr: Expr) -> str:
    """Canonical text; parse(print_expr(e)) == normalize(e)."""
    if isinstance(expr, Gen):
        if expr.args:
            return f"{expr.name}({','.join(expr.args)})"
        return expr.name
    if isinstance(expr, Union):
        return " | ".join(f"({print_expr(p)})" if isinstance(p, Seq)
                          else print_expr(p) for p in expr.parts)
    if isinstance(expr, Seq):
        return "; ".join(print_expr(p) for p in expr.parts)
    raise TypeError(f"not a cobordism expression: {expr!r}")


# ---------------------------------------------------------------------------
# Boundary signatures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    def __str__(self):
        return "circle"


@dataclass(frozen=True)
class Interval:
    left: str
    right: str

    def __str__(self):
        return f"interval({self.left},{self.right})"


Signature = tuple


def signature_str(sig: Signature) -> str:
    return " + ".join(str(b) for b in sig) if sig else "empty"


def _resolve(label: str, catalog: dict) -> PairDatum:
    pair = catalog.get(label)
    if pair is None:
        raise SignatureError(f"unknown label {label!r}")
    return pair


def check_signature(expr: Expr, catalog: dict) -> tuple[Signature, Signature]:
    """Infer geometric (in, out) signatures; composition mismatches are
    rejected with the offending boundary pair."""
    if isinstance(expr, Gen):
        for label in expr.args if expr.name != "pants_plug" else ():
            _resolve(label, catalog)
        if expr.name == "whistle":
            h = expr.args[0]
            return (Interval(h, h),), (Circle(),)
        if expr.name == "cowhistle":
            h = expr.args[0]
            return (Circle(),), (Interval(h, h),)
        if expr.name == "upsilon":
            k, h, l = expr.args
            return (Interval(k, h), Interval(h, l)), (Interval(k, l),)
        if expr.name == "coupsilon":
            k, h, l = expr.args
            return (Interval(k, l),), (Interval(k, h), Interval(h, l))
        if expr.name == "cyl_closed" or expr.name == "bv":
            return (Circle(),), (Circle(),)
        if expr.name == "cyl_open":
            k, h = expr.args
            return (Interval(k, h),), (Interval(k, h),)
        if expr.name == "pants_plug":
            plug = PLUG_REGISTRY.get(expr.args[0])
            if plug is not None and plug.in_signature is not None:
                return plug.in_signature, plug.out_signature
            return (Circle(),), (Circle(), Circle())
        raise SignatureError(f"unknown generator {expr.name!r}")
    if isinstance(expr, Union):
        ins: list = []
        outs: list = []
        for p in expr.parts:
            i, o = check_signature(p, catalog)
            ins.extend(i)
            outs.extend(o)
        return tuple(ins), tuple(outs)
    if isinstance(expr, Seq):
        sigs = [check_signature(p, catalog) for p in expr.parts]
        # the rightmost factor is glued first: out(right) must equal in(left)
        for k in range(len(sigs) - 1):
            left_in = sigs[k][0]
            right_out = sigs[k + 1][1]
            if left_in != right_out:
                raise SignatureError(
                    f"cannot glue {print_expr(expr.parts[k + 1])} into "
                    f"{print_expr(expr.parts[k])}: outgoing "
                    f"{signature_str(right_out)} vs incoming "
                    f"{signature_str(left_in)}")
        return sigs[-1][0], sigs[0][1]
    raise TypeError(f"not a cobordism expression: {expr!r}")


def word_labels(expr: Expr) -> list:
    if isinstance(expr, Gen):
        return list(expr.args) if expr.name != "pants_plug" else []
    if isinstance(expr, (Seq, Union)):
        out = []
        for p in expr.parts:
            out.extend(word_labels(p))
        return out
    return []


# ---------------------------------------------------------------------------
# Plug-in registry (closed-sector pair of pants and friends)
# ---------------------------------------------------------------------------

@dataclass
class PantsPlug:
    """An externally supplied closed-sector operation table factory."""

    factory: Callable
    in_signature: Signature | None = None
    out_signature: Signature | None = None


PLUG_REGISTRY: dict[str, PantsPlug] = {}


def register_pants_plug(name: str, factory: Callable,
                        in_signature: Signature | None = None,
                        out_signature: Signature | None = None) -> None:
    """Register a closed-sector plug; the factory receives
    (evaluator, cap) and must return an _Op-compatible object."""
    PLUG_REGISTRY[name] = PantsPlug(factory, in_signature, out_signature)


# ---------------------------------------------------------------------------
# Boundary models
# ---------------------------------------------------------------------------

class LoopBoundary:
    """Circle boundary: the loop-space model of the common group."""

    def __init__(self, loop: MixedModel):
        self.loop = loop

    def keys_through(self, cap: int) -> list:
        return self.loop.basis_through(cap)

    def key_degree(self, key) -> int:
        return self.loop.key_degree(key)

    def key_literal(self, key) -> str:
        return self.loop.key_literal(key)

    def value_literal(self, coords: dict) -> str:
        parts: dict = {}
        for (mono, subset), c in coords.items():
            poly = Polynomial(self.loop.even_ring, {mono: c})
            parts[subset] = parts[subset] + poly if subset in parts else poly
        return str(MixedClass(self.loop, parts))

    def key_class(self, key) -> MixedClass:
        return self.loop.key_class(key)

    def matches(self, other) -> bool:
        return isinstance(other, LoopBoundary) and \
            other.loop.even_ring == self.loop.even_ring


class IntervalBoundary:
    """Labeled-interval boundary: a two-factor tensor quotient."""

    def __init__(self, model: TensorModel):
        self.model = model

    def keys_through(self, cap: int) -> list:
        return self.model.basis_through(cap)

    def key_degree(self, key) -> int:
        return self.model.ring.monomial_degree(key)

    def key_literal(self, key) -> str:
        return self.model.monomial_literal(key)

    def value_literal(self, coords: dict) -> str:
        rep = Polynomial(self.model.ring, dict(coords))
        return self.model.class_literal(TensorClass(self.model, rep))

    def key_class(self, key) -> TensorClass:
        return self.model.monomial_class(key)

    def matches(self, other) -> bool:
        return isinstance(other, IntervalBoundary) and \
            other.model.ring == self.model.ring


class ProductBoundary:
    """Disjoint union of boundaries: tuple keys, tensored coordinates."""

    def __init__(self, parts: Sequence):
        flat = []
        for p in parts:
            if isinstance(p, ProductBoundary):
                flat.extend(p.parts)
            else:
                flat.append(p)
        self.parts = list(flat)

    def keys_through(self, cap: int) -> list:
        out = [()]
        for part in self.parts:
            grown = []
            for prefix in out:
                used = sum(self.parts[i].key_degree(prefix[i])
                           for i in range(len(prefix)))
                for key in part.keys_through(cap - used):
                    grown.append(prefix + (key,))
            out = grown
        return [k for k in out if self.key_degree(k) <= cap]

    def key_degree(self, key) -> int:
        return sum(p.key_degree(k) for p, k in zip(self.parts, key))

    def key_literal(self, key) -> str:
        return " | ".join(p.key_literal(k) for p, k in zip(self.parts, key))

    def value_literal(self, coords: dict) -> str:
        if not coords:
            return "0"
        chunks = []
        for key, c in sorted(coords.items(), key=lambda kv: str(kv[0])):
            body = " | ".join(p.key_literal(k) for p, k in zip(self.parts, key))
            chunks.append(f"{c} * ({body})")
        return " + ".join(chunks)

    def matches(self, other) -> bool:
        return (isinstance(other, ProductBoundary)
                and len(other.parts) == len(self.parts)
                and all(a.matches(b) for a, b in zip(self.parts, other.parts)))


# ---------------------------------------------------------------------------
# Operation tables
# ---------------------------------------------------------------------------

@dataclass
class OperationValue:
    """A finite graded table: domain basis key -> output coordinates."""

    word: str
    domain: object
    codomain: object
    entries: dict
    cap: int
    up_to_scalar: bool = False
    unsupported: str | None = None

    @property
    def zero(self) -> bool:
        return self.unsupported is None and all(not v for v in self.entries.values())

    def degree_shift(self) -> int | None:
        """The constant degree shift across nonzero entries (None if empty)."""
        shifts = set()
        for key, coords in self.entries.items():
            for out_key in coords:
                shifts.add(self.codomain.key_degree(out_key)
                           - self.domain.key_degree(key))
        if not shifts:
            return None
        if len(shifts) > 1:
            raise OperationError(f"table degree shift not constant: {sorted(shifts)}")
        return shifts.pop()

    def lines(self, include_zero: bool = False) -> list:
        out = []
        for key in sorted(self.entries, key=lambda k: (self.domain.key_degree(k),
                                                       str(k))):
            coords = self.entries[key]
            if not coords and not include_zero:
                continue
            out.append(f"{self.domain.key_literal(key)} -> "
                       f"{self.codomain.value_literal(coords)}")
        return out


class _Op:
    """A composable operation: domain/codomain boundaries plus a per-key
    evaluation function returning output coordinates."""

    def __init__(self, domain, codomain, apply, up_to_scalar=False,
                 unsupported=None):
        self.domain = domain
        self.codomain = codomain
        self._apply = apply
        self.up_to_scalar = up_to_scalar
        self.unsupported = unsupported
        self._memo: dict = {}

    def apply(self, key):
        if key not in self._memo:
            self._memo[key] = self._apply(key)
        return self._memo[key]


class Evaluator:
    """Evaluates cobordism words over a catalog, producing graded tables.

    Models are cached per label; independent evaluations are pure, and the
    plug-in registry is read-only during evaluation.
    """

    def __init__(self, catalog: Iterable[PairDatum] | dict, cap: int | None = None,
                 group: str | None = None):
        if not isinstance(catalog, dict):
            catalog = {p.name: p for p in catalog}
        self.catalog = catalog
        self.cap = cap
        self.default_group = group
        self._whistle: dict[str, WhistleModels] = {}
        self._open: dict[tuple, openstr.OpenModels] = {}
        self._loops: dict[tuple, MixedModel] = {}
        self._intervals: dict[tuple, TensorModel] = {}
        self._gen_ops: dict[tuple, _Op] = {}

    # -- model access -------------------------------------------------------
    def whistle_models(self, label: str) -> WhistleModels:
        if label not in self._whistle:
            self._whistle[label] = WhistleModels(_resolve(label, self.catalog))
        return self._whistle[label]

    def open_models(self, k: str, h: str, l: str) -> openstr.OpenModels:
        key = (k, h, l)
        if key not in self._open:
            self._open[key] = openstr.OpenModels(
                _resolve(k, self.catalog), _resolve(h, self.catalog),
                _resolve(l, self.catalog))
        return self._open[key]

    def loop_model(self, pair: PairDatum) -> MixedModel:
        key = (pair.group.name, pair.field)
        if key not in self._loops:
            ring = PolyRing(pair.field,
                            [Variable(n, d) for n, d in pair.group.generators])
            self._loops[key] = MixedModel("loop", ring,
                                          [d - 1 for _, d in pair.group.generators])
        return self._loops[key]

    def interval_model(self, a: str, b: str) -> TensorModel:
        key = (a, b)
        if key not in self._intervals:
            if a == b:
                self._intervals[key] = self.whistle_models(a).interval
            else:
                self._intervals[key] = TensorModel(
                    [_resolve(a, self.catalog), _resolve(b, self.catalog)],
                    [(0, 1)])
        return self._intervals[key]

    def boundary_model(self, sig: Signature, group_pair: PairDatum):
        parts = []
        for b in sig:
            if isinstance(b, Circle):
                parts.append(LoopBoundary(self.loop_model(group_pair)))
            else:
                parts.append(IntervalBoundary(self.interval_model(b.left, b.right)))
        if len(parts) == 1:
            return parts[0]
        return ProductBoundary(parts)

    def _group_pair(self, expr: Expr, group: str | None = None) -> PairDatum:
        labels = word_labels(expr)
        if labels:
            pairs = [_resolve(l, self.catalog) for l in labels]
            first = pairs[0].group
            for p in pairs[1:]:
                if p.group != first:
                    raise SignatureError(
                        f"labels {labels[0]} and {p.name} have different groups")
            return pairs[0]
        group = group or self.default_group
        if group is not None:
            for pair in self.catalog.values():
                if pair.group.name == group:
                    return pair
            raise SignatureError(f"no catalog pair with group {group}")
        raise SignatureError(
            "word has no labels; pass group=<name> to anchor circle models")

    # -- generator tables ---------------------------------------------------
    def _gen_op(self, gen: Gen, group_pair: PairDatum, cap: int) -> _Op:
        cache_key = (gen.name, gen.args, group_pair.group.name, cap)
        if cache_key in self._gen_ops:
            return self._gen_ops[cache_key]
        op = self._build_gen_op(gen, group_pair, cap)
        self._gen_ops[cache_key] = op
        return op

    def _build_gen_op(self, gen: Gen, group_pair: PairDatum, cap: int) -> _Op:
        name = gen.name
        if name == "whistle":
            wm = self.whistle_models(gen.args[0])
            dom = LoopBoundary(self.loop_model(wm.pair))
            cod = IntervalBoundary(wm.interval)

            def apply(key):
                value = dmu_whistle(dom.key_class(key), wm)
                return dict(value.rep.terms)
            return _Op(dom, cod, apply)
        if name == "cowhistle":
            wm = self.whistle_models(gen.args[0])
            dom = IntervalBoundary(wm.interval)
            cod = LoopBoundary(self.loop_model(wm.pair))

            def apply(key):
                value = dmu_whistle_op(dom.key_class(key), wm)
                return value.coords()
            return _Op(dom, cod, apply)
        if name == "bv":
            dom = LoopBoundary(self.loop_model(group_pair))
            cod = dom

            def apply(key):
                return bv_operator(dom.key_class(key)).coords()
            return _Op(dom, cod, apply)
        if name == "cyl_closed":
            dom = LoopBoundary(self.loop_model(group_pair))
            return _Op(dom, dom, lambda key: {key: group_pair.field.one})
        if name == "cyl_open":
            dom = IntervalBoundary(self.interval_model(*gen.args))
            return _Op(dom, dom, lambda key: {key: group_pair.field.one})
        if name == "upsilon":
            om = self.open_models(*gen.args)
            dom = IntervalBoundary(om.interval_out)
            cod = ProductBoundary([IntervalBoundary(om.interval_in1),
                                   IntervalBoundary(om.interval_in2)])

            def apply(key):
                zero, wit = openstr.dmu_upsilon(dom.key_class(key), om)
                if not (wit and wit.verified):
                    raise OperationError("containment witness failed")
                return {}
            return _Op(dom, cod, apply)
        if name == "coupsilon":
            om = self.open_models(*gen.args)
            dom = ProductBoundary([IntervalBoundary(om.interval_in1),
                                   IntervalBoundary(om.interval_in2)])
            cod = IntervalBoundary(om.interval_out)
            n1 = om.interval_in1.ring.nvars

            def apply(key):
                m1, m2 = key
                rep = Polynomial(om.double.ring, {tuple(m1) + tuple(m2):
                                                  om.double.field.one})
                value = openstr.dmu_upsilon_op(om.double.make(rep), om)
                return dict(value.rep.terms)
            return _Op(dom, cod, apply)
        if name == "pants_plug":
            plug = PLUG_REGISTRY.get(gen.args[0])
            if plug is None:
                # dual table of a pants with one incoming boundary: it would
                # consume classes on the two outgoing circles
                loop = LoopBoundary(self.loop_model(group_pair))
                dom = ProductBoundary([loop, LoopBoundary(self.loop_model(group_pair))])
                return _Op(dom, loop, lambda key: {}, unsupported=(
                    f"pants_plug({gen.args[0]}): requires an external "
                    f"closed-sector formula; no plug-in registered"))
            return plug.factory(self, cap)
        raise SignatureError(f"unknown generator {name!r}")

    # -- evaluation -----------------------------------------------------------
    def _op_for(self, expr: Expr, group_pair: PairDatum, cap: int) -> _Op:
        if isinstance(expr, Gen):
            return self._gen_op(expr, group_pair, cap)
        if isinstance(expr, Seq):
            ops = [self._op_for(p, group_pair, cap) for p in expr.parts]
            for k in range(len(ops) - 1):
                if not ops[k].codomain.matches(ops[k + 1].domain):
                    raise SignatureError(
                        "operation models do not compose (signature bug)")
            reasons = [op.unsupported for op in ops if op.unsupported]
            dom, cod = ops[0].domain, ops[-1].codomain

            def apply(key):
                coords = ops[0].apply(key)
                for op in ops[1:]:
                    nxt: dict = {}
                    fld = group_pair.field
                    for k2, c in coords.items():
                        if op.domain.key_degree(k2) > cap:
                            raise DegreeCapExceeded(op.domain.key_degree(k2), cap)
                        for k3, c3 in op.apply(k2).items():
                            s = fld.add(nxt.get(k3, fld.zero), fld.mul(c, c3))
                            if fld.is_zero(s):
                                nxt.pop(k3, None)
                            else:
                                nxt[k3] = s
                    coords = nxt
                return coords
            return _Op(dom, cod, apply,
                       up_to_scalar=any(op.up_to_scalar for op in ops),
                       unsupported=reasons[0] if reasons else None)
        if isinstance(expr, Union):
            ops = [self._op_for(p, group_pair, cap) for p in expr.parts]
            dom = ProductBoundary([op.domain for op in ops])
            cod = ProductBoundary([op.codomain for op in ops])
            reasons = [op.unsupported for op in ops if op.unsupported]
            sizes = [len(op.domain.parts) if isinstance(op.domain, ProductBoundary)
                     else 1 for op in ops]

            def apply(key):
                fld = group_pair.field
                out = {(): fld.one}
                offset = 0
                for op, size in zip(ops, sizes):
                    sub = key[offset:offset + size]
                    sub_key = sub if isinstance(op.domain, ProductBoundary) else sub[0]
                    part = op.apply(sub_key)
                    nxt: dict = {}
                    for prefix, c in out.items():
                        for k2, c2 in part.items():
                            tail = k2 if isinstance(op.codomain, ProductBoundary) \
                                else (k2,)
                            nxt[prefix + tuple(tail)] = fld.mul(c, c2)
                    out = nxt
                    offset += size
                return out
            return _Op(dom, cod, apply,
                       up_to_scalar=len(ops) > 1 or any(o.up_to_scalar for o in ops),
                       unsupported=reasons[0] if reasons else None)
        raise TypeError(f"not a cobordism expression: {expr!r}")

    def evaluate(self, expr_or_text, cap: int | None = None,
                 group: str | None = None) -> OperationValue:
        """Materialize the graded operation table of a word up to the cap."""
        expr = parse(expr_or_text) if isinstance(expr_or_text, str) else expr_or_text
        expr = normalize(expr)
        check_signature(expr, self.catalog)
        group_pair = self._group_pair(expr, group)
        if cap is None:
            cap = self.cap
        if cap is None:
            cap = 2 * sum(d for _, d in group_pair.subgroup.generators)
        op = self._op_for(expr, group_pair, cap)
        word = print_expr(expr)
        if op.unsupported:
            return OperationValue(word, op.domain, op.codomain, {}, cap,
                                  up_to_scalar=op.up_to_scalar,
                                  unsupported=op.unsupported)
        entries = {}
        for key in op.domain.keys_through(cap):
            entries[key] = op.apply(key)
        return OperationValue(word, op.domain, op.codomain, entries, cap,
                              up_to_scalar=op.up_to_scalar)


def evaluate(expr_or_text, catalog, cap: int | None = None,
             group: str | None = None) -> OperationValue:
    """One-shot evaluation; builds a throwaway evaluator."""
    return Evaluator(catalog, cap=cap, group=group).evaluate(expr_or_text, cap=cap)


def tables_equal(a: OperationValue, b: OperationValue, field,
                 up_to_scalar: bool = False) -> bool:
    """Entry-for-entry table equality; with ``up_to_scalar`` a single global
    nonzero scalar may relate the two tables (the projective convention)."""
    if a.unsupported or b.unsupported:
        return bool(a.unsupported) == bool(b.unsupported)
    if set(a.entries) != set(b.entries):
        return False
    if not up_to_scalar:
        return a.entries == b.entries
    ratio = None
    for key, ca in a.entries.items():
        cb = b.entries[key]
        if set(ca) != set(cb):
            return False
        for k2, va in ca.items():
            vb = cb[k2]
            if field.is_zero(vb):
                return False
            r = field.div(va, vb)
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return True


def compose_tables(first: OperationValue, then: OperationValue,
                   field) -> OperationValue:
    """Explicit composition of two materialized tables (first, then then).

    This is the independent check for functoriality: the evaluator composes
    per-key evaluation functions, this composes finished tables.
    """
    if first.unsupported or then.unsupported:
        return OperationValue(f"{first.word}; {then.word}", first.domain,
                              then.codomain, {}, first.cap,
                              unsupported=first.unsupported or then.unsupported)
    entries = {}
    for key, coords in first.entries.items():
        out: dict = {}
        for k2, c in coords.items():
            mid = then.entries.get(k2)
            if mid is None:
                raise DegreeCapExceeded(then.domain.key_degree(k2), then.cap)
            for k3, c3 in mid.items():
                s = field.add(out.get(k3, field.zero), field.mul(c, c3))
                if field.is_zero(s):
                    out.pop(k3, None)
                else:
                    out[k3] = s
        entries[key] = out
    return OperationValue(f"{first.word}; {then.word}", first.domain,
                          then.codomain, entries, first.cap,
                          up_to_scalar=first.up_to_scalar or then.up_to_scalar)
