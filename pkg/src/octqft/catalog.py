"""Catalog of group/subgroup pairs given by cohomology presentations.

A pair records the polynomial generators of the two classifying-space
cohomologies, the restriction substitution on generators, and the coefficient
field.  Validation checks the hypotheses the operation modules rely on: equal
rank, degree preservation, the regular-sequence certificate for the difference
ideal (Koszul homology through a cap), finiteness of the restriction quotient,
the optional Weyl-order dimension match, and the degree/characteristic
coprimality condition needed by the composite operation over F_p.

Integral torsion-freeness is group-theoretic and is recorded as a user
assertion in the catalog data, never computed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .field import QQ, FieldError, PrimeField, field_from_name
from .grobner import IdealPresentation, QuotientRing, certify_regular, series_quotient
from .literals import ParseError, parse_polynomial
from .poly import (DegreeError, PolyMatrix, PolyRing, Polynomial, Variable,
                   determinant)


class CatalogError(ValueError):
    """Malformed catalog data; message carries entry/field diagnostics."""


@dataclass(frozen=True)
class GroupPresentation:
    """A compact group named through its classifying-space generators."""

    name: str
    generators: tuple  # ((name, even degree), ...)
    weyl_order: int | None = None

    def __post_init__(self):
        names = [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise CatalogError(f"group {self.name}: duplicate generator names")
        for n, d in self.generators:
            if d <= 0 or d % 2:
                raise CatalogError(
                    f"group {self.name}: generator {n} has odd or nonpositive "
                    f"degree {d}")
        if self.weyl_order is not None and self.weyl_order <= 0:
            raise CatalogError(f"group {self.name}: weyl_order must be positive")

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    mandatory: bool
    detail: str


@dataclass
class ValidationReport:
    pair_name: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    def get(self, name: str) -> CheckResult | None:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    @property
    def coprimality_ok(self) -> bool:
        c = self.get("fp_coprimality")
        return c is None or c.passed

    def summary(self) -> str:
        if self.ok:
            extra = "" if self.coprimality_ok else " (composite-unreliable over this field)"
            return "valid" + extra
        failed = [c.name for c in self.checks if c.mandatory and not c.passed]
        return "INVALID: " + ", ".join(failed)


class PairDatum:
    """A catalog pair (G, H) with its restriction substitution."""

    def __init__(self, name: str, group: GroupPresentation,
                 subgroup: GroupPresentation, restriction: dict,
                 field=QQ, torsion_free_asserted: bool = False,
                 dim_h: int | None = None, dim_gh: int | None = None):
        self.name = name
        self.group = group
        self.subgroup = subgroup
        self.field = field
        self.torsion_free_asserted = torsion_free_asserted
        self.dim_h = dim_h
        self.dim_gh = dim_gh
        self.x_ring = PolyRing(field, [Variable(n, d) for n, d in group.generators])
        self.u_ring = PolyRing(field, [Variable(n, d) for n, d in subgroup.generators])
        rho: dict[Variable, Polynomial] = {}
        for xv in self.x_ring.variables:
            text = restriction.get(xv.name)
            if text is None:
                raise CatalogError(
                    f"pair {name}: restriction missing for generator {xv.name}")
            if isinstance(text, Polynomial):
                rho[xv] = text
            else:
                try:
                    rho[xv] = parse_polynomial(text, self.u_ring)
                except ParseError as exc:
                    raise CatalogError(
                        f"pair {name}: restriction of {xv.name}: {exc}") from exc
        extra = set(restriction) - {v.name for v in self.x_ring.variables}
        if extra:
            raise CatalogError(f"pair {name}: restriction of unknown generators "
                               f"{sorted(extra)}")
        self.restriction = rho
        self.restriction_text = {v.name: str(p) for v, p in rho.items()}
        self._validation: ValidationReport | None = None

    # -- basic derived data -------------------------------------------------
    @property
    def rank(self) -> int:
        return self.group.rank

    def restrict(self, p: Polynomial) -> Polynomial:
        """Apply the restriction substitution to a group-side polynomial."""
        if p.is_zero:
            return self.u_ring.zero()
        return p.substitute(self.restriction)

    def restriction_images(self) -> list:
        return [(v, self.restriction[v]) for v in self.x_ring.variables]

    def jacobian_matrix(self) -> PolyMatrix:
        rows = []
        for xv in self.x_ring.variables:
            img = self.restriction[xv]
            rows.append([img.diff(uv) for uv in self.u_ring.variables])
        return PolyMatrix(self.u_ring, rows)

    def jacobian_determinant(self) -> Polynomial:
        return determinant(self.jacobian_matrix())

    def restriction_quotient(self) -> QuotientRing:
        gens = [self.restriction[v] for v in self.x_ring.variables
                if not self.restriction[v].is_zero]
        return QuotientRing(IdealPresentation(self.u_ring, gens))

    def with_field(self, new_field) -> "PairDatum":
        """The same pair with coefficients moved to another field."""
        return PairDatum(self.name, self.group, self.subgroup,
                         dict(self.restriction_text), field=new_field,
                         torsion_free_asserted=self.torsion_free_asserted,
                         dim_h=self.dim_h, dim_gh=self.dim_gh)

    def __repr__(self):
        return f"PairDatum({self.name}, {self.field!r})"


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _group_from_json(data, where: str) -> GroupPresentation:
    try:
        gens = tuple((g["name"], int(g["degree"])) for g in data["generators"])
        return GroupPresentation(data["name"], gens, data.get("weyl_order"))
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"{where}: malformed group block ({exc})") from exc


def pairs_from_json(data) -> list:
    if not isinstance(data, dict) or "pairs" not in data:
        raise CatalogError("catalog must be an object with a 'pairs' list")
    out = []
    for i, entry in enumerate(data["pairs"]):
        where = f"pairs[{i}]"
        try:
            name = entry["name"]
        except (KeyError, TypeError) as exc:
            raise CatalogError(f"{where}: missing name") from exc
        where = f"pairs[{i}] ({name})"
        try:
            fld = field_from_name(entry.get("field", "Q"))
        except FieldError as exc:
            raise CatalogError(f"{where}: {exc}") from exc
        for block in ("group", "subgroup"):
            if block not in entry:
                raise CatalogError(f"{where}: missing {block} block")
        group = _group_from_json(entry["group"], where + ".group")
        subgroup = _group_from_json(entry["subgroup"], where + ".subgroup")
        restriction = entry.get("restriction")
        if not isinstance(restriction, dict):
            raise CatalogError(f"{where}: restriction must be an object")
        out.append(PairDatum(
            name, group, subgroup, restriction, field=fld,
            torsion_free_asserted=bool(entry.get("torsion_free_asserted", False)),
            dim_h=entry.get("dim_h"), dim_gh=entry.get("dim_gh")))
    return out


def load_catalog(path) -> list:
    """Parse a catalog file into (unvalidated) pairs."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path} is not valid JSON: {exc}") from exc
    return pairs_from_json(data)


def builtin_pairs() -> list:
    """The pairs shipped with the package (all over Q)."""
    text = resources.files("octqft").joinpath("data/builtin_pairs.json").read_text()
    return pairs_from_json(json.loads(text))


def builtin_pair(name: str, field=None) -> PairDatum:
    for pair in builtin_pairs():
        if pair.name == name:
            return pair.with_field(field) if field is not None else pair
    raise KeyError(f"no builtin pair named {name!r}")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def difference_ring(pair: PairDatum) -> tuple[PolyRing, list]:
    """The double ring K[u (x) 1, 1 (x) u] with the difference sequence
    rho(x_i) (x) 1 - 1 (x) rho(x_i)."""
    us = [Variable(v.name, v.degree, 0) for v in pair.u_ring.variables]
    vs = [Variable(f"v_{v.name}", v.degree, 1) for v in pair.u_ring.variables]
    ring = PolyRing(pair.field, us + vs)
    n = len(us)

    def emb(p: Polynomial, shift: int) -> Polynomial:
        terms = {}
        for m, c in p.terms.items():
            mono = (m + (0,) * n) if shift == 0 else ((0,) * n + m)
            terms[mono] = c
        return Polynomial(ring, terms, _clean=True)

    seq = []
    for xv in pair.x_ring.variables:
        img = pair.restriction[xv]
        seq.append(emb(img, 0) - emb(img, 1))
    return ring, seq


def validate_pair(pair: PairDatum, degree_cap: int | None = None,
                  koszul_cap: int | None = None) -> ValidationReport:
    """Run all hypothesis checks; failures are report entries, not errors."""
    checks: list[CheckResult] = []
    sum_du = sum(v.degree for v in pair.u_ring.variables)
    if degree_cap is None:
        degree_cap = 2 * sum_du
    if koszul_cap is None:
        koszul_cap = min(degree_cap, 12)

    rank_ok = pair.group.rank == pair.subgroup.rank
    checks.append(CheckResult(
        "rank", rank_ok, True,
        f"{pair.group.rank} group generators vs {pair.subgroup.rank} subgroup "
        f"generators"))

    degree_ok = True
    details = []
    for xv in pair.x_ring.variables:
        img = pair.restriction[xv]
        if img.is_zero or not img.is_homogeneous() or img.degree() != xv.degree:
            degree_ok = False
            details.append(f"{xv.name} -> {img} (expected degree {xv.degree})")
    checks.append(CheckResult(
        "degrees", degree_ok, True,
        "restriction is degree-preserving" if degree_ok else "; ".join(details)))

    if not (rank_ok and degree_ok):
        report = ValidationReport(pair.name, checks)
        pair._validation = report
        return report

    # finite quotient + Poincare closed form agreement
    quotient = pair.restriction_quotient()
    finite = quotient.is_finite_dimensional()
    checks.append(CheckResult(
        "finite_quotient", finite, True,
        "restriction quotient is finite dimensional" if finite
        else "restriction quotient has unbounded standard monomials"))

    series = series_quotient([v.degree for v in pair.x_ring.variables],
                             [v.degree for v in pair.u_ring.variables],
                             cap=degree_cap)
    negative = any(c < 0 for c in series.coefficients)
    if finite and not negative:
        counts_match = all(
            series.coefficient(d) == len(quotient.standard_monomials(d))
            for d in range(degree_cap + 1))
        total = quotient.total_dimension()
        series_ok = counts_match and (series.finite_total == total)
        detail = (f"quotient dimension {total} matches "
                  f"{series.closed_form()}" if series_ok else
                  "Groebner basis count disagrees with the closed form")
    else:
        series_ok = False
        total = None
        detail = ("closed-form expansion has negative coefficients"
                  if negative else "quotient not finite dimensional")
    checks.append(CheckResult("poincare", series_ok, True, detail))

    # regular-sequence certificate for the difference sequence
    ring2, seq = difference_ring(pair)
    try:
        regular, table, mode = certify_regular(seq, ring2, koszul_cap)
        detail = (f"Koszul H_i vanishes for i>0 through degree {koszul_cap} "
                  f"({mode})" if regular else
                  f"nonzero Koszul homology {table.nonzero_positive()[:3]} ({mode})")
    except DegreeError as exc:
        regular, detail = False, str(exc)
    checks.append(CheckResult("koszul_regular", regular, True, detail))

    if pair.group.weyl_order and pair.subgroup.weyl_order and total is not None:
        expected, rem = divmod(pair.group.weyl_order, pair.subgroup.weyl_order)
        weyl_ok = rem == 0 and expected == total
        checks.append(CheckResult(
            "weyl_dimension", weyl_ok, False,
            f"|W_G|/|W_H| = {pair.group.weyl_order}/{pair.subgroup.weyl_order} "
            f"vs quotient dimension {total}"))

    if pair.dim_gh is not None:
        degree_lambda = sum(v.degree for v in pair.x_ring.variables) - sum_du
        checks.append(CheckResult(
            "dim_gh_metadata", degree_lambda == pair.dim_gh, False,
            f"recorded dim G/H {pair.dim_gh} vs degree shift {degree_lambda}"))
    if pair.dim_h is not None:
        shift = sum_du - pair.rank
        checks.append(CheckResult(
            "dim_h_metadata", shift == pair.dim_h, False,
            f"recorded dim H {pair.dim_h} vs degree data {shift}"))

    if isinstance(pair.field, PrimeField):
        p = pair.field.p
        bad = [xv.name for xv in pair.x_ring.variables
               if math.gcd(xv.degree, p) != 1]
        checks.append(CheckResult(
            "fp_coprimality", not bad, False,
            "all restriction degrees coprime to p" if not bad else
            f"gcd(deg, {p}) != 1 for {bad}; composite operation unreliable"))

    checks.append(CheckResult(
        "torsion_free_asserted", pair.torsion_free_asserted, False,
        "recorded user assertion (not computed)"))

    report = ValidationReport(pair.name, checks)
    pair._validation = report
    return report


def ensure_validated(pair: PairDatum, degree_cap: int | None = None) -> ValidationReport:
    """Validate on first use and cache the report on the pair."""
    if pair._validation is None:
        validate_pair(pair, degree_cap=degree_cap)
    return pair._validation


def poincare_series(pair: PairDatum, cap: int | None = None):
    """Closed form prod(1-t^deg x_i)/prod(1-t^deg u_j) with its expansion.

    Requires equal generator counts; the expansion must match the
    standard-monomial counts of the restriction quotient (checked during
    validation), and a negative coefficient marks the pair invalid.
    """
    if pair.group.rank != pair.subgroup.rank:
        raise CatalogError(f"pair {pair.name}: generator counts differ")
    if cap is None:
        cap = 2 * sum(v.degree for v in pair.u_ring.variables)
    return series_quotient([v.degree for v in pair.x_ring.variables],
                           [v.degree for v in pair.u_ring.variables], cap)
