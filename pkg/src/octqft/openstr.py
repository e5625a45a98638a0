"""The open sector: models for the basic open cobordism joining two labeled
intervals into one, the vanishing dual operation with its image-containment
witness, the middle-factor fundamental-class representative, and the opposite
operation computed by free-module decomposition of the middle factor.

Labels K, H, L are catalog pairs over one common group.  The three quotient
presentations and the two structure maps (inserting 1 into the middle factor,
and multiplying the two middle factors) are all tensor models from
``models``; the decomposition of the middle factor over the (K, L) quotient is
solved degree by degree by exact linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .catalog import PairDatum, ensure_validated
from .grobner import DecompositionError
from .linalg import SingularMatrixError
from .models import TensorClass, TensorModel
from .poly import DegreeError, Polynomial, RingMismatchError
from .whistle import JacobianClass, OperationError, jacobian_class


@dataclass(frozen=True)
class UpsilonWitness:
    """Certificate that the out-restriction image of a class lies in the
    in-restriction image: an explicit preimage under the middle
    multiplication, re-verified."""

    preimage: TensorClass
    verified: bool


class OpenModels:
    """Presentations and structure maps for labels (K, H, L) over one group."""

    def __init__(self, k_pair: PairDatum, h_pair: PairDatum, l_pair: PairDatum,
                 degree_cap: int | None = None):
        for pair in (k_pair, h_pair, l_pair):
            report = ensure_validated(pair, degree_cap)
            if not report.ok:
                raise OperationError(
                    f"label {pair.name} failed validation: {report.summary()}")
        if not (k_pair.group == h_pair.group == l_pair.group):
            raise RingMismatchError("open labels must share the ambient group")
        self.k_pair, self.h_pair, self.l_pair = k_pair, h_pair, l_pair
        self.interval_in1 = TensorModel([k_pair, h_pair], [(0, 1)])
        self.interval_in2 = TensorModel([h_pair, l_pair], [(0, 1)])
        self.interval_out = TensorModel([k_pair, l_pair], [(0, 1)])
        self.upsilon = TensorModel([k_pair, h_pair, l_pair], [(0, 1), (1, 2)],
                                   prefixes=("f0_", "f1_", "f2_"))
        self.double = TensorModel([k_pair, h_pair, h_pair, l_pair],
                                  [(0, 1), (2, 3)],
                                  prefixes=("f0_", "f1_", "f2_", "f3_"))
        self._jacobian: JacobianClass | None = None
        self._middle_solvers: dict[int, tuple] = {}

    # -- structure maps ----------------------------------------------------
    def phi(self, c: TensorClass) -> TensorClass:
        """Insert 1 into the middle factor: the out-boundary restriction."""
        return self.interval_out.push(c, self.upsilon, [0, 2])

    def middle_mult(self, c: TensorClass) -> TensorClass:
        """Multiply the two middle factors: the in-boundary restriction."""
        return self.double.push(c, self.upsilon, [0, 1, 1, 2])

    @property
    def jacobian(self) -> JacobianClass:
        if self._jacobian is None:
            self._jacobian = jacobian_class(self.h_pair)
        return self._jacobian

    def default_cap(self) -> int:
        return 2 * sum(v.degree for v in self.h_pair.u_ring.variables)

    # -- middle-factor free module decomposition ----------------------------
    def _quotient_basis_h(self):
        quotient = self.h_pair.restriction_quotient()
        basis = []
        for d, ms in sorted(quotient.all_standard_monomials().items()):
            basis.extend(ms)
        return basis

    def _middle_system(self, degree: int):
        cached = self._middle_solvers.get(degree)
        if cached is not None:
            return cached
        ups = self.upsilon
        rows = ups.basis(degree)
        row_index = {m: i for i, m in enumerate(rows)}
        h_ring = self.h_pair.u_ring
        unknowns = []
        columns = []
        for b in self._quotient_basis_h():
            b_deg = h_ring.monomial_degree(b)
            if b_deg > degree:
                continue
            fibre = ups.embed(1, Polynomial(h_ring, {b: h_ring.field.one}))
            for s in self.interval_out.basis(degree - b_deg):
                base = self.interval_out.monomial_class(s)
                product = self.phi(base).rep * fibre
                nf = ups.quotient.normal_form(product)
                col = [ups.field.zero] * len(rows)
                for mono, coeff in nf.terms.items():
                    pos = row_index.get(mono)
                    if pos is None:
                        raise DecompositionError(
                            "middle decomposition: term outside the standard slice")
                    col[pos] = coeff
                unknowns.append((b, s))
                columns.append(col)
        if len(unknowns) != len(rows):
            raise DecompositionError(
                f"middle decomposition rank mismatch in degree {degree}: "
                f"{len(unknowns)} module coordinates vs {len(rows)} dimensions")
        a_rows = [[columns[j][i] for j in range(len(columns))]
                  for i in range(len(rows))]
        solver = linalg.SquareSolver(a_rows, ups.field)
        data = (solver, unknowns, rows, row_index)
        self._middle_solvers[degree] = data
        return data

    def middle_top_coefficient(self, c: TensorClass) -> TensorClass:
        """The coordinate of an upsilon class along 1 (x) b_top (x) 1, as an
        out-interval class (before the fundamental-class scaling)."""
        if c.rep.is_zero:
            return self.interval_out.zero()
        jac = self.jacobian
        field = self.upsilon.field
        total = self.interval_out.zero()
        for d, component in sorted(c.rep.homogeneous_components().items()):
            solver, unknowns, rows, row_index = self._middle_system(d)
            vec = [field.zero] * len(rows)
            for mono, coeff in component.terms.items():
                pos = row_index.get(mono)
                if pos is None:
                    raise DecompositionError("class has a non-reduced term")
                vec[pos] = coeff
            wanted = [i for i, (b, _) in enumerate(unknowns) if b == jac.b_top]
            if not wanted:
                continue
            try:
                inv_rows = solver.inverse_rows(wanted)
            except SingularMatrixError as exc:
                raise DecompositionError(str(exc)) from exc
            terms = {}
            for idx, row in zip(wanted, inv_rows):
                _, s = unknowns[idx]
                acc = field.zero
                for a, x in zip(row, vec):
                    if not field.is_zero(field.of(x)) and not field.is_zero(field.of(a)):
                        acc = field.add(acc, field.mul(field.of(a), field.of(x)))
                if not field.is_zero(acc):
                    terms[s] = acc
            total = total + TensorClass(
                self.interval_out,
                Polynomial(self.interval_out.ring, terms, _clean=True))
        return total


def build_open_models(k_pair: PairDatum, h_pair: PairDatum, l_pair: PairDatum,
                      degree_cap: int | None = None) -> OpenModels:
    """Presentations plus the structure maps for the open cobordism."""
    return OpenModels(k_pair, h_pair, l_pair, degree_cap)


def dmu_upsilon(c: TensorClass, models: OpenModels,
                witness: bool = True) -> tuple[TensorClass, UpsilonWitness | None]:
    """The dual joining operation: always zero, optionally with the explicit
    containment witness that forces the vanishing.

    The out-restriction of any class equals the in-restriction of the class
    obtained by inserting 1 between the two middle slots, so the image lies
    inside the in-restriction image, where the odd-fibre integration vanishes.
    """
    if c.model.ring != models.interval_out.ring:
        raise RingMismatchError("input is not an out-interval class")
    wit = None
    if witness:
        double = models.double
        out_ring = models.interval_out.ring
        k_size = models.k_pair.u_ring.nvars
        terms = {}
        for mono, coeff in c.rep.terms.items():
            k_part, l_part = models.interval_out.split_monomial(mono)
            new = double.ring.mono_mul(
                double.embed_monomial(0, k_part), double.embed_monomial(3, l_part))
            terms[new] = coeff
        preimage = double.make(Polynomial(double.ring, terms, _clean=True))
        ok = models.middle_mult(preimage) == models.phi(c)
        if not ok:
            raise OperationError(
                "containment witness failed; the presentation is inconsistent")
        wit = UpsilonWitness(preimage, ok)
    return models.double.zero(), wit


def containment_certificate(models: OpenModels, cap: int | None = None) -> dict:
    """Per-degree witness report: each standard monomial of the out-interval
    has a verified middle-multiplication preimage."""
    if cap is None:
        cap = models.default_cap()
    report = {}
    for d in range(cap + 1):
        basis = models.interval_out.basis(d)
        count = 0
        for mono in basis:
            _, wit = dmu_upsilon(models.interval_out.monomial_class(mono), models)
            if not (wit and wit.verified):
                raise OperationError(f"witness failed in degree {d}")
            count += 1
        if basis:
            report[d] = count
    return report


def lambda_upsilon(models: OpenModels) -> TensorClass:
    """The middle-factor representative 1 (x) J (x) 1 of the fundamental
    class, verified by projecting onto the fibre: killing the outer
    augmentation ideals and reducing modulo the restriction ideal must give a
    nonzero multiple of the top standard monomial."""
    jac = models.jacobian
    ups = models.upsilon
    h_ring = models.h_pair.u_ring
    cls = ups.make(ups.embed(1, jac.lambda_w))
    # fibre projection: outer variables to zero, middle factor to H's ring
    mapping = {}
    for v in models.k_pair.u_ring.variables:
        mapping[ups.ring.variable("f0_" + v.name)] = h_ring.zero()
    for v in h_ring.variables:
        mapping[ups.ring.variable("f1_" + v.name)] = h_ring.gen(v)
    for v in models.l_pair.u_ring.variables:
        mapping[ups.ring.variable("f2_" + v.name)] = h_ring.zero()
    projected = (cls.rep.substitute(mapping, check_degree=False)
                 if not cls.rep.is_zero else h_ring.zero())
    nf = models.h_pair.restriction_quotient().normal_form(projected)
    if nf.is_zero or set(nf.terms) != {jac.b_top}:
        raise OperationError("fibre projection of the representative is not the "
                             "fundamental class (degree condition failure)")
    return cls


def dmu_upsilon_op(c: TensorClass, models: OpenModels,
                   allow_inhomogeneous: bool = False) -> TensorClass:
    """The dual splitting operation: double-interval classes to out-interval
    classes, by multiplying the middle factors and extracting the top
    fibre coordinate scaled by the fundamental-class normalization."""
    if c.model.ring != models.double.ring:
        raise RingMismatchError("input is not a double-interval class")
    if not allow_inhomogeneous and not c.rep.is_homogeneous():
        raise DegreeError("operation input must be homogeneous")
    jac = models.jacobian
    merged = models.middle_mult(c)
    top = models.middle_top_coefficient(merged)
    return top.scale(models.upsilon.field.inv(jac.scalar))
