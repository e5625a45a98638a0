"""Exact coefficient arithmetic: the rationals and odd prime residue fields.

Rational coefficients are ``fractions.Fraction`` values (always in lowest
terms with positive denominator); prime-field coefficients are plain ints in
``[0, p)``.  Field objects supply the arithmetic so the polynomial layer never
branches on the coefficient representation.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    """Invalid field construction or un-coercible coefficient."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Rationals:
    """The field of exact rationals."""

    char = 0
    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def of(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise FieldError(f"cannot coerce {value!r} into Q")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return Fraction(1) / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return a == 0

    def to_str(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    """The residue field F_p for an odd prime p.

    p = 2 is rejected unless ``allow_even=True`` is passed explicitly: the
    torsion-free hypotheses of the catalog pairs typically exclude it.
    """

    def __init__(self, p: int, allow_even: bool = False):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if p == 2 and not allow_even:
            raise FieldError("p=2 requires the explicit allow_even override")
        self.p = p
        self.char = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def of(self, value):
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise FieldError(f"denominator of {value} vanishes mod {self.p}")
            return value.numerator * pow(den, self.p - 2, self.p) % self.p
        raise FieldError(f"cannot coerce {value!r} into F_{self.p}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def to_str(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return self.name


QQ = Rationals()


def field_from_name(name) -> Rationals | PrimeField:
    """Parse a field tag: "Q", "Fp:<p>", or the catalog form {"Fp": p}."""
    if isinstance(name, dict):
        if set(name) == {"Fp"}:
            return PrimeField(int(name["Fp"]))
        raise FieldError(f"unrecognized field spec {name!r}")
    if name == "Q":
        return QQ
    if isinstance(name, str) and name.startswith("Fp:"):
        return PrimeField(int(name.split(":", 1)[1]))
    raise FieldError(f"unrecognized field spec {name!r}")
