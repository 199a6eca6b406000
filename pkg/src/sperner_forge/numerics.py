"""Exact scalars: big rationals and the algebraic-dyadic extension.

Everything downstream computes with two scalar kinds:

- ``Rational`` (an alias of :class:`fractions.Fraction`): coordinates,
  thresholds, distances under the plain max-metric.
- :class:`AlgebraicDyadic`: finite sums ``sum_i r_i * 2**q_i`` with rational
  ``r_i`` and rational ``q_i``.  These arise because the shrinking factor is
  2 raised to a rational power, and shrunk distances mix such monomials with
  ordinary rationals.

An algebraic dyadic is stored as a polynomial in ``beta = 2**(1/L)`` where
``L`` is the least common multiple of the exponent denominators.  Since
``x**L - 2`` is irreducible over the rationals (Eisenstein at 2), the powers
``1, beta, ..., beta**(L-1)`` are linearly independent, so exact equality is
coefficient identity.  Strict order is decided by evaluating each term inside
a shrinking dyadic interval; a nonzero algebraic value is bounded away from
zero, so the refinement terminates.

There are no tolerance parameters anywhere in this module.  A non-validated
floating-point comparison path exists for exploratory sweeps behind
:func:`unsafe_float`; nothing in the test suite uses it.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import gmpy2

Rational = Fraction

Scalar = Union[Fraction, "AlgebraicDyadic"]

ZERO = Fraction(0)
ONE = Fraction(1)

_DEFAULT_ROOT_CAP = 2**16

_root_cap = int(os.environ.get("SPERNER_FORGE_ROOT_CAP", _DEFAULT_ROOT_CAP))

_unsafe_float = False


class RootOrderExceeded(ArithmeticError):
    """Raised when a root order would exceed the configured cap."""


def root_cap() -> int:
    return _root_cap


def set_root_cap(cap: int) -> None:
    global _root_cap
    if cap < 1:
        raise ValueError("root-order cap must be positive")
    _root_cap = cap


@contextmanager
def unsafe_float():
    """Decide comparisons by double-precision floats inside the block.

    Exploratory sweeps only: misclassifies values closer than float noise.
    """
    global _unsafe_float
    prev = _unsafe_float
    _unsafe_float = True
    try:
        yield
    finally:
        _unsafe_float = prev


def rational(value) -> Fraction:
    """Parse a rational from an int, Fraction, or a "p/q" / "p" string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, AlgebraicDyadic):
        return value.to_fraction()
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


@lru_cache(maxsize=4096)
def _pow2_bounds(e: int, order: int, prec: int) -> tuple[Fraction, Fraction]:
    """Dyadic bracket of 2**(e/order) with gap at most 2**-prec; 0 <= e < order."""
    if e == 0:
        return ONE, ONE
    root, exact = gmpy2.iroot(gmpy2.mpz(1) << (e + order * prec), order)
    lo = Fraction(int(root), 1 << prec)
    if exact:
        return lo, lo
    return lo, Fraction(int(root) + 1, 1 << prec)


class AlgebraicDyadic:
    """Exact value ``sum r * 2**(e/L)`` with rational coefficients.

    Canonical form: exponents ``e`` satisfy ``0 <= e < L`` (integer parts are
    folded into the coefficients as powers of two), zero coefficients are
    dropped, and ``L`` is reduced to the least order that still expresses all
    exponents.  Zero is the empty term list with ``L = 1``.  Instances are
    immutable and hashable; rational values hash like their Fraction.
    """

    __slots__ = ("_order", "_terms", "_hash")

    def __init__(self, order: int, terms: Iterable[tuple[int, Fraction]]):
        merged: dict[int, Fraction] = {}
        for e, r in terms:
            if r == 0:
                continue
            shift, e = divmod(e, order)
            if shift:
                r = r * (Fraction(2) ** shift)
            merged[e] = merged.get(e, ZERO) + r
        merged = {e: r for e, r in merged.items() if r != 0}
        if not merged:
            order = 1
        else:
            g = math.gcd(order, *merged)
            if g > 1:
                merged = {e // g: r for e, r in merged.items()}
                order //= g
        if order > _root_cap:
            raise RootOrderExceeded(f"root order {order} exceeds cap {_root_cap}")
        self._order = order
        self._terms = tuple(sorted(merged.items()))
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "AlgebraicDyadic":
        return cls(1, [(0, rational(value))])

    @classmethod
    def from_pow2(cls, q: Fraction) -> "AlgebraicDyadic":
        """The exact value ``2**q`` for rational ``q``, as a single term."""
        q = rational(q)
        if q.denominator > _root_cap:
            raise RootOrderExceeded(
                f"exponent denominator {q.denominator} exceeds cap {_root_cap}"
            )
        return cls(q.denominator, [(q.numerator, ONE)])

    # -- inspection ---------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return self._order == 1

    def to_fraction(self) -> Fraction:
        if self._order != 1:
            raise ValueError(f"{self!r} is irrational")
        return self._terms[0][1] if self._terms else ZERO

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(e, self._order) for e, _ in self._terms)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(value) -> "AlgebraicDyadic | None":
        if isinstance(value, AlgebraicDyadic):
            return value
        if isinstance(value, (int, Fraction)):
            return AlgebraicDyadic(1, [(0, Fraction(value))])
        return None

    def _common_order(self, other: "AlgebraicDyadic") -> tuple[int, list, list]:
        order = self._order * other._order // math.gcd(self._order, other._order)
        if order > _root_cap:
            raise RootOrderExceeded(f"merged root order {order} exceeds cap {_root_cap}")
        a = [(e * (order // self._order), r) for e, r in self._terms]
        b = [(e * (order // other._order), r) for e, r in other._terms]
        return order, a, b

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        order, a, b = self._common_order(other)
        return AlgebraicDyadic(order, a + b)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicDyadic(self._order, [(e, -r) for e, r in self._terms])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        order, a, b = self._common_order(other)
        terms = [(ea + eb, ra * rb) for ea, ra in a for eb, rb in b]
        return AlgebraicDyadic(order, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a rational (or rational-valued dyadic) scale only."""
        if isinstance(other, AlgebraicDyadic):
            other = other.to_fraction()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return self * (Fraction(1) / Fraction(other))

    def __abs__(self):
        return -self if self._sign() < 0 else self

    # -- exact sign and comparisons ------------------------------------

    def _sign(self) -> int:
        if not self._terms:
            return 0
        if _unsafe_float:
            approx = float(self)
            return (approx > 0) - (approx < 0)
        positive = all(r > 0 for _, r in self._terms)
        if positive:
            return 1
        if all(r < 0 for _, r in self._terms):
            return -1
        if self._order == 1:
            r = self._terms[0][1]
            return (r > 0) - (r < 0)
        if len(self._terms) == 2:
            sign_fast = self._two_term_sign()
            if sign_fast is not None:
                return sign_fast
        prec = 32
        while prec <= (1 << 24):
            lo = hi = ZERO
            for e, r in self._terms:
                blo, bhi = _pow2_bounds(e, self._order, prec)
                if r > 0:
                    lo += r * blo
                    hi += r * bhi
                else:
                    lo += r * bhi
                    hi += r * blo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise ArithmeticError(f"sign of {self!r} undecided at {prec} bits")

    def _two_term_sign(self) -> int | None:
        """Exact sign of r1*b**e1 + r2*b**e2 with opposite-sign coefficients.

        Reduces to an integer power comparison: with q = |r1/r2| > 0 and
        d = e2 - e1, the sign is that of q**L - 2**d.  Skipped when the
        integer powers would be unreasonably large.
        """
        (e1, r1), (e2, r2) = self._terms
        if (r1 > 0) == (r2 > 0):
            return None
        if r1 < 0:
            (e1, r1), (e2, r2) = (e2, r2), (e1, r1)
        q = r1 / -r2
        L = self._order
        bits = max(q.numerator.bit_length(), q.denominator.bit_length())
        if L * bits > 2_000_000:
            return None
        d = e2 - e1
        lhs = q.numerator**L
        rhs = q.denominator**L
        if d >= 0:
            rhs <<= d
        else:
            lhs <<= -d
        # positive part r1*b**e1 dominates iff q**L > 2**d
        return (lhs > rhs) - (lhs < rhs)

    def _diff_sign(self, other) -> int:
        other = self._coerce(other)
        if other is None:
            raise TypeError(f"cannot compare AlgebraicDyadic with {type(other).__name__}")
        return (self - other)._sign()

    def __eq__(self, other):
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._order == coerced._order and self._terms == coerced._terms

    def __lt__(self, other):
        return self._diff_sign(other) < 0

    def __le__(self, other):
        return self._diff_sign(other) <= 0

    def __gt__(self, other):
        return self._diff_sign(other) > 0

    def __ge__(self, other):
        return self._diff_sign(other) >= 0

    def __hash__(self):
        if self._hash is None:
            if self._order == 1:
                self._hash = hash(self.to_fraction())
            else:
                self._hash = hash((self._order, self._terms))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        lo, hi = self.bounds(64)
        return float((lo + hi) / 2)

    def bounds(self, prec: int) -> tuple[Fraction, Fraction]:
        """Rational bracket [lo, hi] of the value, with per-term gap 2**-prec."""
        lo = hi = ZERO
        for e, r in self._terms:
            blo, bhi = _pow2_bounds(e, self._order, prec)
            if r > 0:
                lo += r * blo
                hi += r * bhi
            else:
                lo += r * bhi
                hi += r * blo
        return lo, hi

    def __repr__(self):
        if not self._terms:
            return "AlgebraicDyadic(0)"
        parts = [
            f"{r}*2^({Fraction(e, self._order)})" if e else f"{r}"
            for e, r in self._terms
        ]
        return f"AlgebraicDyadic({' + '.join(parts)})"

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "L": self._order,
            "terms": [
                [format_rational(r), format_rational(Fraction(e, self._order))]
                for e, r in self._terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraicDyadic":
        order = int(data["L"])
        terms = []
        for coeff, exponent in data["terms"]:
            q = Fraction(exponent)
            terms.append((q.numerator * (order // q.denominator), Fraction(coeff)))
        return cls(order, terms)


def pow2(q) -> AlgebraicDyadic:
    """Exact ``2**q`` for rational ``q``."""
    return AlgebraicDyadic.from_pow2(rational(q))


def compare(a: Scalar, b: Scalar) -> int:
    """Exact three-way comparison: -1, 0, or 1."""
    if isinstance(a, AlgebraicDyadic):
        return a._diff_sign(b)
    if isinstance(b, AlgebraicDyadic):
        return -b._diff_sign(a)
    return (a > b) - (a < b)


def sign(a: Scalar) -> int:
    if isinstance(a, AlgebraicDyadic):
        return a._sign()
    return (a > 0) - (a < 0)


def clamp_unit(a: Scalar) -> Scalar:
    """min(1, max(0, a)), the clamp used by every coordinate converter."""
    if sign(a) < 0:
        return ZERO
    if compare(a, ONE) > 0:
        return ONE
    return a


def simplify(a: Scalar) -> Scalar:
    """Collapse a rational-valued dyadic back to a Fraction."""
    if isinstance(a, AlgebraicDyadic) and a.is_rational():
        return a.to_fraction()
    return a


def exact_floor(a: Scalar) -> int:
    """Largest integer <= a, decided exactly for both scalar kinds."""
    if isinstance(a, (int, Fraction)):
        return math.floor(a)
    if a.is_rational():
        return math.floor(a.to_fraction())
    prec = 32
    while prec <= (1 << 24):
        lo, hi = a.bounds(prec)
        flo, fhi = math.floor(lo), math.floor(hi)
        if flo == fhi:
            return flo
        # The bracket straddles an integer; an irrational value cannot equal
        # it, so refining must eventually separate them.
        prec *= 2
    raise ArithmeticError(f"floor of {a!r} undecided at {prec} bits")


def scalar_to_json(a: Scalar):
    a = simplify(a)
    if isinstance(a, Fraction):
        return format_rational(a)
    return a.to_json()


def scalar_from_json(data) -> Scalar:
    if isinstance(data, str):
        return Fraction(data)
    if isinstance(data, int):
        return Fraction(data)
    return simplify(AlgebraicDyadic.from_json(data))
