"""Truncated multivariate polynomials with exact rational coefficients.

A ``ScalarJet`` of dimension ``m`` and order ``k`` is a polynomial in
``z^0, ..., z^{m-1}`` of total degree at most ``k``.  Coefficients are the
plain Taylor coefficients: the monomial ``z^a`` carries ``d^a f(0) / a!``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, StructuralError

Monomial = tuple[int, ...]


def as_rational(value) -> Fraction:
    """Coerce ints and rationals to ``Fraction``; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Fraction(value)
    raise StructuralError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@lru_cache(maxsize=None)
def monomials(dim: int, degree: int) -> tuple[Monomial, ...]:
    """Exponent tuples of total ``degree``, lexicographically descending."""
    if dim == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(dim - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_upto(dim: int, order: int) -> tuple[Monomial, ...]:
    """All monomials of degree <= ``order`` in graded-lex order."""
    return tuple(mono for d in range(order + 1) for mono in monomials(dim, d))


def grlex_key(mono: Monomial) -> tuple:
    return (sum(mono), tuple(-e for e in mono))


def unit(dim: int, i: int) -> Monomial:
    return tuple(int(j == i) for j in range(dim))


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class ScalarJet:
    """Immutable k-jet of a scalar function at the origin of R^m."""

    __slots__ = ("dim", "order", "_c", "_hash")

    def __init__(self, dim: int, order: int, coeffs: Mapping | Iterable = ()):
        if not isinstance(dim, int) or dim < 1:
            raise StructuralError(f"dimension must be a positive integer, got {dim!r}")
        if not isinstance(order, int) or order < 0:
            raise StructuralError(f"order must be a non-negative integer, got {order!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[Monomial, Fraction] = {}
        for mono, value in items:
            mono = tuple(mono)
            if len(mono) != dim or any((not isinstance(e, int)) or e < 0 for e in mono):
                raise StructuralError(f"bad multi-index {mono!r} for dimension {dim}")
            if sum(mono) > order:
                raise StructuralError(f"multi-index {mono!r} exceeds jet order {order}")
            c[mono] = c.get(mono, Fraction(0)) + as_rational(value)
        self.dim = dim
        self.order = order
        self._c = {m: v for m, v in c.items() if v}
        self._hash = None

    @classmethod
    def _new(cls, dim: int, order: int, c: dict) -> "ScalarJet":
        # trusted constructor: c is already reduced and truncated
        obj = object.__new__(cls)
        obj.dim = dim
        obj.order = order
        obj._c = c
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int, order: int) -> "ScalarJet":
        return cls(dim, order)

    @classmethod
    def constant(cls, value, dim: int, order: int) -> "ScalarJet":
        return cls(dim, order, {(0,) * dim: value})

    @classmethod
    def variable(cls, i: int, dim: int, order: int) -> "ScalarJet":
        if not 0 <= i < dim:
            raise StructuralError(f"variable index {i} out of range for dimension {dim}")
        if order < 1:
            return cls.zero(dim, order)
        return cls(dim, order, {unit(dim, i): 1})

    # -- access -------------------------------------------------------------
    def __getitem__(self, mono: Sequence[int]) -> Fraction:
        return self._c.get(tuple(mono), Fraction(0))

    def items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._c.items(), key=lambda kv: grlex_key(kv[0]))

    @property
    def coeffs(self) -> dict[Monomial, Fraction]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def constant_term(self) -> Fraction:
        return self._c.get((0,) * self.dim, Fraction(0))

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._c)

    def degrees(self) -> set[int]:
        return {sum(m) for m in self._c}

    # -- structure --------------------------------------------------------
    def truncate(self, order: int) -> "ScalarJet":
        if order > self.order:
            raise DomainError(f"cannot raise jet order from {self.order} to {order}")
        if order == self.order:
            return self
        return ScalarJet._new(self.dim, order, {m: v for m, v in self._c.items() if sum(m) <= order})

    def extend(self, order: int) -> "ScalarJet":
        """Reinterpret the polynomial as a jet of higher order (exact polynomial)."""
        if order < self.order:
            return self.truncate(order)
        return ScalarJet._new(self.dim, order, dict(self._c))

    def homogeneous(self, degree: int) -> "ScalarJet":
        """Degree-``degree`` summand, as a jet of order ``degree``."""
        return ScalarJet._new(self.dim, degree, {m: v for m, v in self._c.items() if sum(m) == degree})

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "ScalarJet") -> None:
        if self.dim != other.dim:
            raise StructuralError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.order != other.order:
            raise StructuralError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, ScalarJet):
            return NotImplemented
        self._check(other)
        c = dict(self._c)
        for m, v in other._c.items():
            s = c.get(m, 0) + v
            if s:
                c[m] = s
            else:
                c.pop(m, None)
        return ScalarJet._new(self.dim, self.order, c)

    def __neg__(self):
        return ScalarJet._new(self.dim, self.order, {m: -v for m, v in self._c.items()})

    def __sub__(self, other):
        if not isinstance(other, ScalarJet):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "ScalarJet":
        s = as_rational(s)
        if not s:
            return ScalarJet._new(self.dim, self.order, {})
        return ScalarJet._new(self.dim, self.order, {m: v * s for m, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, ScalarJet):
            return jet_multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ScalarJet):
            return NotImplemented
        return self.dim == other.dim and self.order == other.order and self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.order, frozenset(self._c.items())))
        return self._hash

    def __repr__(self):
        return f"ScalarJet(dim={self.dim}, order={self.order}, {self})"

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for mono, c in self.items():
            var = "*".join(
                f"z{i}" if e == 1 else f"z{i}^{e}" for i, e in enumerate(mono) if e
            )
            if not var:
                terms.append(_format_rational(c))
            elif c == 1:
                terms.append(var)
            elif c == -1:
                terms.append("-" + var)
            else:
                terms.append(f"{_format_rational(c)}*{var}")
        return " + ".join(terms).replace("+ -", "- ")

    # -- calculus ---------------------------------------------------------
    def partial(self, i: int) -> "ScalarJet":
        return jet_partial(self, i)

    def derivative(self, mono: Monomial) -> "ScalarJet":
        """Iterated partial derivative d^mono, of order ``order - |mono|``."""
        out = self
        for i, e in enumerate(mono):
            for _ in range(e):
                out = jet_partial(out, i)
        return out

    def compose(self, subs: Sequence["ScalarJet"]) -> "ScalarJet":
        """Jet of ``f(subs_0(z), ..., subs_{m-1}(z))``; substitutions vanish at 0."""
        return Substitution(subs, self.order).apply(self)


def jet_multiply(a: ScalarJet, b: ScalarJet) -> ScalarJet:
    a._check(b)
    k = a.order
    if len(a._c) > len(b._c):
        a, b = b, a
    if not a._c or not b._c:
        return ScalarJet._new(a.dim, k, {})
    if len(a._c) == 1:
        (ma, va), = a._c.items()
        if not any(ma):
            return ScalarJet._new(a.dim, k, {m: v * va for m, v in b._c.items()})
    bl = [(m, v, sum(m)) for m, v in b._c.items()]
    out: dict[Monomial, Fraction] = {}
    for ma, va in a._c.items():
        room = k - sum(ma)
        for mb, vb, db in bl:
            if db > room:
                continue
            key = tuple(x + y for x, y in zip(ma, mb))
            out[key] = out.get(key, 0) + va * vb
    return ScalarJet._new(a.dim, k, {m: v for m, v in out.items() if v})


def jet_partial(f: ScalarJet, direction: int) -> ScalarJet:
    """Formal partial derivative along ``z^direction`` (0-based)."""
    if not 0 <= direction < f.dim:
        raise StructuralError(f"direction {direction} out of range for dimension {f.dim}")
    if f.order == 0:
        raise DomainError("cannot differentiate an order-0 jet: derivative order exhausted")
    out = {}
    for mono, v in f._c.items():
        e = mono[direction]
        if e:
            key = mono[:direction] + (e - 1,) + mono[direction + 1:]
            out[key] = v * e
    return ScalarJet._new(f.dim, f.order - 1, out)


class Substitution:
    """Reusable substitution ``z -> subs(z)`` with cached monomial powers.

    All substitutions must have zero constant term so that truncation at
    ``order`` commutes with composition.
    """

    def __init__(self, subs: Sequence[ScalarJet], order: int):
        subs = list(subs)
        if not subs:
            raise StructuralError("empty substitution")
        dim = subs[0].dim
        for s in subs:
            if s.dim != dim:
                raise StructuralError("substitution components have different dimensions")
            if s.order < order:
                raise DomainError(f"substitution of order {s.order} cannot produce order {order}")
            if s.constant_term:
                raise DomainError("substitution must fix the origin (nonzero constant term)")
        self.order = order
        self.dim = dim
        self.subs = [s.truncate(order) for s in subs]
        self._powers: dict[Monomial, ScalarJet] = {
            (0,) * len(subs): ScalarJet.constant(1, dim, order)
        }

    def power(self, mono: Monomial) -> ScalarJet:
        p = self._powers.get(mono)
        if p is None:
            i = next(j for j in range(len(mono) - 1, -1, -1) if mono[j])
            prev = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
            p = jet_multiply(self.power(prev), self.subs[i])
            self._powers[mono] = p
        return p

    def apply(self, f: ScalarJet) -> ScalarJet:
        if f.dim != len(self.subs):
            raise StructuralError(
                f"jet in {f.dim} variables cannot take {len(self.subs)} substitutions"
            )
        if f.order < self.order:
            raise DomainError(f"jet of order {f.order} cannot be composed to order {self.order}")
        out: dict[Monomial, Fraction] = {}
        for mono, v in f._c.items():
            if sum(mono) > self.order:
                continue
            for m, w in self.power(mono)._c.items():
                out[m] = out.get(m, 0) + v * w
        return ScalarJet._new(self.dim, self.order, {m: v for m, v in out.items() if v})


def jet_compose(f: ScalarJet, g) -> ScalarJet:
    """``f o g`` for a diffeomorphism jet ``g`` (anything with ``components``)."""
    comps = g.components if hasattr(g, "components") else g
    if len(comps) != f.dim:
        raise StructuralError(f"cannot compose a {f.dim}-variable jet with a map of {len(comps)} components")
    return Substitution(comps, f.order).apply(f)


def multinomial_weight(mono: Monomial) -> int:
    """|a|! / (a_0! ... a_{m-1}!)"""
    return factorial(sum(mono)) // prod(factorial(e) for e in mono)


def pack_taylor(
    derivatives: Mapping[Sequence[int], object],
    dim: int | None = None,
    order: int | None = None,
) -> ScalarJet:
    """Build a jet from partial derivative values at the origin.

    The value for multi-index ``a`` is divided by ``a!``.
    """
    items = [(tuple(m), as_rational(v)) for m, v in derivatives.items()]
    dims = {len(m) for m, _ in items}
    if dim is None:
        if len(dims) != 1:
            raise StructuralError("cannot infer dimension from derivative table")
        dim = dims.pop()
    elif dims - {dim}:
        raise StructuralError(f"inconsistent multi-index dimensions {sorted(dims)} (expected {dim})")
    if order is None:
        order = max((sum(m) for m, _ in items), default=0)
    coeffs = {mono: v / prod(factorial(e) for e in mono) for mono, v in items}
    return ScalarJet(dim, order, coeffs)


def unpack_taylor(f: ScalarJet) -> dict[Monomial, Fraction]:
    """Inverse of :func:`pack_taylor`: nonzero derivative values by multi-index."""
    return {mono: c * prod(factorial(e) for e in mono) for mono, c in f.items()}


def to_packing(coeff: Fraction, mono: Monomial, convention: str) -> Fraction:
    """Convert a stored Taylor coefficient to the value exported under ``convention``."""
    if convention == "taylor":
        return coeff
    if convention == "multinomial":
        # |a|!/a! * d^a f = |a|! * c_a
        return coeff * factorial(sum(mono))
    raise StructuralError(f"unknown packing convention {convention!r}")


def from_packing(value: Fraction, mono: Monomial, convention: str) -> Fraction:
    if convention == "taylor":
        return value
    if convention == "multinomial":
        return value / factorial(sum(mono))
    raise StructuralError(f"unknown packing convention {convention!r}")
