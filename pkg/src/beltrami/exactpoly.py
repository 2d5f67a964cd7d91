"""Exact polynomial arithmetic on R^4 and exact integration over the unit 3-sphere.

Three layers of exact values are provided:

  Poly4        sparse polynomial in x1..x4: maps exponent 4-tuples to
               arbitrary-precision rational coefficients.
  SphereScalar polynomial function on S^3 in canonical normal form modulo
               the sphere relation, obtained by exhaustively rewriting
               x4^2 -> 1 - x1^2 - x2^2 - x3^2.  Two SphereScalars are equal
               as functions on S^3 iff their normal forms coincide.
  ExactScalar  finite Laurent combination of integer powers of pi with
               rational coefficients; the value domain of exact integrals.

pi is a formal transcendental symbol: no floating approximation enters the
exact backend.  Rationals come from gmpy2 when available (much faster) and
fall back to the stdlib Fraction otherwise; both are arbitrary precision.

Coefficients may alternatively be Python floats.  All ring operations work
unchanged, which gives a floating mirror of the polynomial calculus used for
fields whose natural coefficients involve irrational normalizers.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

try:
    from gmpy2 import mpq as _mpq

    RATIONAL_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _mpq

    RATIONAL_BACKEND = "fractions"

# Exponent tuple (a1, a2, a3, a4): degree of each coordinate in a monomial.
Exponent = Tuple[int, int, int, int]

_ZERO_EXP: Exponent = (0, 0, 0, 0)


def Rat(p, q=1):
    """Return the exact rational p/q in the selected backend.

    Accepts ints, backend rationals, and strings like '151/90'.
    """
    return _mpq(p) if q == 1 else _mpq(p, q)


def is_exact(value) -> bool:
    """True if value is an exact rational (not a float)."""
    return not isinstance(value, float)


class Poly4:
    """Sparse polynomial in x1, x2, x3, x4.

    terms maps exponent 4-tuples to nonzero coefficients.  The zero
    polynomial is the empty map.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Exponent, object] | None = None):
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly4":
        return Poly4()

    @staticmethod
    def const(c) -> "Poly4":
        c = c if isinstance(c, float) else Rat(c)
        return Poly4({_ZERO_EXP: c})

    @staticmethod
    def variable(i: int) -> "Poly4":
        """The coordinate polynomial x_i for i in 1..4."""
        if not 1 <= i <= 4:
            raise ValueError(f"coordinate index must be 1..4, got {i}")
        e = [0, 0, 0, 0]
        e[i - 1] = 1
        return Poly4({tuple(e): Rat(1)})

    @staticmethod
    def monomial(e: Exponent, c=1) -> "Poly4":
        c = c if isinstance(c, float) else Rat(c)
        return Poly4({tuple(e): c})

    # ---- ring operations ----------------------------------------------

    def _has_float(self) -> bool:
        return any(isinstance(c, float) for c in self.terms.values())

    def __add__(self, other: "Poly4") -> "Poly4":
        a, b = self, other
        # Mixed exact/float operands are settled in float arithmetic so that
        # no third numeric type can appear in the coefficients.
        if a._has_float() != b._has_float():
            a, b = a.to_float(), b.to_float()
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly4(out)

    def __sub__(self, other: "Poly4") -> "Poly4":
        return self + (-other)

    def __neg__(self) -> "Poly4":
        return Poly4({e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly4):
            a, b = self, other
            if a._has_float() != b._has_float():
                a, b = a.to_float(), b.to_float()
            out: Dict[Exponent, object] = {}
            for ea, ca in a.terms.items():
                for eb, cb in b.terms.items():
                    e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
                    s = out.get(e, 0) + ca * cb
                    if s == 0:
                        out.pop(e, None)
                    else:
                        out[e] = s
            return Poly4(out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "Poly4":
        """Multiply by a scalar; a float scalar converts all coefficients."""
        if s == 0:
            return Poly4()
        if isinstance(s, float) or self._has_float():
            sf = float(s)
            return Poly4({e: float(c) * sf for e, c in self.terms.items()})
        return Poly4({e: c * s for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "Poly4":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly4.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly4) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("Poly4 is unhashable")

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly4(0)"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            mono = "*".join(f"x{i+1}^{k}" for i, k in enumerate(e) if k)
            bits.append(f"{self.terms[e]}{'*' + mono if mono else ''}")
        return "Poly4(" + " + ".join(bits) + ")"

    # ---- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1 by convention."""
        return max((sum(e) for e in self.terms), default=-1)

    # ---- calculus and substitution ------------------------------------

    def partial(self, i: int) -> "Poly4":
        """Partial derivative with respect to x_i (i in 1..4)."""
        out: Dict[Exponent, object] = {}
        j = i - 1
        for e, c in self.terms.items():
            k = e[j]
            if k == 0:
                continue
            e2 = list(e)
            e2[j] = k - 1
            out[tuple(e2)] = c * k
        return Poly4(out)

    def substitute_linear(self, m: Sequence[Sequence[object]]) -> "Poly4":
        """Return p(M x): substitute x_i -> sum_j M[i][j] x_j (0-based M)."""
        images = [
            Poly4({(0, 0, 0, 0)[:j] + (1,) + (0, 0, 0)[j:]: Rat(m[i][j])
                   for j in range(4) if m[i][j] != 0})
            for i in range(4)
        ]
        out = Poly4()
        for e, c in self.terms.items():
            term = Poly4.const(1)
            for i in range(4):
                if e[i]:
                    term = term * (images[i] ** e[i])
            out = out + term.scale(c)
        return out

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (N, 4) float array of points; returns shape (N,)."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[0])
        for e, c in self.terms.items():
            term = np.full(pts.shape[0], float(c))
            for i in range(4):
                if e[i]:
                    term *= pts[:, i] ** e[i]
            out += term
        return out

    def to_float(self) -> "Poly4":
        return Poly4({e: float(c) for e, c in self.terms.items()})


# Cache of expansions of (1 - x1^2 - x2^2 - x3^2)^m used by the reduction.
_RADIAL_POWERS: Dict[int, Poly4] = {}


def _radial_complement_power(m: int) -> Poly4:
    """(1 - x1^2 - x2^2 - x3^2)^m, cached (exact coefficients)."""
    if m not in _RADIAL_POWERS:
        base = Poly4.const(1) - (
            Poly4.variable(1) ** 2 + Poly4.variable(2) ** 2 + Poly4.variable(3) ** 2
        )
        _RADIAL_POWERS[m] = base ** m
    return _RADIAL_POWERS[m]


def _reduce(p: Poly4) -> Poly4:
    """Rewrite x4^2 -> 1 - x1^2 - x2^2 - x3^2 to exhaustion.

    The result has x4-exponent 0 or 1 in every monomial, which is the unique
    normal form for the single sphere relation.
    """
    out: Dict[Exponent, object] = {}
    pending = Poly4()
    for e, c in p.terms.items():
        if e[3] < 2:
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        else:
            m, r = divmod(e[3], 2)
            head = Poly4.monomial((e[0], e[1], e[2], r), c)
            pending = pending + head * _radial_complement_power(m)
    return Poly4(out) + pending


class SphereScalar:
    """A polynomial function on S^3 in canonical normal form.

    Stored as even_part + odd_part, graded by total degree parity of the
    representative (the sphere rewrite preserves that parity), each part
    reduced so every monomial has x4-exponent at most 1.
    """

    __slots__ = ("even_part", "odd_part")

    def __init__(self, even_part: Poly4, odd_part: Poly4):
        self.even_part = even_part
        self.odd_part = odd_part

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "SphereScalar":
        return SphereScalar(Poly4(), Poly4())

    @staticmethod
    def const(c) -> "SphereScalar":
        return SphereScalar(Poly4.const(c), Poly4())

    @staticmethod
    def coordinate(i: int) -> "SphereScalar":
        return canonicalize(Poly4.variable(i))

    # ---- ring operations ----------------------------------------------

    def __add__(self, other: "SphereScalar") -> "SphereScalar":
        return SphereScalar(self.even_part + other.even_part,
                            self.odd_part + other.odd_part)

    def __sub__(self, other: "SphereScalar") -> "SphereScalar":
        return SphereScalar(self.even_part - other.even_part,
                            self.odd_part - other.odd_part)

    def __neg__(self) -> "SphereScalar":
        return SphereScalar(-self.even_part, -self.odd_part)

    def __mul__(self, other):
        if isinstance(other, SphereScalar):
            return canonicalize(self.representative() * other.representative())
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "SphereScalar":
        return SphereScalar(self.even_part.scale(s), self.odd_part.scale(s))

    def __eq__(self, other) -> bool:
        return (isinstance(other, SphereScalar)
                and self.even_part == other.even_part
                and self.odd_part == other.odd_part)

    def __hash__(self):
        raise TypeError("SphereScalar is unhashable")

    def __repr__(self) -> str:
        return f"SphereScalar({self.representative()!r})"

    # ---- queries -------------------------------------------------------

    def representative(self) -> Poly4:
        """The canonical polynomial representative (even + odd part)."""
        return self.even_part + self.odd_part

    def is_zero(self) -> bool:
        return self.even_part.is_zero() and self.odd_part.is_zero()

    def degree(self) -> int:
        return self.representative().degree()

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        return self.representative().evaluate(pts)

    def to_float(self) -> "SphereScalar":
        return SphereScalar(self.even_part.to_float(), self.odd_part.to_float())

    def integral(self):
        """Integral over S^3: ExactScalar for exact coefficients, else float."""
        return integrate_poly(self)


def canonicalize(p: Poly4) -> SphereScalar:
    """Split p by total-degree parity and reduce each part to normal form.

    The returned SphereScalar equals p as a function on S^3.
    """
    even = Poly4({e: c for e, c in p.terms.items() if sum(e) % 2 == 0})
    odd = Poly4({e: c for e, c in p.terms.items() if sum(e) % 2 == 1})
    return SphereScalar(_reduce(even), _reduce(odd))


class ExactScalar:
    """A finite Laurent combination sum_k c_k * pi^k with rational c_k."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[int, object] | None = None):
        self.terms = {k: c for k, c in (terms or {}).items() if c != 0}

    @staticmethod
    def zero() -> "ExactScalar":
        return ExactScalar()

    @staticmethod
    def from_rational(c, pi_power: int = 0) -> "ExactScalar":
        return ExactScalar({pi_power: Rat(c)})

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return ExactScalar(out)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar({k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            out: Dict[int, object] = {}
            for ka, ca in self.terms.items():
                for kb, cb in other.terms.items():
                    k = ka + kb
                    s = out.get(k, 0) + ca * cb
                    if s == 0:
                        out.pop(k, None)
                    else:
                        out[k] = s
            return ExactScalar(out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "ExactScalar":
        if s == 0:
            return ExactScalar()
        return ExactScalar({k: c * Rat(s) for k, c in self.terms.items()})

    def __truediv__(self, other) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            if len(other.terms) != 1:
                raise ZeroDivisionError(
                    "exact division only by a single pi-power term")
            (k, c), = other.terms.items()
            return ExactScalar({j - k: cj / c for j, cj in self.terms.items()})
        return ExactScalar({k: c / Rat(other) for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactScalar) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("ExactScalar is unhashable")

    def is_zero(self) -> bool:
        return not self.terms

    def __float__(self) -> float:
        return math.fsum(float(c) * math.pi ** k for k, c in self.terms.items())

    def as_rational(self):
        """The rational value when no pi power is present; raises otherwise."""
        if not self.terms:
            return Rat(0)
        if set(self.terms) == {0}:
            return self.terms[0]
        raise ValueError(f"{self} is not rational")

    def __repr__(self) -> str:
        return f"ExactScalar({format_exact(self)!r})"


def format_exact(x: ExactScalar) -> str:
    """Serialize as 'p/q * pi^k' terms joined by ' + ' ('0' when empty)."""
    if not x.terms:
        return "0"
    bits = []
    for k in sorted(x.terms, reverse=True):
        c = x.terms[k]
        num, den = c.numerator, c.denominator
        frac = f"{num}" if den == 1 else f"{num}/{den}"
        bits.append(frac if k == 0 else f"{frac} * pi^{k}")
    return " + ".join(bits)


def parse_exact(s: str) -> ExactScalar:
    """Inverse of format_exact."""
    s = s.strip()
    if s == "0":
        return ExactScalar()
    out = ExactScalar()
    for term in s.split(" + "):
        if "* pi^" in term:
            frac, power = term.split(" * pi^")
            k = int(power)
        else:
            frac, k = term, 0
        out = out + ExactScalar({k: Rat(frac.strip())})
    return out


def integrate_monomial(e: Iterable[int]) -> ExactScalar:
    """Integral of x1^a1 x2^a2 x3^a3 x4^a4 over the unit 3-sphere.

    Zero when any exponent is odd; otherwise, with a_i = 2 b_i and
    s = b1 + b2 + b3 + b4, the value is

        2 pi^2 * prod_i [(2 b_i)! / (4^{b_i} b_i!)] / (s + 1)!

    an exact rational multiple of pi^2.
    """
    e = tuple(e)
    if len(e) != 4 or any(a < 0 or not isinstance(a, int) for a in e):
        raise ValueError(f"exponents must be four nonnegative integers, got {e}")
    if any(a % 2 for a in e):
        return ExactScalar.zero()
    b = [a // 2 for a in e]
    s = sum(b)
    num = Rat(2)
    for bi in b:
        num = num * Rat(math.factorial(2 * bi), 4 ** bi * math.factorial(bi))
    return ExactScalar({2: num / math.factorial(s + 1)})


def _monomial_moment_float(e: Exponent) -> float:
    return float(integrate_monomial(e))


def integrate_poly(p):
    """Integral over S^3 of a Poly4 or SphereScalar.

    Linear; agrees with integrate_monomial on monomials.  A SphereScalar is
    integrated through its normal form (same value, the forms agree on S^3).
    Returns an ExactScalar for exact coefficients and a float when any
    coefficient is a float.
    """
    if isinstance(p, SphereScalar):
        p = p.representative()
    if any(isinstance(c, float) for c in p.terms.values()):
        return math.fsum(float(c) * _monomial_moment_float(e)
                         for e, c in p.terms.items())
    out = ExactScalar()
    for e, c in p.terms.items():
        out = out + integrate_monomial(e).scale(c)
    return out


def directional_derivative(p: SphereScalar, L: Sequence[Sequence[object]]) -> SphereScalar:
    """Derivative of p along the flow of the linear field x -> L x.

    L must be antisymmetric, so the field is tangent to S^3 and the
    derivation descends to the quotient by the sphere relation.
    """
    for i in range(4):
        for j in range(4):
            if Rat(L[i][j]) + Rat(L[j][i]) != 0:
                raise ValueError("matrix is not antisymmetric; "
                                 "the linear field is not tangent to S^3")
    rep = p.representative()
    out = Poly4()
    for j in range(4):
        row = Poly4()
        for m in range(4):
            if L[j][m] != 0:
                row = row + Poly4.variable(m + 1).scale(Rat(L[j][m]))
        if not row.is_zero():
            out = out + row * rep.partial(j + 1)
    return canonicalize(out)
