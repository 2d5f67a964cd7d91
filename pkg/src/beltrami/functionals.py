"""Energy and Rayleigh functionals on S^3 and their derivatives at the Hopf field.

The central objects are

    E(X) = integral of |X|^{3/2}          (the L^{3/2} energy)
    H(X) = helicity
    F(X) = E(X)^{4/3} / H(X),  R(X) = 1 / F(X)

together with the derivatives of E and F at the Hopf field B1 up to order 6,
evaluated in closed form: along B1 + t W every derivative of E reduces to
integrals of polynomials in the scalars B1 . W and |W|^2, which are computed
through exact monomial moments (no quadrature error), and the derivatives of
F follow by truncated power series composition of E^{4/3} / H.

Perturbation directions are organized by the HopfPerturbation type, a
coefficient vector over the orthonormal eigenbases of the low curl
eigenvalues plus explicit fields for the higher eigenspaces; its helicity and
norm are exact functions of the coefficients.

The module also provides the sixth-order combination 6 DF + 3 D^2F + D^3F +
D^4F/4 + D^5F/20 + D^6F/120, the cubic remainder and correction fields that
control it, a quadratic-form second variation of R, and a randomized local
maximality scan of R around B1.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from beltrami.atlas import explicit_basis
from beltrami import atlas as _atlas
from beltrami.exactpoly import Poly4, SphereScalar, canonicalize, integrate_poly
from beltrami.frames import FrameField, curl, divergence, grad, hopf_frame
from beltrami.quadrature import (
    DEFAULT_ANGULAR_ORDER,
    DEFAULT_RADIAL_ORDER,
    HopfGrid,
    integrate_scalar,
)
from beltrami import solver as _solver

MU1 = 2  # first positive curl eigenvalue on the round S^3


class QuadratureSpec:
    """Grid orders for the floating functionals."""

    __slots__ = ("radial_order", "angular_order", "_grid")

    def __init__(self, radial_order: int = DEFAULT_RADIAL_ORDER,
                 angular_order: int = DEFAULT_ANGULAR_ORDER):
        if radial_order < 1 or angular_order < 1:
            raise ValueError("quadrature orders must be positive")
        self.radial_order = radial_order
        self.angular_order = angular_order
        self._grid: Optional[HopfGrid] = None

    def grid(self) -> HopfGrid:
        if self._grid is None:
            self._grid = HopfGrid(self.radial_order, self.angular_order)
        return self._grid

    def exactness(self) -> Tuple[int, int]:
        """(radial polynomial degree, per-angle trigonometric degree)."""
        return 2 * self.radial_order - 1, self.angular_order - 1


_DEFAULT_SPEC = QuadratureSpec()


# ---------------------------------------------------------------------------
# Orthonormal bases (floating) used for perturbation coefficients


def _unit_fields(eigenvalue: int) -> List[FrameField]:
    return explicit_basis(eigenvalue).orthonormal_float_fields()


_BASIS_CACHE: Dict[str, List[FrameField]] = {}


def _basis(name: str) -> List[FrameField]:
    if name not in _BASIS_CACHE:
        if name == "anti_hopf":
            # The anti-Hopf frame normalized to unit L^2 norm.
            scale = 1.0 / math.sqrt(2.0 * math.pi ** 2)
            _BASIS_CACHE[name] = [f.to_float().scale(scale)
                                  for f in _atlas.anti_hopf_frame()]
        elif name == "u":
            _BASIS_CACHE[name] = _unit_fields(3)
        elif name == "v":
            _BASIS_CACHE[name] = _unit_fields(4)
        elif name == "w":
            _BASIS_CACHE[name] = _unit_fields(5)
        else:
            raise KeyError(name)
    return _BASIS_CACHE[name]


def _index_to_eigenvalue(index: int) -> int:
    """Curl eigenvalue of the spectral index: +-(|index| + 1) with its sign."""
    return index + 1 if index > 0 else index - 1


# Allowed keys of HopfPerturbation.extra and the matching curl eigenvalues.
EXTRA_INDICES = (-3, -2, 4, 5, 6)


class HopfPerturbation:
    """A perturbation direction at B1, organized by curl eigenspaces.

    beta are coefficients over the unit anti-Hopf fields (eigenvalue -2),
    a over u_1..u_8 (eigenvalue 3; a_1..a_4 span Z_1, a_5..a_8 span Z_2),
    b over v_1..v_15 (eigenvalue 4), and extra maps a spectral index in
    {-3, -2, 4, 5, 6} (curl eigenvalues -4, -3, 5, 6, 7) to an explicit
    eigenfield of that eigenvalue.
    """

    def __init__(self, beta: Sequence[float] = (0.0, 0.0, 0.0),
                 a: Sequence[float] = (0.0,) * 8,
                 b: Sequence[float] = (0.0,) * 15,
                 extra: Optional[Dict[int, FrameField]] = None):
        self.beta = tuple(float(x) for x in beta)
        self.a = tuple(float(x) for x in a)
        self.b = tuple(float(x) for x in b)
        self.extra = dict(extra or {})
        if len(self.beta) != 3 or len(self.a) != 8 or len(self.b) != 15:
            raise ValueError("expected 3 beta, 8 a, and 15 b coefficients")
        for index, field in self.extra.items():
            if index not in EXTRA_INDICES:
                raise ValueError(f"unsupported extra spectral index {index}")
            mu = _index_to_eigenvalue(index)
            residual = curl(field.to_float()) - field.to_float().scale(float(mu))
            if _max_coefficient(residual) > 1e-10:
                raise ValueError(
                    f"extra field for index {index} is not a curl eigenfield "
                    f"of eigenvalue {mu}")

    # ---- assembly ------------------------------------------------------

    def field(self) -> FrameField:
        out = FrameField.zero()
        for c, e in zip(self.beta, _basis("anti_hopf")):
            if c:
                out = out + e.scale(c)
        for c, e in zip(self.a, _basis("u")):
            if c:
                out = out + e.scale(c)
        for c, e in zip(self.b, _basis("v")):
            if c:
                out = out + e.scale(c)
        for field in self.extra.values():
            out = out + field.to_float()
        return out

    # ---- exact quadratic data -----------------------------------------

    def norm_sq(self) -> float:
        out = (sum(c * c for c in self.beta) + sum(c * c for c in self.a)
               + sum(c * c for c in self.b))
        for field in self.extra.values():
            out += float(field.to_float().l2_inner(field.to_float()))
        return out

    def helicity(self) -> float:
        out = (sum(c * c for c in self.beta) / -2.0
               + sum(c * c for c in self.a) / 3.0
               + sum(c * c for c in self.b) / 4.0)
        for index, field in self.extra.items():
            mu = _index_to_eigenvalue(index)
            out += float(field.to_float().l2_inner(field.to_float())) / mu
        return out

    # ---- structured pieces --------------------------------------------

    def z1(self) -> FrameField:
        return _combine(self.a[:4], _basis("u")[:4])

    def z2(self) -> FrameField:
        return _combine(self.a[4:], _basis("u")[4:])

    def w3(self) -> FrameField:
        return _combine(self.b, _basis("v"))

    def p31(self) -> FrameField:
        coeffs = [c if i + 1 not in (10, 12, 15) else 0.0
                  for i, c in enumerate(self.b)]
        return _combine(coeffs, _basis("v"))

    def p32(self) -> FrameField:
        coeffs = [c if i + 1 in (10, 12, 15) else 0.0
                  for i, c in enumerate(self.b)]
        return _combine(coeffs, _basis("v"))

    def w_minus1(self) -> FrameField:
        return _combine(self.beta, _basis("anti_hopf"))


def _combine(coeffs: Sequence[float], fields: Sequence[FrameField]) -> FrameField:
    out = FrameField.zero()
    for c, e in zip(coeffs, fields):
        if c:
            out = out + e.scale(float(c))
    return out


def _max_scalar_coefficient(s: SphereScalar) -> float:
    return max((abs(float(c)) for c in s.representative().terms.values()),
               default=0.0)


def _max_coefficient(field: FrameField) -> float:
    return max(_max_scalar_coefficient(coeff) for coeff in field.f)


def _b1_float() -> FrameField:
    return hopf_frame()[0].to_float()


# ---------------------------------------------------------------------------
# The basic functionals


class ZeroHelicityError(ValueError):
    """The helicity vanishes, so F and R are undefined."""


def l32_energy(F: FrameField, q: QuadratureSpec | None = None) -> float:
    """The L^{3/2} energy: integral of |F|^{3/2} over S^3."""
    q = q or _DEFAULT_SPEC
    m = F.norm_sq()
    return integrate_scalar(lambda pts: np.maximum(m.evaluate(pts), 0.0) ** 0.75,
                            q.grid())


def d_energy(F: FrameField, Y: FrameField, q: QuadratureSpec | None = None) -> float:
    """First derivative of the energy: (3/2) integral |F|^{-1/2} (F . Y).

    Points where F vanishes contribute zero to the integrand.
    """
    q = q or _DEFAULT_SPEC
    m = F.norm_sq()
    p = F.dot(Y)

    def integrand(pts):
        speed_sq = np.maximum(m.evaluate(pts), 0.0)
        values = p.evaluate(pts)
        out = np.zeros_like(values)
        mask = speed_sq > 1e-28
        out[mask] = 1.5 * values[mask] / speed_sq[mask] ** 0.25
        return out

    return integrate_scalar(integrand, q.grid())


def d_helicity(F: FrameField, Y: FrameField):
    """DH(F)(Y) = 2 (curl^{-1} F, Y), exact for exact fields."""
    return _atlas.curl_inverse(F).l2_inner(Y).scale(2)


def d2_helicity(Y: FrameField):
    """D^2 H(X)(Y, Y) = 2 H(Y), independent of the base point X."""
    return _atlas.helicity(Y).scale(2)


def big_F(F: FrameField, q: QuadratureSpec | None = None,
          helicity_value: Optional[float] = None) -> float:
    """F(X) = E(X)^{4/3} / H(X); scale invariant.

    The helicity is computed exactly for exact fields; floating fields must
    supply helicity_value.
    """
    if helicity_value is None:
        helicity_value = float(_atlas.helicity(F))
    if helicity_value == 0.0:
        raise ZeroHelicityError("helicity vanishes; F is undefined")
    return l32_energy(F, q) ** (4.0 / 3.0) / helicity_value


def rayleigh_R(F: FrameField, q: QuadratureSpec | None = None,
               helicity_value: Optional[float] = None) -> float:
    """R(X) = H(X) / E(X)^{4/3} = 1 / F(X)."""
    return 1.0 / big_F(F, q, helicity_value)


def f_perturbed(W: HopfPerturbation, t: float,
                q: QuadratureSpec | None = None) -> float:
    """F(B1 + t W) with the helicity taken from the coefficient structure."""
    field = _b1_float() + W.field().scale(t)
    h = math.pi ** 2 + t * t * W.helicity()
    return big_F(field, q, helicity_value=h)


# ---------------------------------------------------------------------------
# Closed-form derivatives at the Hopf field


def _perturbation_scalars(W) -> Tuple[SphereScalar, SphereScalar]:
    field = W.field() if isinstance(W, HopfPerturbation) else W.to_float()
    b1 = _b1_float()
    return b1.dot(field), field.norm_sq()


def dE_at_hopf(k: int, W) -> float:
    """D^k E(B1)(W, ..., W) for k in 2..6, via exact monomial moments.

    Along B1 + tW the energy is the integral of (1 + u)^{3/4} with
    u = 2 t (B1 . W) + t^2 |W|^2, and the k-th t-derivative at zero is a
    polynomial integral; coefficients follow from the binomial series.
    """
    if not 2 <= k <= 6:
        raise ValueError(f"derivative order must be 2..6, got {k}")
    return math.factorial(k) * _energy_series(*_perturbation_scalars(W))[k]


def _binomial(alpha: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= (alpha - i) / (i + 1)
    return out


def _energy_series(p: SphereScalar, m: SphereScalar,
                   order: int = 6) -> List[float]:
    """Taylor coefficients of t -> E(B1 + tW) through the given order."""
    # Collect the t-powers of sum_j C(3/4, j) (2tp + t^2 m)^j symbolically.
    coeffs = [SphereScalar.zero() for _ in range(order + 1)]
    coeffs[0] = SphereScalar.const(1.0)
    for j in range(1, order + 1):
        c = _binomial(0.75, j)
        # (2p)^(j - i) m^i contributes at t-power j + i.
        for i in range(j + 1):
            power = j + i
            if power > order:
                continue
            term = SphereScalar.const(c * math.comb(j, i) * 2.0 ** (j - i))
            for _ in range(j - i):
                term = term * p
            for _ in range(i):
                term = term * m
            coeffs[power] = coeffs[power] + term
    return [float(integrate_poly(c)) for c in coeffs]


def _series_mul(a: List[float], b: List[float]) -> List[float]:
    n = len(a)
    out = [0.0] * n
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        for j in range(n - i):
            out[i + j] += ai * b[j]
    return out


def _series_power(a: List[float], alpha: float) -> List[float]:
    """(a0 (1 + x))^alpha for a series a with a[0] > 0."""
    n = len(a)
    x = [c / a[0] for c in a]
    x[0] = 0.0
    out = [0.0] * n
    term = [0.0] * n
    term[0] = 1.0
    for j in range(n):
        c = _binomial(alpha, j)
        for i in range(n):
            out[i] += c * term[i]
        term = _series_mul(term, x)
    return [a[0] ** alpha * c for c in out]


def _series_div(a: List[float], b: List[float]) -> List[float]:
    n = len(a)
    out = [0.0] * n
    for i in range(n):
        acc = a[i]
        for j in range(1, i + 1):
            acc -= b[j] * out[i - j]
        out[i] = acc / b[0]
    return out


def _f_series(W: HopfPerturbation, order: int = 6) -> List[float]:
    """Taylor coefficients of t -> F(B1 + tW) through the given order."""
    p, m = _perturbation_scalars(W)
    e = _energy_series(p, m, order)
    h = [0.0] * (order + 1)
    h[0] = math.pi ** 2
    h[1] = float(integrate_poly(p))  # (B1, W) = 2 (curl^{-1} B1, W)
    h[2] = W.helicity()
    return _series_div(_series_power(e, 4.0 / 3.0), h)


def dF_at_hopf(k: int, W: HopfPerturbation) -> float:
    """D^k F(B1)(W, ..., W) for k in 1..6 by series composition of E^{4/3}/H."""
    if not 1 <= k <= 6:
        raise ValueError(f"derivative order must be 1..6, got {k}")
    return math.factorial(k) * _f_series(W)[k]


def taylor6_combination(W: HopfPerturbation) -> float:
    """6 DF + 3 D^2F + D^3F + D^4F/4 + D^5F/20 + D^6F/120 at B1.

    Equals 6! times the sum of the first six Taylor coefficients of
    t -> F(B1 + tW).
    """
    # With D^k F = k! c_k every weight collapses to 6, so the combination is
    # 6 times the sum of the Taylor coefficients c_1 .. c_6.
    series = _f_series(W)
    return 6.0 * math.fsum(series[1:])


def second_variation_R(Y1: FrameField, W) -> float:
    """Second variation of R at a first eigenfield Y1 in direction W.

    Evaluates (2 mu1 H(W) - 2 |W|^2 + int (Y1 . W)^2 / |Y1|^2) divided by
    mu1 E(Y1)^{4/3}.  Y1 must lie in the first eigenspace (constant speed)
    and W must be L^2-orthogonal to it.
    """
    if not curl(Y1) == Y1.scale(MU1):
        raise ValueError("base point is not a first curl eigenfield")
    speed_sq = Y1.norm_sq()
    if not speed_sq.odd_part.is_zero() or speed_sq.even_part.degree() > 0:
        raise ValueError("first eigenfield must have constant speed")
    speed2 = float(speed_sq.representative().terms.get((0, 0, 0, 0), 0))
    if isinstance(W, HopfPerturbation):
        w_field = W.field()
        h = W.helicity()
        norm_sq = W.norm_sq()
    else:
        h = float(_atlas.helicity(W))
        w_field = W.to_float()
        norm_sq = float(W.l2_inner(W))
    for B in hopf_frame():
        overlap = float(integrate_poly(w_field.dot(B.to_float())))
        if abs(overlap) > 1e-10:
            raise ValueError("direction is not orthogonal to the first "
                             "eigenspace")
    pointwise = Y1.to_float().dot(w_field)
    cross = float(integrate_poly(pointwise * pointwise)) / speed2
    numerator = 2 * MU1 * h - 2 * norm_sq + cross
    energy = speed2 ** 0.75 * 2 * math.pi ** 2
    return numerator / (MU1 * energy ** (4.0 / 3.0))


# ---------------------------------------------------------------------------
# Remainder and correction fields


class SpanError(ValueError):
    """An input field lies outside the required eigenspace span."""


def _check_span(field: FrameField, basis: Sequence[FrameField],
                what: str) -> None:
    field = field.to_float()
    residual = field
    for e in basis:
        c = float(integrate_poly(field.dot(e)))
        residual = residual - e.scale(c)
    norm = float(integrate_poly(field.norm_sq()))
    if float(integrate_poly(residual.norm_sq())) > 1e-18 * (norm + 1.0):
        raise SpanError(f"{what} lies outside its required span")


def remainder_field(P23: FrameField, Z2: FrameField) -> FrameField:
    """The cubic remainder field of the sixth-order expansion.

    R = (-6 P23 . Z2 + 15 (P23 . B1)(B1 . Z2) - (45/4)(B1 . Z2)^3
         + (15/2)|Z2|^2 (B1 . Z2)) B1
        + (-6 (B1 . P23) - 3 |Z2|^2 + (15/2)(B1 . Z2)^2) Z2
        - 6 (B1 . Z2) P23,

    with P23 restricted to span{v10, v12, v15} and Z2 to span{u5, u8}.
    """
    v = _basis("v")
    u = _basis("u")
    _check_span(P23, [v[9], v[11], v[14]], "P23")
    _check_span(Z2, [u[4], u[7]], "Z2")
    P23, Z2 = P23.to_float(), Z2.to_float()
    b1 = _b1_float()
    pz = P23.dot(Z2)
    pb = b1.dot(P23)
    zb = b1.dot(Z2)
    z_sq = Z2.norm_sq()
    coeff_b1 = (pz.scale(-6.0) + (pb * zb).scale(15.0)
                + (zb * zb * zb).scale(-45.0 / 4.0)
                + (z_sq * zb).scale(15.0 / 2.0))
    coeff_z2 = pb.scale(-6.0) - z_sq.scale(3.0) + (zb * zb).scale(15.0 / 2.0)
    return b1 * coeff_b1 + Z2 * coeff_z2 + P23 * zb.scale(-6.0)


def degenerate_coefficients(a5: float, a8: float) -> Tuple[float, float, float]:
    """(b10, b12, b15) on the degenerate locus of the fourth-order expansion."""
    b15 = (a5 * a5 + a8 * a8) / (2 * math.sqrt(3.0) * math.pi)
    b12 = math.sqrt(7.0) * (a5 * a5 - a8 * a8) / (6 * math.pi)
    b10 = -math.sqrt(7.0) * a5 * a8 / (3 * math.pi)
    return b10, b12, b15


def _correction_potential(a5: float, a8: float, b10: float, b12: float,
                          b15: float) -> Poly4:
    """The degree-3 potential whose gradient removes the divergence of R."""
    pi = math.pi
    s3 = math.sqrt(3.0)
    s21 = math.sqrt(21.0)
    den = 945 * pi ** 3
    d = [0.0] * 21
    d[1] = -(-177 * s21 * a8 * b10 * pi - 259 * a8 ** 2 * a5 * s3
             - 112 * a5 ** 3 * s3 + 87 * s21 * b12 * a5 * pi
             + 189 * pi * a5 * b15) / den
    d[3] = -(267 * s21 * pi * a8 * b12 - 182 * s3 * a8 * a5 ** 2
             - 189 * pi * b15 * a8 + 259 * a8 ** 3 * s3
             - 3 * s21 * pi * a5 * b10) / den
    d[4] = (177 * s21 * pi * a8 * b10 + 259 * s3 * a8 ** 2 * a5
            - 14 * s3 * a5 ** 3 + 75 * s21 * pi * b12 * a5
            + 945 * pi * a5 * b15) / den
    d[5] = -(3 * s21 * pi * a8 * b10 + 182 * s3 * a8 ** 2 * a5
             - 259 * s3 * a5 ** 3 + 267 * s21 * pi * a5 * b12
             + 189 * pi * a5 * b15) / den
    d[7] = -(267 * s21 * pi * a8 * b12 - 14 * s3 * a8 * a5 ** 2
             - 189 * pi * b15 * a8 + 259 * a8 ** 3 * s3
             + 15 * s21 * pi * a5 * b10) / den
    d[10] = -(87 * s21 * pi * a8 * b12 + 259 * s3 * a8 * a5 ** 2
              - 189 * pi * b15 * a8 + 112 * s3 * a8 ** 3
              + 177 * s21 * pi * a5 * b10) / den
    d[12] = -2.0 / (315 * pi ** 3) * (-57 * s21 * a5 * b10 * pi
                                      - 91 * s3 * a8 * a5 ** 2
                                      + 27 * s21 * pi * a8 * b12
                                      + 189 * pi * b15 * a8)
    d[14] = -(-15 * s21 * pi * a8 * b10 + 14 * s3 * a8 ** 2 * a5
              - 259 * a5 ** 3 * s3 + 267 * s21 * pi * b12 * a5
              + 189 * pi * a5 * b15) / den
    d[17] = -2.0 / (315 * pi ** 3) * (27 * s21 * pi * a5 * b12
                                      + 91 * s3 * a8 ** 2 * a5
                                      - 189 * pi * a5 * b15
                                      + 57 * s21 * pi * a8 * b10)
    d[18] = (75 * s21 * pi * a8 * b12 - 259 * s3 * a8 * a5 ** 2
             - 945 * pi * b15 * a8 + 14 * s3 * a8 ** 3
             - 177 * s21 * pi * a5 * b10) / den
    monomials = [
        None,
        (3, 0, 0, 0), (2, 1, 0, 0), (2, 0, 1, 0), (1, 2, 0, 0), (1, 0, 2, 0),
        (1, 1, 1, 0), (0, 2, 1, 0), (0, 1, 2, 0), (0, 3, 0, 0), (0, 0, 3, 0),
        (2, 0, 0, 1), (1, 1, 0, 1), (1, 0, 1, 1), (1, 0, 0, 2), (0, 2, 0, 1),
        (0, 0, 2, 1), (0, 1, 1, 1), (0, 0, 1, 2), (0, 1, 0, 2), (0, 0, 0, 3),
    ]
    out = Poly4.zero()
    for i in range(1, 21):
        if d[i]:
            out = out + Poly4.monomial(monomials[i], d[i])
    return out


def correction_field(a5: float, a8: float) -> Tuple[FrameField, float]:
    """The divergence-free projection C of the remainder field, with |C|^2.

    The coefficients b10, b12, b15 are set to their degenerate-locus values,
    R is assembled from span{v10, v12, v15} and span{u5, u8}, and a cubic
    gradient is subtracted so that divergence(C) = 0.  The squared norm
    satisfies |C|^2 = 151/(90 pi^4) (a5^2 + a8^2)^3.
    """
    b10, b12, b15 = degenerate_coefficients(a5, a8)
    v = _basis("v")
    u = _basis("u")
    P23 = v[9].scale(b10) + v[11].scale(b12) + v[14].scale(b15)
    Z2 = u[4].scale(a5) + u[7].scale(a8)
    R = remainder_field(P23, Z2)
    potential = canonicalize(_correction_potential(a5, a8, b10, b12, b15))
    C = R - grad(potential)
    if _max_scalar_coefficient(divergence(C)) > 1e-10:
        raise RuntimeError("correction field failed to be divergence free")
    return C, float(integrate_poly(C.norm_sq()))


# ---------------------------------------------------------------------------
# Local maximality scan of R at the Hopf field


R_AT_HOPF = math.pi ** 2 / (2 * math.pi ** 2) ** (4.0 / 3.0)


def local_max_scan(radius: float = 0.05, samples: int = 50,
                   seed: int = 0, q: QuadratureSpec | None = None) -> dict:
    """Randomized check that R(B1 + W) <= R(B1) near B1.

    Samples perturbations W over all explicit eigenspaces with sup norm at
    most radius, and reports any sample where R increases beyond 1e-9 or
    where equality holds although W has a non-E1 part.
    """
    if radius > 0.1:
        raise ValueError("scan radius must be at most 0.1")
    q = q or _DEFAULT_SPEC
    grid = q.grid()
    rng = np.random.default_rng(seed)
    bases: List[Tuple[int, FrameField]] = [(2, f.to_float().scale(
        1.0 / math.sqrt(2.0 * math.pi ** 2))) for f in hopf_frame()]
    bases += [(-2, f) for f in _basis("anti_hopf")]
    bases += [(3, f) for f in _basis("u")]
    bases += [(4, f) for f in _basis("v")]
    bases += [(5, f) for f in _basis("w")]
    bases += [(-3, f) for f in _unit_fields(-3)]
    bases += [(-4, f) for f in _unit_fields(-4)]
    bases += [(-5, f) for f in _unit_fields(-5)]
    values = np.stack([f.evaluate(grid.points) for _, f in bases])
    mus = np.array([mu for mu, _ in bases], dtype=float)
    b1_values = _b1_float().evaluate(grid.points)
    results = []
    violations = []
    for index in range(samples):
        coeffs = rng.standard_normal(len(bases))
        if index % 5 == 4:
            # Every fifth sample stays inside E1, probing exact equality.
            coeffs[3:] = 0.0
        w_values = np.tensordot(coeffs, values, axes=(0, 0))
        sup = float(np.max(np.linalg.norm(w_values, axis=1)))
        scale = radius / sup if sup > 0 else 0.0
        coeffs *= scale
        w_values *= scale
        y_values = b1_values + w_values
        energy = float(np.dot(grid.weights,
                              np.sum(y_values ** 2, axis=1) ** 0.75))
        e1 = np.zeros(len(bases))
        e1[0] = math.sqrt(2.0 * math.pi ** 2)
        total = coeffs + e1
        h = float(np.sum(total ** 2 / mus))
        r_value = h / energy ** (4.0 / 3.0)
        non_e1 = float(np.linalg.norm(coeffs[3:]))
        delta = r_value - R_AT_HOPF
        ok = delta <= 1e-9 and (delta < -1e-9 or non_e1 < 1e-8)
        row = {"sample": index, "delta": delta, "non_e1_norm": non_e1,
               "pass": bool(ok)}
        results.append(row)
        if not ok:
            violations.append({**row, "coefficients": coeffs.tolist()})
    return {"radius": radius, "samples": samples, "seed": seed,
            "violations": violations, "pass": not violations,
            "results": results}


# ---------------------------------------------------------------------------
# s-graded series extraction (used to verify the sixth-order expansion)


def perturbation_scaled(W1: HopfPerturbation, W2: HopfPerturbation,
                        s: float) -> HopfPerturbation:
    """The perturbation s W1 + s^2 W2 (componentwise; extra parts scaled)."""
    extra: Dict[int, FrameField] = {}
    for index, field in W1.extra.items():
        extra[index] = field.to_float().scale(s)
    for index, field in W2.extra.items():
        scaled = field.to_float().scale(s * s)
        extra[index] = extra[index] + scaled if index in extra else scaled
    return HopfPerturbation(
        beta=[s * x + s * s * y for x, y in zip(W1.beta, W2.beta)],
        a=[s * x + s * s * y for x, y in zip(W1.a, W2.a)],
        b=[s * x + s * s * y for x, y in zip(W1.b, W2.b)],
        extra=extra)


def graded_coefficient(W1: HopfPerturbation, W2: HopfPerturbation,
                       degree: int = 6) -> float:
    """Coefficient of s^degree in s -> taylor6_combination(s W1 + s^2 W2).

    The combination is a polynomial of degree at most 12 in s; its even part
    is sampled at positive nodes and the coefficient is recovered from a
    Vandermonde solve in s^2 (odd degrees use the odd part).
    """
    nodes = np.linspace(0.4, 1.0, 7)
    even = degree % 2 == 0
    samples = []
    for s in nodes:
        g_plus = taylor6_combination(perturbation_scaled(W1, W2, float(s)))
        g_minus = taylor6_combination(perturbation_scaled(W1, W2, float(-s)))
        samples.append((g_plus + g_minus) / 2 if even else (g_plus - g_minus) / 2)
    x = nodes ** 2
    vander = np.vander(x, 7, increasing=True)
    if even:
        coeffs = np.linalg.solve(vander, np.array(samples))
        return float(coeffs[degree // 2])
    coeffs = np.linalg.solve(vander * nodes[:, None], np.array(samples))
    return float(coeffs[(degree - 1) // 2])


# The sixth derivative of (1 + u)^{3/4} forces the (B1 . W)^6 coefficient
# in D^6 E(B1) to be -1989 * (15/64) / 6!.  The reference derivation used
# -1755 at that spot, which shifts three downstream constants; both values
# are kept so the identity report can flag the difference explicitly.
#
#   leading coefficient of D^6 F(B1)(Z2, ..., Z2):   -145/18, reported 685/36
#   (a5^2 + a8^2)^3 term of the sixth-order bracket: -406,    reported 959
#   degenerate-locus leading constant:               17/144,  reported 11/32
D6_Z2_COEFFICIENT = -145.0 / 18.0
REPORTED_D6_Z2_COEFFICIENT = 685.0 / 36.0
SIXTH_ORDER_LEADING = -406.0
REPORTED_SIXTH_ORDER_LEADING = 959.0
DEGENERATE_LEADING = 17.0 / 144.0
REPORTED_DEGENERATE_LEADING = 11.0 / 32.0


def sixth_order_bracket(a5: float, a8: float, b10: float, b12: float,
                        b15: float, leading: float = SIXTH_ORDER_LEADING) -> float:
    """The explicit sixth-order polynomial of the expansion at B1.

    For W = s (a5 u5 + a8 u8) + s^2 (b10 v10 + b12 v12 + b15 v15) the s^6
    coefficient of the sixth-order Taylor combination equals the Hopf
    prefactor times this value.  The leading (a5^2 + a8^2)^3 coefficient
    defaults to the series-derived value; pass REPORTED_SIXTH_ORDER_LEADING
    to evaluate the reference version instead.
    """
    pi = math.pi
    s3, s7, s21 = math.sqrt(3.0), math.sqrt(7.0), math.sqrt(21.0)
    sum_sq = a5 * a5 + a8 * a8
    diff_sq = a5 * a5 - a8 * a8
    bracket = (2304 * pi ** 2 * s21 * b15 * b10 * (-a5 * a8)
               - 3888 * pi ** 3 * s3 * b10 ** 2 * b15
               + 1152 * pi ** 2 * s21 * b15 * b12 * diff_sq
               - 3888 * pi ** 3 * s3 * b15 * b12 ** 2
               + 4500 * pi ** 2 * sum_sq * (b12 ** 2 + b10 ** 2)
               + 2268 * pi ** 2 * b15 ** 2 * sum_sq
               - 84 * pi * s3 * b15 * sum_sq ** 2
               - 168 * pi * s7 * b12 * diff_sq * sum_sq
               + 336 * pi * s7 * b10 * a5 * a8 * sum_sq
               + leading * sum_sq ** 3)
    return hopf_prefactor() * bracket / (6048 * pi ** 4)


def hopf_prefactor() -> float:
    """E(B1)^{1/3} / H(B1) = (2 pi^2)^{1/3} / pi^2."""
    return (2 * math.pi ** 2) ** (1.0 / 3.0) / math.pi ** 2


# ---------------------------------------------------------------------------
# Closed forms of the coefficient identities behind the fourth-order bound


def b1_component_norm_sq(b: Sequence[float]) -> float:
    """|B1 . W3|^2 for W3 = sum b_i v_i as a quadratic form in b."""
    b = [0.0] + [float(x) for x in b]
    s3 = math.sqrt(3.0)
    return (b[7] ** 2 / 2 + (b[13] ** 2 + b[14] ** 2 + b[15] ** 2) / 2
            + 2.0 / 3.0 * b[9] ** 2
            + 4.0 / 7.0 * b[8] ** 2 + 2.0 / (7 * s3) * b[8] * b[10]
            + 25.0 / 42.0 * b[10] ** 2
            + 4.0 / 7.0 * b[11] ** 2 + 2.0 / (7 * s3) * b[11] * b[12]
            + 25.0 / 42.0 * b[12] ** 2)


def anti_hopf_w3_cross(beta: Sequence[float], b: Sequence[float]) -> float:
    """int (B1 . W_{-1})(B1 . W3) as a bilinear form in (beta, b)."""
    b = [0.0] + [float(x) for x in b]
    beta = [0.0] + [float(x) for x in beta]
    return (math.sqrt(2.0 / 21.0) * b[8] * beta[1]
            + 4 * beta[1] * b[10] / (3 * math.sqrt(14.0))
            - math.sqrt(2.0) / 3 * beta[2] * b[9]
            + math.sqrt(2.0 / 21.0) * b[11] * beta[3]
            + 4 * beta[3] * b[12] / (3 * math.sqrt(14.0)))


def anti_hopf_z2_cubic(beta: Sequence[float], a5: float, a8: float) -> float:
    """int (B1 . Z2)((B2 . Z2)(B2 . W_{-1}) + (B3 . Z2)(B3 . W_{-1}))."""
    beta = [0.0] + [float(x) for x in beta]
    return (2 * math.sqrt(2.0) / (3 * math.pi)
            * (beta[1] / 3 * a5 * a8 + beta[3] / 6 * (a8 * a8 - a5 * a5)))


def w3_z2_cubic_b1(b: Sequence[float], a5: float, a8: float) -> float:
    """(1/2) int (B1 . W3)((B1 . Z2)^2 - 2 |Z2|^2)."""
    b = [0.0] + [float(x) for x in b]
    s3, s7, s21 = math.sqrt(3.0), math.sqrt(7.0), math.sqrt(21.0)
    return -1.0 / (3 * math.pi) * (
        2 * b[8] * a5 * a8 / s21 - b[10] / s7 * a5 * a8
        + b[11] / s21 * (a8 * a8 - a5 * a5)
        + b[12] / (2 * s7) * (a5 * a5 - a8 * a8)
        + b[15] / (2 * s3) * (a5 * a5 + a8 * a8))


def w3_z2_cubic_b2(b: Sequence[float], a5: float, a8: float) -> float:
    """int (B1 . Z2)(B2 . Z2)(B2 . W3)."""
    b = [0.0] + [float(x) for x in b]
    s3, s6, s7, s21 = (math.sqrt(3.0), math.sqrt(6.0), math.sqrt(7.0),
                       math.sqrt(21.0))
    return 2.0 / (3 * math.pi) * (
        -b[3] * a5 * a8 / (2 * s6) + b[4] * a5 * a8 / (2 * s6)
        + b[6] * (a8 * a8 - a5 * a5) / (4 * s3)
        - b[8] * a5 * a8 / (2 * s21) - b[10] * a5 * a8 / (3 * s7)
        + b[11] * (a5 * a5 - a8 * a8) / (4 * s21)
        + b[12] * (a5 * a5 - a8 * a8) / (6 * s7)
        + b[15] * (a5 * a5 + a8 * a8) / (4 * s3))


def w3_z2_cubic_b3(b: Sequence[float], a5: float, a8: float) -> float:
    """int (B1 . Z2)(B3 . Z2)(B3 . W3)."""
    b = [0.0] + [float(x) for x in b]
    s3, s6, s7, s21 = (math.sqrt(3.0), math.sqrt(6.0), math.sqrt(7.0),
                       math.sqrt(21.0))
    return 2.0 / (3 * math.pi) * (
        (b[3] - b[4]) * a5 * a8 / (2 * s6)
        + b[6] * (a5 * a5 - a8 * a8) / (4 * s3)
        + b[8] * a5 * a8 / (2 * s21) - 5 * b[10] * a5 * a8 / (6 * s7)
        + b[11] * (a8 * a8 - a5 * a5) / (4 * s21)
        + 5 * b[12] * (a5 * a5 - a8 * a8) / (12 * s7))


def e4_b1_component_form(x: float, y: float, z: float, w: float) -> float:
    """Summand of |B1 . W4|^2 over the four coefficient quadruples of E_4.

    The sharp bound |B1 . W4|^2 <= (3/5) |W4|^2 is the maximum of this
    quadratic form on the unit sphere.
    """
    s2, s6 = math.sqrt(2.0), math.sqrt(6.0)
    return (8.0 / 15.0 * (x * x + w * w) + x * (-s2 / 15 * y + s6 / 15 * z)
            + 7.0 / 15.0 * (y * y + z * z) - s2 / 15 * z * w - s6 / 15 * y * w)


E4_COMPONENT_QUADRUPLES = ((9, 22, 19, 12), (10, 23, 21, 15),
                           (11, 17, 18, 14), (13, 20, 24, 16))


def fourth_order_terms(W: HopfPerturbation) -> float:
    """The quadratically controlled collection of the fourth-order bound.

    Evaluates, without the Hopf prefactor, the bracket

        (3/5) |W0_hat|^2 + 2 |Z1|^2 + 11 |W_{-1}|^2 + 3 |W3|^2
        - 3 |B1 . W3|^2 - 6 int (B1 . W_{-1})(B1 . W3)
        + (15/2) int (B1 . W3)(B1 . Z2)^2 - 6 int (W3 . Z2)(B1 . Z2)
        - 3 int (B1 . W3) |Z2|^2 + (13/(36 pi^2)) |Z2|^4
        - 6 int (B1 . Z2)((B2 . W_{-1})(B2 . Z2) + (B3 . W_{-1})(B3 . Z2))

    where W0_hat collects the explicit higher eigenspace parts.
    """
    b1 = _b1_float()
    w3 = W.w3()
    z2 = W.z2()
    w_minus1 = W.w_minus1()
    hat_sq = 0.0
    for field in W.extra.values():
        hat_sq += float(field.to_float().l2_inner(field.to_float()))
    I = lambda s: float(integrate_poly(s))
    zb = b1.dot(z2)
    wb = b1.dot(w3)
    z_sq = z2.norm_sq()
    pi = math.pi
    B2, B3 = (B.to_float() for B in hopf_frame()[1:])
    return (0.6 * hat_sq + 2 * sum(c * c for c in W.a[:4])
            + 11 * sum(c * c for c in W.beta)
            + 3 * sum(c * c for c in W.b) - 3 * I(wb * wb)
            - 6 * I(b1.dot(w_minus1) * wb)
            + 7.5 * I(wb * zb * zb) - 6 * I(w3.dot(z2) * zb)
            - 3 * I(wb * z_sq) + 13.0 / (36 * pi ** 2) * I(z_sq) ** 2
            - 6 * I(zb * (B2.dot(w_minus1) * B2.dot(z2)
                          + B3.dot(w_minus1) * B3.dot(z2))))


# ---------------------------------------------------------------------------
# Identity report


def _report_row(identity: str, anchor: str, expected: float, computed: float,
                tol: float = 1e-10, note: str = "") -> dict:
    abs_err = abs(computed - expected)
    rel_err = abs_err / max(abs(expected), 1e-300)
    ok = abs_err <= tol or rel_err <= tol
    return {"identity": identity, "anchor": anchor, "expected": expected,
            "computed": computed, "abs_error": abs_err, "rel_error": rel_err,
            "pass": bool(ok), "note": note}


def identity_report(seed: int = 0, draws: int = 20) -> List[dict]:
    """Closed-form identities checked against integral evaluations.

    Each randomized identity is reported once with the worst error over the
    draws.  The two sixth-order rows compare the series-derived constants
    against the reference values; the reference rows are expected to fail
    and carry a 'discrepancy' note.
    """
    rng = np.random.default_rng(seed)
    I = lambda s: float(integrate_poly(s))
    b1 = _b1_float()
    rows: List[dict] = []
    rows.append(_report_row(
        "hopf-helicity", "helicity of the Hopf field",
        math.pi ** 2, float(_atlas.helicity(hopf_frame()[0]))))

    worst: Dict[str, Tuple[float, float]] = {}

    def record(identity: str, expected: float, computed: float) -> None:
        prev = worst.get(identity)
        if prev is None or abs(computed - expected) > abs(prev[1] - prev[0]):
            worst[identity] = (expected, computed)

    u = _basis("u")
    minus3 = _unit_fields(-3)
    for _ in range(draws):
        a5, a8 = rng.standard_normal(2)
        beta = rng.standard_normal(3)
        b = rng.standard_normal(15)
        z2 = u[4].scale(a5) + u[7].scale(a8)
        n2 = a5 * a5 + a8 * a8
        zb = b1.dot(z2)
        z_sq = z2.norm_sq()
        # Z2 is a curl eigenfield of eigenvalue 3, so its helicity is the
        # integral of |Z2|^2 / 3; the check exercises the orthonormality of
        # u5 and u8 under the exact integral.
        record("z2-helicity", n2 / 3, I(z_sq) / 3)
        record("z2-b1-square", 2.0 / 3.0 * n2, I(zb * zb))
        record("z2-quartic", 2.0 / (3 * math.pi ** 2) * n2 ** 2, I(z_sq * z_sq))
        record("z2-mixed-quartic", 14.0 / (27 * math.pi ** 2) * n2 ** 2,
               I(z_sq * zb * zb))
        record("z2-b1-quartic", 4.0 / (9 * math.pi ** 2) * n2 ** 2,
               I(zb * zb * zb * zb))
        w_minus2 = _combine(rng.standard_normal(len(minus3)), minus3)
        record("negative-eigenfield-b1-square",
               float(integrate_poly(w_minus2.norm_sq())) / 3,
               I(b1.dot(w_minus2) * b1.dot(w_minus2)))
        W = HopfPerturbation(beta=beta, b=b)
        w3, wm1 = W.w3(), W.w_minus1()
        record("w3-b1-component-norm", b1_component_norm_sq(b),
               I(b1.dot(w3) * b1.dot(w3)))
        record("anti-hopf-w3-cross", anti_hopf_w3_cross(beta, b),
               I(b1.dot(wm1) * b1.dot(w3)))
        B2, B3 = (B.to_float() for B in hopf_frame()[1:])
        record("anti-hopf-z2-cubic", anti_hopf_z2_cubic(beta, a5, a8),
               I(zb * (B2.dot(z2) * B2.dot(wm1) + B3.dot(z2) * B3.dot(wm1))))
        record("w3-z2-cubic-b1", w3_z2_cubic_b1(b, a5, a8),
               0.5 * I(b1.dot(w3) * (zb * zb - z_sq.scale(2.0))))
        record("w3-z2-cubic-b2", w3_z2_cubic_b2(b, a5, a8),
               I(zb * B2.dot(z2) * B2.dot(w3)))
        record("w3-z2-cubic-b3", w3_z2_cubic_b3(b, a5, a8),
               I(zb * B3.dot(z2) * B3.dot(w3)))
        we = wm1 + w3
        lhs = (2 * (sum(x * x for x in beta) + sum(x * x for x in b))
               - 4 * W.helicity() - I(b1.dot(we) * b1.dot(we)))
        rhs = (11.0 / 3.0 * sum(x * x for x in beta) + sum(x * x for x in b)
               - b1_component_norm_sq(b) - 2 * anti_hopf_w3_cross(beta, b))
        record("anti-hopf-w3-quadratic-identity", lhs, rhs)
        c = rng.standard_normal(24)
        w4 = _combine(c, _basis("w"))
        closed = sum(e4_b1_component_form(*(c[i - 1] for i in quad))
                     for quad in E4_COMPONENT_QUADRUPLES)
        record("e4-b1-component-sum", closed, I(b1.dot(w4) * b1.dot(w4)))
    for identity, (expected, computed) in worst.items():
        rows.append(_report_row(identity, _IDENTITY_ANCHORS[identity],
                                expected, computed))

    # Sharp constant of the E_4 component bound: largest eigenvalue of the
    # quadratic form on each coefficient quadruple.
    matrix = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            e_i = [0.0] * 4
            e_j = [0.0] * 4
            e_i[i] = 1.0
            e_j[j] = 1.0
            both = [x + y for x, y in zip(e_i, e_j)]
            matrix[i, j] = 0.5 * (e4_b1_component_form(*both)
                                  - e4_b1_component_form(*e_i)
                                  - e4_b1_component_form(*e_j))
    rows.append(_report_row(
        "e4-component-sharp-constant",
        "largest eigenvalue of the E4 component quadratic form",
        0.6, float(np.linalg.eigvalsh(matrix)[-1])))

    # Norm of the degenerate-locus correction field, checked for a few
    # coefficient pairs (each build verifies divergence-freeness too).
    worst_correction = None
    for _ in range(min(draws, 5)):
        a5, a8 = rng.standard_normal(2)
        _, norm_sq = correction_field(a5, a8)
        expected = 151.0 / (90 * math.pi ** 4) * (a5 * a5 + a8 * a8) ** 3
        if worst_correction is None or abs(norm_sq - expected) > \
                abs(worst_correction[1] - worst_correction[0]):
            worst_correction = (expected, norm_sq)
    rows.append(_report_row(
        "correction-field-norm",
        "squared norm of the correction field equals "
        "(151/(90 pi^4)) |Z2|^6", worst_correction[0], worst_correction[1],
        tol=1e-8))

    # Sixth-order constants: derived versus reference values.
    W1 = HopfPerturbation(a=[0, 0, 0, 0, 1.0, 0, 0, 0])
    d6 = dF_at_hopf(6, W1)
    derived = hopf_prefactor() * D6_Z2_COEFFICIENT / math.pi ** 4
    reported = hopf_prefactor() * REPORTED_D6_Z2_COEFFICIENT / math.pi ** 4
    rows.append(_report_row(
        "d6f-z2-leading", "leading coefficient of D^6 F at B1 along Z2",
        derived, d6, tol=1e-8))
    rows.append(_report_row(
        "d6f-z2-leading-reference",
        "reference value of the D^6 F leading coefficient",
        reported, d6, tol=1e-8,
        note="discrepancy: the reference constant descends from a (B1.W)^6 "
             "coefficient of -1755 in D^6 E where the series forces -1989"))
    b10, b12, b15 = degenerate_coefficients(1.0, 0.0)
    bvec = [0.0] * 15
    bvec[9], bvec[11], bvec[14] = b10, b12, b15
    W2 = HopfPerturbation(b=bvec)
    c6 = graded_coefficient(W1, W2, 6)
    rows.append(_report_row(
        "degenerate-sixth-order-leading",
        "leading constant of the sixth-order combination on the degenerate "
        "locus", hopf_prefactor() * DEGENERATE_LEADING / math.pi ** 4, c6,
        tol=1e-7))
    rows.append(_report_row(
        "degenerate-sixth-order-leading-reference",
        "reference value of the degenerate-locus leading constant",
        hopf_prefactor() * REPORTED_DEGENERATE_LEADING / math.pi ** 4, c6,
        tol=1e-7,
        note="discrepancy: inherits the (B1.W)^6 slip in D^6 E"))
    return rows


_IDENTITY_ANCHORS = {
    "z2-helicity": "helicity of Z2 equals |Z2|^2 / 3",
    "z2-b1-square": "int (B1.Z2)^2 = (2/3) |Z2|^2",
    "z2-quartic": "int |Z2|^4 = (2/(3 pi^2)) |Z2|^4",
    "z2-mixed-quartic": "int |Z2|^2 (B1.Z2)^2 = (14/(27 pi^2)) |Z2|^4",
    "z2-b1-quartic": "int (B1.Z2)^4 = (4/(9 pi^2)) |Z2|^4",
    "negative-eigenfield-b1-square":
        "int (B1.W)^2 = |W|^2 / 3 on the -3 eigenspace",
    "w3-b1-component-norm": "|B1.W3|^2 as a quadratic form in b",
    "anti-hopf-w3-cross": "int (B1.W_{-1})(B1.W3) as a bilinear form",
    "anti-hopf-z2-cubic": "mixed cubic of Z2 with the anti-Hopf part",
    "w3-z2-cubic-b1": "(1/2) int (B1.W3)((B1.Z2)^2 - 2|Z2|^2) closed form",
    "w3-z2-cubic-b2": "int (B1.Z2)(B2.Z2)(B2.W3) closed form",
    "w3-z2-cubic-b3": "int (B1.Z2)(B3.Z2)(B3.W3) closed form",
    "anti-hopf-w3-quadratic-identity":
        "2|W_E|^2 - 4H(W_E) - int (B1.W_E)^2 rewritten in coefficients",
    "e4-b1-component-sum":
        "|B1.W4|^2 as a sum of the quadratic form over coefficient "
        "quadruples",
}