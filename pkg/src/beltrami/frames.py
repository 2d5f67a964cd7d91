"""Vector fields on S^3 in the orthonormal Hopf frame, with exact calculus.

The frame B1, B2, B3 consists of the restrictions to S^3 of the linear fields

    B1 = (-x2,  x1, -x4,  x3)
    B2 = (-x3,  x4,  x1, -x2)
    B3 = (-x4, -x3,  x2,  x1)

which are Killing fields spanning the tangent space at every point.  A
FrameField stores three SphereScalar coefficients f1, f2, f3 representing
f1 B1 + f2 B2 + f3 B3.  Because the frame is orthonormal, pointwise inner
products reduce to coefficient arithmetic, and curl, divergence, gradient,
and the Laplace-Beltrami operator close exactly on polynomial coefficients:

    curl(F)  = 2 F + (B2 f3 - B3 f2) B1 + (B3 f1 - B1 f3) B2
                   + (B1 f2 - B2 f1) B3
    div(F)   = B1 f1 + B2 f2 + B3 f3
    grad(s)  = (B1 s) B1 + (B2 s) B2 + (B3 s) B3
    Delta(s) = -(B1 B1 s + B2 B2 s + B3 B3 s)   (nonnegative spectrum)

The orientation is fixed so that curl(B1) = +2 B1.
"""

from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np

from beltrami.exactpoly import (
    Poly4,
    Rat,
    SphereScalar,
    canonicalize,
    directional_derivative,
    integrate_poly,
)

# Antisymmetric generators: row j of FRAME_GENERATORS[i] gives component j of
# the linear field x -> L_i x whose restriction is B_{i+1}.
FRAME_GENERATORS: Tuple[Tuple[Tuple[int, ...], ...], ...] = (
    ((0, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0)),
    ((0, 0, -1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, -1, 0, 0)),
    ((0, 0, 0, -1), (0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0)),
)

# The linear forms (L_i x)_a as Poly4, indexed [frame i][component a].
_FRAME_COMPONENTS = tuple(
    tuple(
        sum((Poly4.variable(m + 1).scale(Rat(L[a][m]))
             for m in range(4) if L[a][m]), Poly4.zero())
        for a in range(4)
    )
    for L in FRAME_GENERATORS
)


def frame_derivative(s: SphereScalar, i: int) -> SphereScalar:
    """The derivative B_i(s) for i in 1..3."""
    return directional_derivative(s, FRAME_GENERATORS[i - 1])


class FrameField:
    """A vector field f1 B1 + f2 B2 + f3 B3 on S^3."""

    __slots__ = ("f",)

    def __init__(self, f1: SphereScalar, f2: SphereScalar, f3: SphereScalar):
        self.f = (f1, f2, f3)

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "FrameField":
        z = SphereScalar.zero()
        return FrameField(z, z, z)

    @staticmethod
    def from_polys(p1: Poly4, p2: Poly4, p3: Poly4) -> "FrameField":
        return FrameField(canonicalize(p1), canonicalize(p2), canonicalize(p3))

    @staticmethod
    def from_cartesian(components: Sequence[SphereScalar]) -> "FrameField":
        """Rebuild a tangent field from its four Cartesian components.

        Valid whenever the components describe a field tangent to S^3; then
        f_i is the pointwise inner product with B_i.
        """
        coeffs = []
        for i in range(3):
            fi = SphereScalar.zero()
            for a in range(4):
                fi = fi + components[a] * canonicalize(_FRAME_COMPONENTS[i][a])
            coeffs.append(fi)
        return FrameField(*coeffs)

    # ---- linear structure ---------------------------------------------

    def __add__(self, other: "FrameField") -> "FrameField":
        return FrameField(*(a + b for a, b in zip(self.f, other.f)))

    def __sub__(self, other: "FrameField") -> "FrameField":
        return FrameField(*(a - b for a, b in zip(self.f, other.f)))

    def __neg__(self) -> "FrameField":
        return FrameField(*(-a for a in self.f))

    def scale(self, s) -> "FrameField":
        return FrameField(*(a.scale(s) for a in self.f))

    def __mul__(self, s):
        if isinstance(s, SphereScalar):
            return FrameField(*(a * s for a in self.f))
        return self.scale(s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FrameField) and self.f == other.f

    def __hash__(self):
        raise TypeError("FrameField is unhashable")

    def __repr__(self) -> str:
        return f"FrameField{self.f!r}"

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.f)

    def coefficient_degree(self) -> int:
        return max(a.degree() for a in self.f)

    def to_float(self) -> "FrameField":
        return FrameField(*(a.to_float() for a in self.f))

    # ---- metric structure ----------------------------------------------

    def dot(self, other: "FrameField") -> SphereScalar:
        """Pointwise inner product (frame orthonormality)."""
        out = SphereScalar.zero()
        for a, b in zip(self.f, other.f):
            out = out + a * b
        return out

    def norm_sq(self) -> SphereScalar:
        return self.dot(self)

    def l2_inner(self, other: "FrameField"):
        """L^2 inner product; ExactScalar for exact fields, float otherwise."""
        return integrate_poly(self.dot(other))

    # ---- Cartesian probe ------------------------------------------------

    def cartesian_components(self) -> Tuple[SphereScalar, ...]:
        """The four Cartesian components as functions on S^3."""
        comps = []
        for a in range(4):
            ca = SphereScalar.zero()
            for i in range(3):
                ca = ca + self.f[i] * canonicalize(_FRAME_COMPONENTS[i][a])
            comps.append(ca)
        return tuple(comps)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate the Cartesian components at (N, 4) points -> (N, 4)."""
        comps = self.cartesian_components()
        return np.stack([c.evaluate(pts) for c in comps], axis=1)


def hopf_frame() -> Tuple[FrameField, FrameField, FrameField]:
    """The orthonormal frame (B1, B2, B3) with constant coefficients."""
    one = SphereScalar.const(1)
    zero = SphereScalar.zero()
    return (FrameField(one, zero, zero),
            FrameField(zero, one, zero),
            FrameField(zero, zero, one))


def curl(F: FrameField) -> FrameField:
    """Curl in the round metric; exact on polynomial coefficients."""
    f1, f2, f3 = F.f
    c1 = frame_derivative(f3, 2) - frame_derivative(f2, 3)
    c2 = frame_derivative(f1, 3) - frame_derivative(f3, 1)
    c3 = frame_derivative(f2, 1) - frame_derivative(f1, 2)
    return FrameField(f1.scale(2) + c1, f2.scale(2) + c2, f3.scale(2) + c3)


def divergence(F: FrameField) -> SphereScalar:
    """Divergence; the frame fields are divergence free (Killing)."""
    out = SphereScalar.zero()
    for i in range(3):
        out = out + frame_derivative(F.f[i], i + 1)
    return out


def grad(s: SphereScalar) -> FrameField:
    """Intrinsic gradient expressed in the orthonormal frame."""
    return FrameField(frame_derivative(s, 1),
                      frame_derivative(s, 2),
                      frame_derivative(s, 3))


def laplace_beltrami(s: SphereScalar) -> SphereScalar:
    """Laplace-Beltrami operator with nonnegative spectrum."""
    out = SphereScalar.zero()
    for i in range(1, 4):
        out = out + frame_derivative(frame_derivative(s, i), i)
    return -out


def laplace_beltrami_homogeneous(s: SphereScalar) -> SphereScalar:
    """Independent evaluation through homogeneous representatives.

    Each homogeneous piece P of degree d of the canonical representative
    restricts to the same function, and on restrictions

        Delta_{S^3}(P|_{S^3}) = d (d + 2) P|_{S^3} - (Delta_{R^4} P)|_{S^3}.

    Used as a cross-check oracle for laplace_beltrami.
    """
    rep = s.representative()
    by_degree = {}
    for e, c in rep.terms.items():
        by_degree.setdefault(sum(e), {})[e] = c
    out = SphereScalar.zero()
    for d, terms in by_degree.items():
        p = Poly4(terms)
        flat = Poly4.zero()
        for i in range(1, 5):
            flat = flat + p.partial(i).partial(i)
        out = out + canonicalize(p).scale(d * (d + 2)) - canonicalize(flat)
    return out


def isometry_pushforward(F: FrameField, O: Sequence[Sequence[object]]) -> FrameField:
    """Pushforward of F by the isometry x -> O x of S^3 (O exactly orthogonal).

    (O_* F)(x) = O F(O^T x) computed on Cartesian components, then re-expressed
    in the frame.  Preserves pointwise and L^2 norms; an orientation-reversing
    O maps curl eigenfields of eigenvalue mu to eigenvalue -mu.
    """
    O = [[Rat(O[i][j]) for j in range(4)] for i in range(4)]
    for i in range(4):
        for j in range(4):
            s = sum(O[k][i] * O[k][j] for k in range(4))
            if s != (1 if i == j else 0):
                raise ValueError("matrix is not exactly orthogonal")
    transpose = [[O[j][i] for j in range(4)] for i in range(4)]
    comps = F.cartesian_components()
    rotated = []
    for a in range(4):
        ca = Poly4.zero()
        for b in range(4):
            if O[a][b] != 0:
                ca = ca + comps[b].representative().substitute_linear(
                    transpose).scale(O[a][b])
        rotated.append(canonicalize(ca))
    return FrameField.from_cartesian(rotated)


# The reflection (x1, x2, x3, x4) -> (x1, x2, x3, -x4): orientation reversing,
# exchanges the two curl eigenvalue signs.
REFLECTION = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, -1))


def antipodal_parity(F: FrameField) -> str:
    """Behavior under the pushforward by the antipodal map.

    Returns 'descends_to_RP3' for invariant fields (all Cartesian components
    odd), 'anti_invariant' when the pushforward negates the field (components
    even), and 'mixed' otherwise.
    """
    comps = F.cartesian_components()
    all_odd = all(c.even_part.is_zero() for c in comps)
    all_even = all(c.odd_part.is_zero() for c in comps)
    if all_odd and not F.is_zero():
        return "descends_to_RP3"
    if all_even and not F.is_zero():
        return "anti_invariant"
    return "mixed"
