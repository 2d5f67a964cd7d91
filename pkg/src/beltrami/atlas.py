"""The catalogue of explicit curl eigenspaces of S^3 and exact spectral tools.

Explicit orthogonal bases are provided for the eigenvalues +-2 (the Hopf and
anti-Hopf frames), +-3, +-4, and +-5.  Basis fields are stored with all
denominators cleared so that every frame coefficient is a polynomial with
integer coefficients; the exact squared L^2 norm of each stored field is
recorded alongside.  The orthonormal field used in floating computations is
the stored field divided by the square root of that norm, which keeps
irrational normalizers (sqrt 3, sqrt 7, ...) out of the exact backend.

Negative eigenvalue entries are generated from the positive ones by the
orientation-reversing reflection x4 -> -x4, which conjugates curl to -curl.

On top of the catalogue sit exact spectral operations for arbitrary
polynomial frame fields: eigenspace projections, full eigendecompositions,
helicity, the inverse curl, and the Rayleigh quotient |F|^2_{L^2} / |H(F)|.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from beltrami.exactpoly import (
    ExactScalar,
    Poly4,
    Rat,
    SphereScalar,
    canonicalize,
    format_exact,
)
from beltrami.frames import (
    FrameField,
    REFLECTION,
    curl,
    divergence,
    hopf_frame,
    isometry_pushforward,
)
from beltrami import solver as _solver

SUPPORTED_EXPLICIT = (2, -2, 3, -3, 4, -4, 5, -5)


class UnsupportedEigenvalueError(ValueError):
    """Raised for eigenvalues with no explicit basis entry."""


class NotExactFieldError(ValueError):
    """Raised when an operation requires an exact (coexact, mean-free) field."""


class AtlasEntry:
    """One curl eigenspace: eigenvalue, basis fields, exact Gram data."""

    def __init__(self, eigenvalue: int, fields: Sequence[FrameField],
                 label: str):
        self.eigenvalue = eigenvalue
        self.fields = list(fields)
        self.label = label
        self.squared_norms = [f.l2_inner(f) for f in self.fields]

    @property
    def dimension(self) -> int:
        return len(self.fields)

    def orthonormal_float_fields(self) -> List[FrameField]:
        """The basis rescaled to unit L^2 norm (float coefficients)."""
        return [f.scale(1.0 / float(n) ** 0.5)
                for f, n in zip(self.fields, self.squared_norms)]


# ---------------------------------------------------------------------------
# Explicit bases


def _x(i: int) -> SphereScalar:
    return SphereScalar.coordinate(i)


def _field(f1=None, f2=None, f3=None) -> FrameField:
    z = SphereScalar.zero()
    return FrameField(f1 or z, f2 or z, f3 or z)


def _poly_field(p1: Poly4, p2: Poly4, p3: Poly4) -> FrameField:
    return FrameField(canonicalize(p1), canonicalize(p2), canonicalize(p3))


def anti_hopf_frame() -> Tuple[FrameField, FrameField, FrameField]:
    """The anti-Hopf fields: an orthonormal basis of the eigenvalue -2 space.

    Cartesian forms (-x4, x3, -x2, x1), (-x3, -x4, x1, x2), (-x2, x1, x4, -x3).
    """
    b1 = FrameField.from_cartesian((-_x(4), _x(3), -_x(2), _x(1)))
    b2 = FrameField.from_cartesian((-_x(3), -_x(4), _x(1), _x(2)))
    b3 = FrameField.from_cartesian((-_x(2), _x(1), _x(4), -_x(3)))
    return b1, b2, b3


def _mu3_fields() -> List[FrameField]:
    """Denominator-cleared orthogonal basis of the eigenvalue 3 space.

    The first four have squared norm pi^2 (they are pi times a unit field),
    the last four have squared norm 3 pi^2.
    """
    x = _x
    return [
        _field(None, x(1), -x(2)),
        _field(None, x(2), x(1)),
        _field(None, x(3), -x(4)),
        _field(None, x(4), x(3)),
        _field(x(2).scale(-2), x(3), x(4)),
        _field(x(1).scale(2), -x(4), x(3)),
        _field(x(3).scale(2), x(2), -x(1)),
        _field(x(4).scale(2), x(1), x(2)),
    ]


def _mu4_fields() -> List[FrameField]:
    """Denominator-cleared orthogonal basis of the eigenvalue 4 space."""
    x1, x2, x3, x4 = (Poly4.variable(i) for i in range(1, 5))
    z = Poly4.zero()
    sq = lambda a, b: a * a - b * b  # noqa: E731 - local shorthand
    specs = [
        (z, sq(x1, x2), -2 * x1 * x2),
        (z, sq(x3, x4), -2 * x3 * x4),
        (z, 2 * x1 * x2, sq(x1, x2)),
        (z, 2 * x3 * x4, sq(x3, x4)),
        (z, x2 * x4 - x1 * x3, x1 * x4 + x2 * x3),
        (z, x1 * x4 + x2 * x3, x1 * x3 - x2 * x4),
        (x1 * x2 + x3 * x4, z, x2 * x3 - x1 * x4),
        (8 * x1 * x3, 2 * (x1 * x2 - x3 * x4),
         3 * sq(x3, x1) + sq(x4, x2)),
        (4 * (x1 * x4 - x2 * x3), sq(x1, x2) + sq(x3, x4),
         2 * (x1 * x2 + x3 * x4)),
        (14 * x2 * x4 + 2 * x1 * x3, 4 * (x1 * x2 - x3 * x4),
         sq(x1, x3) + 5 * sq(x2, x4)),
        (2 * sq(x1, x3), -(x1 * x4 + x2 * x3), 3 * x1 * x3 + x2 * x4),
        (7 * sq(x2, x4) + sq(x1, x3), -4 * (x1 * x4 + x2 * x3),
         -(2 * x1 * x3 + 10 * x2 * x4)),
        (x3 * x4 - x1 * x2, x1 * x3 + x2 * x4, z),
        (2 * (x1 * x4 + x2 * x3), sq(x1, x4) + sq(x2, x3), z),
        (sq(x2, x3) + sq(x4, x1), 2 * (x1 * x4 - x2 * x3), z),
    ]
    return [_poly_field(*s) for s in specs]


def _mu5_fields() -> List[FrameField]:
    """Denominator-cleared orthogonal basis of the eigenvalue 5 space.

    Each member is a polynomial seed field made orthogonal to all earlier
    members by exact Gram-Schmidt; the correction coefficients come out
    rational, so the cleared fields stay exact.  A few members carry an
    overall minus sign to fix the orientation convention of the basis.
    """
    x, y, zz, w = (Poly4.variable(i) for i in range(1, 5))
    z = Poly4.zero()
    seeds = [
        (z, x * zz**2 - x * w**2 - 2 * y * zz * w,
         w**2 * y - zz**2 * y - 2 * x * zz * w),
        (z, 3 * x * y**2 - x**3, 3 * x**2 * y - y**3),
        (z, y**3 - 3 * x**2 * y, 3 * x * y**2 - x**3),
        (z, y * zz**2 + 2 * x * zz * w - w**2 * y,
         x * zz**2 - x * w**2 - 2 * w * y * zz),
        (z, y**2 * w - 2 * x * y * zz - x**2 * w,
         y**2 * zz - x**2 * zz + 2 * x * y * w),
        (z, 3 * zz**2 * w - w**3, zz**3 - 3 * w**2 * zz),
        (z, x**2 * zz - y**2 * zz - 2 * x * y * w,
         y**2 * w - x**2 * w - 2 * x * y * zz),
        (z, zz**3 - 3 * w**2 * zz, w**3 - 3 * zz**2 * w),
        (x**3 - 3 * x * w**2, w**3 - 3 * x**2 * w, z),
        (x**2 * y - 2 * x * zz * w - w**2 * y,
         w**2 * zz - 2 * x * y * w - x**2 * zz, z),
        (x**2 * zz + 2 * x * y * w - w**2 * zz,
         x**2 * y - 2 * x * zz * w - w**2 * y, z),
        (x * y**2 - x * zz**2 - 2 * w * y * zz,
         w * zz**2 - w * y**2 - 2 * x * y * zz, z),
        (y**2 * w - zz**2 * w + 2 * x * y * zz,
         x * y**2 - x * zz**2 - 2 * y * zz * w, z),
        (3 * y**2 * zz - zz**3, y**3 - 3 * y * zz**2, z),
        (3 * y * zz**2 - y**3, 3 * y**2 * zz - zz**3, z),
        (3 * x**2 * w - w**3, x**3 - 3 * x * w**2, z),
        (w**2 * zz + 2 * x * y * w - y**2 * zz, z,
         x * y**2 - x * w**2 + 2 * w * y * zz),
        (3 * x**2 * zz - zz**3, z, 3 * x * zz**2 - x**3),
        (x * y**2 - x * w**2 + 2 * w * y * zz, z,
         y**2 * zz - 2 * x * y * w - w**2 * zz),
        (zz**2 * w + 2 * x * y * zz - x**2 * w, z,
         y * zz**2 - x**2 * y - 2 * x * zz * w),
        (3 * w**2 * y - y**3, z, 3 * y**2 * w - w**3),
        (3 * x * zz**2 - x**3, z, zz**3 - 3 * x**2 * zz),
        (y * zz**2 - x**2 * y - 2 * x * zz * w, z,
         x**2 * w - w * zz**2 - 2 * x * y * zz),
        (3 * y**2 * w - w**3, z, y**3 - 3 * w**2 * y),
    ]
    negated = {14, 16, 17, 20, 21, 23}
    fields: List[FrameField] = []
    for j, seed in enumerate(seeds, start=1):
        f = _poly_field(*seed)
        for prev in fields:
            overlap = f.l2_inner(prev)
            if not overlap.is_zero():
                coeff = (overlap / prev.l2_inner(prev)).as_rational()
                f = f - prev.scale(coeff)
        if j in negated:
            f = f.scale(-1)
        fields.append(f)
    return fields


_ENTRY_CACHE: Dict[int, AtlasEntry] = {}


def explicit_basis(eigenvalue: int) -> AtlasEntry:
    """The explicit atlas entry for an eigenvalue in {+-2, +-3, +-4, +-5}."""
    if eigenvalue not in SUPPORTED_EXPLICIT:
        raise UnsupportedEigenvalueError(
            f"no explicit basis for eigenvalue {eigenvalue}; use "
            "eigenspace_solve for other parts of the spectrum")
    if eigenvalue not in _ENTRY_CACHE:
        if eigenvalue > 0:
            fields = {2: list(hopf_frame()), 3: _mu3_fields,
                      4: _mu4_fields, 5: _mu5_fields}[eigenvalue]
            if callable(fields):
                fields = fields()
            entry = AtlasEntry(eigenvalue, fields, "explicit")
        else:
            positive = explicit_basis(-eigenvalue)
            fields = [isometry_pushforward(fld, REFLECTION)
                      for fld in positive.fields]
            entry = AtlasEntry(eigenvalue, fields, "reflected")
        _ENTRY_CACHE[eigenvalue] = entry
    return _ENTRY_CACHE[eigenvalue]


def atlas_entries() -> List[AtlasEntry]:
    return [explicit_basis(mu) for mu in SUPPORTED_EXPLICIT]


# ---------------------------------------------------------------------------
# Solver-backed spectral operations


def eigenspace_solve(dmax: int, limit: int = _solver.DEFAULT_DMAX_LIMIT):
    """Exact solver over the polynomial trial space; see beltrami.solver."""
    return _solver.eigenspace_solve(dmax, limit)


def project_eigen(F: FrameField, eigenvalue: int,
                  limit: int = _solver.DEFAULT_DMAX_LIMIT) -> FrameField:
    """Exact L^2-orthogonal projection onto a curl eigenspace (or onto the
    gradient part for eigenvalue 0)."""
    dmax = max(_solver.field_dmax(F, limit), abs(eigenvalue) - 2, 0)
    if dmax > limit:
        raise ValueError(f"projection onto {eigenvalue} needs dmax {dmax} > "
                         f"limit {limit}")
    return _solver.project_vector(F, eigenvalue, dmax)


class EigenDecomposition:
    """Exact decomposition of a field into curl eigencomponents.

    components maps each active eigenvalue (and 0 for the gradient part) to a
    FrameField; the components sum back to the input exactly, so the residual
    is zero by construction and is stored only for interface completeness.
    """

    def __init__(self, components: Dict[int, FrameField]):
        self.components = components
        self.residual = FrameField.zero()

    def component(self, eigenvalue: int) -> FrameField:
        return self.components.get(eigenvalue, FrameField.zero())


def eigen_decompose(F: FrameField,
                    limit: int = _solver.DEFAULT_DMAX_LIMIT) -> EigenDecomposition:
    dmax = _solver.field_dmax(F, limit)
    spectrum = [0] + [s * m for m in range(2, dmax + 3) for s in (1, -1)]
    components: Dict[int, FrameField] = {}
    total = FrameField.zero()
    for mu in spectrum:
        piece = _solver.project_vector(F, mu, dmax)
        if not piece.is_zero():
            components[mu] = piece
            total = total + piece
    if not (total - F).is_zero():
        raise _solver.SpectrumError("eigencomponents do not sum to the field")
    return EigenDecomposition(components)


def _exact_components(F: FrameField, limit: int) -> Dict[int, FrameField]:
    """Eigencomponents of an exact field; rejects gradient parts."""
    decomposition = eigen_decompose(F, limit)
    if 0 in decomposition.components or not divergence(F).is_zero():
        raise NotExactFieldError(
            "field has a nonzero divergence or gradient part; helicity and "
            "the inverse curl are defined for exact fields only")
    return decomposition.components


def helicity(F: FrameField, limit: int = _solver.DEFAULT_DMAX_LIMIT) -> ExactScalar:
    """Exact helicity sum_mu |P_mu F|^2 / mu of an exact field."""
    out = ExactScalar.zero()
    for mu, piece in _exact_components(F, limit).items():
        out = out + piece.l2_inner(piece) / Rat(mu)
    return out


def curl_inverse(F: FrameField,
                 limit: int = _solver.DEFAULT_DMAX_LIMIT) -> FrameField:
    """The exact vector potential: curl(curl_inverse(F)) = F."""
    out = FrameField.zero()
    for mu, piece in _exact_components(F, limit).items():
        out = out + piece.scale(Rat(1, mu))
    return out


def rayleigh_quotient(F: FrameField, limit: int = _solver.DEFAULT_DMAX_LIMIT):
    """|F|^2_{L^2} / |H(F)|, exact when the ratio is rational.

    Always at least 2 for exact fields on S^3, with equality exactly on the
    +-2 eigenspaces (with the matching helicity sign).
    """
    h = helicity(F, limit)
    if h.is_zero():
        raise NotExactFieldError("Rayleigh quotient undefined at zero helicity")
    norm_sq = F.l2_inner(F)
    try:
        ratio = norm_sq / h
        value = ratio.as_rational()
        return value if value > 0 else -value
    except (ValueError, ZeroDivisionError):
        return abs(float(norm_sq) / float(h))


# ---------------------------------------------------------------------------
# Export


def atlas_export() -> str:
    """JSON dump of the explicit atlas for external cross-checking."""
    payload = []
    for entry in atlas_entries():
        fields = []
        for field, norm in zip(entry.fields, entry.squared_norms):
            fields.append({
                "coefficients": [
                    {"".join(map(str, e)): str(c)
                     for e, c in coeff.representative().terms.items()}
                    for coeff in field.f
                ],
                "squared_norm": format_exact(norm),
            })
        payload.append({
            "eigenvalue": entry.eigenvalue,
            "dimension": entry.dimension,
            "label": entry.label,
            "fields": fields,
        })
    return json.dumps(payload, indent=2)
