"""First curl eigenvalue under conformal deformation of the round metric.

A conformal metric g = (1 + t q)^2 g0 on S^3 (or on RP^3, for antipodally
invariant q) turns the Beltrami equation curl_g X = mu X, written on the
g0-dual one-form omega, into

    *0 d omega = mu (1 + t q) omega,

so the eigenvalues solve the symmetric generalized pencil A c = mu B(t) c
over a trial space of one-forms, with

    A_ij = <curl e_i, e_j>,    B_ij(t) = integral (1 + t q) <e_i, e_j>.

The trial space spans the exact curl eigenfields up to a frame-coefficient
degree cap together with gradient fields.  Gradients have identically zero
rows in A, so they contribute a block of zero eigenvalues whose size is
known in advance; the physical spectrum is what remains.

Matrix entries are contracted from exact monomial moments of the sphere
(see exactpoly.integrate_monomial) with floating-point accumulation, which
keeps assembly fast while anchoring every moment to its exact rational
value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg

from .atlas import eigenspace_solve
from .exactpoly import (
    Poly4,
    SphereScalar,
    canonicalize,
    integrate_monomial,
    integrate_poly,
)
from .frames import FrameField, grad
from .quadrature import HopfGrid, default_grid

MANIFOLDS = ("s3", "rp3")

#: The lower bound (16 / pi)^(1/3) that every normalized first eigenvalue
#: in a conformal scan must clear.
SCAN_LOWER_BOUND = (16.0 / math.pi) ** (1.0 / 3.0)

#: Threshold below which a generalized eigenvalue is treated as a spurious
#: zero contributed by the gradient block.
ZERO_EIGENVALUE_TOLERANCE = 1e-8


class ParityError(ValueError):
    """A conformal factor that does not descend to RP^3."""


class ConformalFactor:
    """The factor (1 + t q)^2 scaling the round metric.

    q is a polynomial scalar on the sphere and t a real amplitude.  The
    square root 1 + t q must be positive; positivity is checked on a dense
    quadrature grid at construction.
    """

    def __init__(self, q: SphereScalar, t: float):
        if not isinstance(q, SphereScalar):
            raise TypeError("q must be a SphereScalar")
        self.q = q
        self.t = t
        self._sqrt = SphereScalar.const(1) + q.scale(t) if t else \
            SphereScalar.const(1)
        values = self._sqrt.evaluate(default_grid().points)
        low = float(np.min(values))
        if low <= 0.0:
            raise ValueError(
                f"1 + t q reaches {low:.3e} on the sphere; the conformal "
                "factor must stay positive")

    def sqrt_weight(self) -> SphereScalar:
        """The polynomial 1 + t q (the square root of the metric factor)."""
        return self._sqrt

    def sqrt_values(self, pts: np.ndarray) -> np.ndarray:
        return self._sqrt.evaluate(pts)

    def is_trivial(self) -> bool:
        return self.t == 0 or self.q.is_zero()

    def volume(self):
        """The volume of (S^3, (1 + t q)^2 g0): integral of (1 + t q)^3.

        Contracted from exact monomial moments; an ExactScalar when both q
        and t are exact, a float otherwise.
        """
        cube = self._sqrt * self._sqrt * self._sqrt
        return integrate_poly(cube)


def _reduced_monomials(degrees: Sequence[int]) -> List[SphereScalar]:
    """Canonical scalar monomials (exponent of x4 at most one) by degree."""
    out: List[SphereScalar] = []
    for d in degrees:
        for e4 in (0, 1):
            rest = d - e4
            if rest < 0:
                continue
            for e1 in range(rest + 1):
                for e2 in range(rest - e1 + 1):
                    e3 = rest - e1 - e2
                    out.append(canonicalize(
                        Poly4.monomial((e1, e2, e3, e4))))
    return out


_MOMENT_CACHE: Dict[Tuple[int, ...], float] = {}


def _moment(exponent: Tuple[int, ...]) -> float:
    """Float value of the exact moment, memoized up to coordinate symmetry."""
    if any(a % 2 for a in exponent):
        return 0.0
    key = tuple(sorted(exponent))
    value = _MOMENT_CACHE.get(key)
    if value is None:
        value = float(integrate_monomial(key))
        _MOMENT_CACHE[key] = value
    return value


class _BasisData:
    """Assembled trial basis for one (manifold, dmax) pair.

    Columns are the exact curl eigenfields with frame-coefficient degree up
    to dmax followed by gradients of scalar monomials up to degree dmax + 1,
    rescaled to unit L^2 norm for conditioning.  On RP^3 only the fields and
    scalars that descend through the antipodal map are kept.
    """

    def __init__(self, manifold: str, dmax: int):
        self.manifold = manifold
        self.dmax = dmax
        result = eigenspace_solve(dmax)
        fields: List[FrameField] = []
        mus: List[int] = []
        for mu in sorted(result.eigenspaces):
            if manifold == "rp3" and mu % 2:
                continue
            for f in result.eigenspaces[mu].fields():
                fields.append(f)
                mus.append(mu)
        degrees = range(1, dmax + 2) if manifold == "s3" else \
            range(2, dmax + 2, 2)
        gradients = [grad(m) for m in _reduced_monomials(degrees)]
        self.gradient_count = len(gradients)
        fields.extend(gradients)
        mus.extend([0] * len(gradients))
        self.mus = np.array(mus, dtype=float)
        self.eigen_count = len(fields) - self.gradient_count

        # Sparse coefficient matrix over reduced monomials, per frame leg.
        exponents: Dict[Tuple[int, ...], int] = {}
        comps = [[c.representative() for c in f.f] for f in fields]
        for trio in comps:
            for poly in trio:
                for e in poly.terms:
                    exponents.setdefault(e, len(exponents))
        self.exponents = list(exponents)
        n, m = len(fields), len(self.exponents)
        P = np.zeros((3, n, m))
        for i, trio in enumerate(comps):
            for c, poly in enumerate(trio):
                for e, coeff in poly.terms.items():
                    P[c, i, exponents[e]] = float(coeff)
        self._shift_tables = {}
        self._perturbations = {}
        gram = self._contract(P, (0, 0, 0, 0))
        scale = 1.0 / np.sqrt(np.diag(gram))
        self.P = P * scale[None, :, None]
        self.scales = scale
        self.gram = gram * np.outer(scale, scale)
        weighted = self.mus[:, None] * self.gram
        self.a = 0.5 * (weighted + weighted.T)
        # Gradient rows of A are exactly zero: curl annihilates gradients.
        self.a[self.eigen_count:, :] = 0.0
        self.a[:, self.eigen_count:] = 0.0
        self.fields = fields

    def _table(self, shift: Tuple[int, ...]) -> np.ndarray:
        table = self._shift_tables.get(shift)
        if table is None:
            exps = self.exponents
            table = np.empty((len(exps), len(exps)))
            for i, ei in enumerate(exps):
                for j in range(i + 1):
                    value = _moment(tuple(a + b + s for a, b, s in
                                          zip(ei, exps[j], shift)))
                    table[i, j] = table[j, i] = value
            self._shift_tables[shift] = table
        return table

    def _contract(self, P: np.ndarray, shift: Tuple[int, ...]) -> np.ndarray:
        table = self._table(shift)
        out = np.zeros((P.shape[1], P.shape[1]))
        for c in range(3):
            out += P[c] @ table @ P[c].T
        return 0.5 * (out + out.T)

    def perturbation(self, q: SphereScalar) -> np.ndarray:
        """The matrix of integral q <e_i, e_j> over the basis."""
        terms = tuple(sorted((e, float(c)) for e, c in
                             q.representative().terms.items()))
        cached = self._perturbations.get(terms)
        if cached is None:
            cached = np.zeros_like(self.gram)
            for e, coeff in terms:
                cached += coeff * self._contract(self.P, e)
            self._perturbations[terms] = cached
        return cached

    def evaluate_columns(self, pts: np.ndarray) -> np.ndarray:
        """Basis fields at the given points, shape (columns, points, 3)."""
        vals = np.stack([f.evaluate(pts) for f in self.fields])
        return vals * self.scales[:, None, None]


_BASIS_CACHE: Dict[Tuple[str, int], _BasisData] = {}


def _basis_data(manifold: str, dmax: int) -> _BasisData:
    if manifold not in MANIFOLDS:
        raise ValueError(f"manifold must be one of {MANIFOLDS}, "
                         f"got {manifold!r}")
    if dmax < 0:
        raise ValueError("dmax must be nonnegative")
    key = (manifold, dmax)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = _BasisData(manifold, dmax)
    return _BASIS_CACHE[key]


@dataclass
class GalerkinPencil:
    """The symmetric pencil (A, B) for one manifold, factor, and degree cap.

    a holds the curl pairings, b the weighted mass matrix, and
    column_eigenvalues the exact curl eigenvalue of each basis column (zero
    for gradients).  volume is the total volume of the deformed manifold.
    """

    manifold: str
    dmax: int
    a: np.ndarray
    b: np.ndarray
    column_eigenvalues: Tuple[int, ...]
    gradient_count: int
    volume: float

    def eigenvalues(self) -> np.ndarray:
        """All generalized eigenvalues, ascending."""
        return scipy.linalg.eigh(self.a, self.b, eigvals_only=True)

    def mu1(self) -> float:
        """Smallest positive eigenvalue after discarding the gradient zeros.

        The number of near-zero eigenvalues must match the gradient block
        dimension exactly; any other count means the pencil is inconsistent
        and raises instead of silently mislabeling a physical eigenvalue.
        """
        spectrum = self.eigenvalues()
        zeros = int(np.sum(np.abs(spectrum) < ZERO_EIGENVALUE_TOLERANCE))
        if zeros != self.gradient_count:
            raise RuntimeError(
                f"found {zeros} near-zero eigenvalues but the gradient "
                f"block has dimension {self.gradient_count}")
        positive = spectrum[spectrum >= ZERO_EIGENVALUE_TOLERANCE]
        if positive.size == 0:
            raise RuntimeError("the pencil has no positive eigenvalue")
        return float(positive[0])

    def mu1_normalized(self) -> float:
        """The scale-invariant product mu1 * volume^(1/3)."""
        return self.mu1() * self.volume ** (1.0 / 3.0)


def assemble_pencil(manifold: str, cf: ConformalFactor,
                    dmax: int = 3) -> GalerkinPencil:
    """Build the generalized eigenpencil for curl on the deformed manifold.

    On RP^3 the factor must be antipodally invariant (its square root an
    even polynomial); an odd part raises ParityError.  The basis keeps only
    fields that descend through the antipodal map, and the volume is half
    the spherical one.
    """
    data = _basis_data(manifold, dmax)
    if manifold == "rp3" and not cf.q.odd_part.is_zero():
        raise ParityError(
            "the conformal factor has an antipodally odd part and does not "
            "descend to RP^3")
    b = data.gram.copy()
    if cf.t and not cf.q.is_zero():
        b = b + cf.t * data.perturbation(cf.q)
    volume = float(cf.volume())
    if manifold == "rp3":
        volume *= 0.5
    return GalerkinPencil(
        manifold=manifold,
        dmax=dmax,
        a=data.a,
        b=b,
        column_eigenvalues=tuple(int(m) for m in data.mus),
        gradient_count=data.gradient_count,
        volume=volume,
    )


def mu1_normalized(manifold: str, cf: ConformalFactor,
                   dmax: int = 3) -> float:
    """Normalized first positive curl eigenvalue of the deformed manifold."""
    return assemble_pencil(manifold, cf, dmax).mu1_normalized()


DEFAULT_AMPLITUDES = (-0.05, -0.02, -0.01, 0.0, 0.01, 0.02, 0.05)


def optimality_scan(qs: Sequence[Tuple[str, SphereScalar]],
                    manifold: str = "s3",
                    amplitudes: Sequence[float] = DEFAULT_AMPLITUDES,
                    dmax: int = 3) -> List[dict]:
    """Scan normalized first eigenvalues over conformal perturbations.

    qs is a sequence of (label, scalar) pairs.  For each factor and each
    amplitude t the normalized eigenvalue is computed at degree caps dmax
    and dmax + 1; a row passes when the refinement moves it by less than
    1e-4, it clears the (16/pi)^(1/3) lower bound, and it is no smaller
    than the t = 0 value of its own factor minus 1e-6 (so the undeformed
    metric is the grid minimum).
    """
    if 0.0 not in amplitudes:
        raise ValueError("the amplitude grid must contain t = 0")
    if any(abs(t) > 0.05 for t in amplitudes):
        raise ValueError("amplitudes beyond 0.05 leave the perturbative "
                         "regime of the scan")
    rows: List[dict] = []
    for label, q in qs:
        values = {}
        for t in amplitudes:
            cf = ConformalFactor(q, t)
            coarse = mu1_normalized(manifold, cf, dmax)
            fine_pencil = assemble_pencil(manifold, cf, dmax + 1)
            values[t] = (coarse, fine_pencil.mu1_normalized(),
                         fine_pencil.mu1())
        base = values[0.0][1]
        for t in amplitudes:
            coarse, fine, mu1 = values[t]
            delta = abs(fine - coarse)
            passes = (delta < 1e-4
                      and fine >= SCAN_LOWER_BOUND - 1e-9
                      and fine >= base - 1e-6)
            rows.append({
                "manifold": manifold,
                "q": label,
                "t": t,
                "dmax": dmax,
                "mu1": mu1,
                "mu1_normalized": fine,
                "refinement_delta": delta,
                "pass": passes,
            })
    return rows


class PushforwardField:
    """A divergence-free field transported to the deformed metric.

    The transport divides the field by (1 + t q)^3 so that both the
    helicity and the L^(3/2) norm, taken in the deformed metric, agree with
    the round-metric values of the original field.  At t = 0 the transport
    is the identity.
    """

    def __init__(self, base: FrameField, cf: ConformalFactor,
                 dmax: int = 3):
        self.base = base
        self.factor = cf
        self.dmax = dmax

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Frame components of the transported field at unit points."""
        values = self.base.evaluate(pts)
        if self.factor.is_trivial():
            return values
        return values / self.factor.sqrt_values(pts)[:, None] ** 3

    def l32_energy(self, grid: HopfGrid | None = None) -> float:
        """Integral of the deformed-metric speed to the power 3/2.

        The deformed speed is (1 + t q) times the frame speed and the
        deformed volume element carries (1 + t q)^3, evaluated pointwise
        without using the algebraic cancellation against the transport.
        """
        grid = grid or default_grid()
        w = self.factor.sqrt_values(grid.points)
        speed_sq = np.sum(self.evaluate(grid.points) ** 2, axis=1) * w ** 2
        return math.fsum(grid.weights * speed_sq ** 0.75 * w ** 3)

    def helicity(self, grid: HopfGrid | None = None) -> float:
        """Helicity in the deformed metric via a Galerkin curl inversion.

        Solves curl_g W = V weakly over the eigenfield block of the trial
        basis and integrates <W, V>_g against the deformed volume element
        by quadrature.
        """
        grid = grid or default_grid()
        data = _basis_data("s3", self.dmax)
        ne = data.eigen_count
        basis_values = data.evaluate_columns(grid.points)[:ne]
        v = self.evaluate(grid.points)
        w3 = self.factor.sqrt_values(grid.points) ** 3
        # The weak equations pair one-forms against the flux two-form of
        # the field, so the right-hand side carries only the deformed
        # volume element (1 + t q)^3.
        rhs = np.array([math.fsum(grid.weights * w3 *
                                  np.sum(basis_values[j] * v, axis=1))
                        for j in range(ne)])
        x = np.linalg.solve(data.a[:ne, :ne], rhs)
        return float(x @ rhs)


def conformal_pushforward(u: FrameField, cf: ConformalFactor,
                          dmax: int = 3) -> PushforwardField:
    """Transport a divergence-free field to the metric (1 + t q)^2 g0."""
    return PushforwardField(u, cf, dmax)


class MinimizerMetric:
    """The conformal metric kappa |u| g0 built from a nonvanishing field.

    kappa = (Vol / E(u))^(2/3) normalizes the total volume back to the
    round value 2 pi^2, and the transported field u / (kappa |u|)^(3/2) has
    constant speed 1 / kappa in the new metric.
    """

    def __init__(self, u: FrameField, grid: HopfGrid | None = None):
        grid = grid or default_grid()
        self._grid = grid
        self.base = u
        values = u.evaluate(grid.points)
        speed_sq = np.sum(values ** 2, axis=1)
        top = float(np.max(speed_sq))
        if top == 0.0 or float(np.min(speed_sq)) <= 1e-12 * top:
            raise ValueError("the field vanishes somewhere on the sphere; "
                             "its speed cannot serve as a metric weight")
        energy = math.fsum(grid.weights * speed_sq ** 0.75)
        self.kappa = (2.0 * math.pi ** 2 / energy) ** (2.0 / 3.0)

    def weight_values(self, pts: np.ndarray) -> np.ndarray:
        """The conformal weight kappa |u| at unit points."""
        return self.kappa * np.sqrt(
            np.sum(self.base.evaluate(pts) ** 2, axis=1))

    def volume(self, grid: HopfGrid | None = None) -> float:
        """Total volume of the weighted metric: integral of weight^(3/2)."""
        grid = grid or self._grid
        return math.fsum(grid.weights *
                         self.weight_values(grid.points) ** 1.5)

    def transported_values(self, pts: np.ndarray) -> np.ndarray:
        """Frame components of u / weight^(3/2)."""
        return self.base.evaluate(pts) / \
            self.weight_values(pts)[:, None] ** 1.5

    def transported_speed(self, pts: np.ndarray) -> np.ndarray:
        """Speed of the transported field in the weighted metric.

        Constant and equal to 1 / kappa by construction; computed pointwise
        so the construction can be checked numerically.
        """
        w = self.weight_values(pts)
        return np.sqrt(w * np.sum(self.transported_values(pts) ** 2,
                                  axis=1))


def metric_from_minimizer(u: FrameField) -> MinimizerMetric:
    """Conformal metric with weight proportional to the speed of u."""
    return MinimizerMetric(u)
