"""Exact Galerkin curl eigensolver on polynomial frame fields.

The trial space V_D consists of the tangential projections of all Cartesian
monomial vector fields of degree at most D on R^4, restricted to S^3.  For a
monomial m and coordinate axis a the tangential projection has frame
coefficients f_i = m * (L_i x)_a, so V_D is spanned by explicit frame fields
with polynomial coefficients and is invariant under curl.  Calling
eigenspace_solve(dmax) uses D = dmax + 1, which makes the curl spectrum on
the trial space exactly the integers {0, +-2, ..., +-(dmax + 2)} (0 carrying
the gradient part).

Everything is exact rational linear algebra:

* fields are sparse coefficient vectors over reduced monomials,
* curl acts as a precomputed sparse operator on those coordinates,
* the spectral projection onto eigenvalue mu is the Lagrange interpolation
  polynomial prod_{nu != mu} (curl - nu) / (mu - nu) applied to vectors,
* the solver verifies that the projections resolve the identity exactly on a
  basis of the trial space and raises SpectrumError otherwise.

The trial space splits into two curl-invariant blocks by the total-degree
parity of the frame coefficients; each block only meets the eigenvalues of
matching parity, which roughly halves the work.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from beltrami.exactpoly import Poly4, Rat, SphereScalar, canonicalize
from beltrami.frames import FRAME_GENERATORS, FrameField, curl

DEFAULT_DMAX_LIMIT = 5


class SpectrumError(RuntimeError):
    """The candidate integer spectrum does not exhaust the trial space."""


# ---------------------------------------------------------------------------
# Monomial coordinates


def _reduced_monomials(max_degree: int, parity: int) -> List[Tuple[int, ...]]:
    """Reduced monomials (x4-exponent <= 1) of given total-degree parity."""
    out = []
    for d in range(parity, max_degree + 1, 2):
        for e1 in range(d + 1):
            for e2 in range(d + 1 - e1):
                for e3 in range(d + 1 - e1 - e2):
                    e4 = d - e1 - e2 - e3
                    if e4 <= 1:
                        out.append((e1, e2, e3, e4))
    return out


class _Coordinates:
    """Index of the sparse coordinates (frame slot, reduced monomial)."""

    def __init__(self, max_degree: int, parity: int):
        self.monomials = _reduced_monomials(max_degree, parity)
        self.index = {e: k for k, e in enumerate(self.monomials)}
        self.size = 3 * len(self.monomials)

    def to_vector(self, field: FrameField) -> Dict[int, object]:
        vec: Dict[int, object] = {}
        n = len(self.monomials)
        for i in range(3):
            for e, c in field.f[i].representative().terms.items():
                k = self.index.get(e)
                if k is None:
                    raise ValueError("field leaves the coordinate space")
                vec[i * n + k] = c
        return vec

    def to_field(self, vec: Dict[int, object]) -> FrameField:
        n = len(self.monomials)
        polys = [{}, {}, {}]
        for j, c in vec.items():
            i, k = divmod(j, n)
            polys[i][self.monomials[k]] = c
        return FrameField(*(canonicalize(Poly4(p)) for p in polys))


def _curl_operator(coords: _Coordinates) -> Dict[int, List[Tuple[int, object]]]:
    """Sparse columns of curl in the given coordinates."""
    columns: Dict[int, List[Tuple[int, object]]] = {}
    n = len(coords.monomials)
    zero = SphereScalar.zero()
    for i in range(3):
        for k, e in enumerate(coords.monomials):
            f = [zero, zero, zero]
            f[i] = canonicalize(Poly4.monomial(e))
            image = curl(FrameField(*f))
            columns[i * n + k] = sorted(coords.to_vector(image).items())
    return columns


def _matvec(columns, vec):
    out: Dict[int, object] = {}
    for j, x in vec.items():
        for i, c in columns[j]:
            s = out.get(i, 0) + c * x
            if s == 0:
                out.pop(i, None)
            else:
                out[i] = s
    return out


def _axpy(alpha, x, y):
    """alpha * x + y for sparse vectors."""
    out = dict(y)
    for j, c in x.items():
        s = out.get(j, 0) + alpha * c
        if s == 0:
            out.pop(j, None)
        else:
            out[j] = s
    return out


class _Rref:
    """Incremental Gaussian elimination over the rationals.

    Tracks a triangular set of pivot rows; insert() returns the reduced row
    (None when dependent), so the inserted rows form a basis of the span.
    """

    def __init__(self):
        self.rows: Dict[int, Dict[int, object]] = {}

    def reduce(self, vec):
        vec = dict(vec)
        while vec:
            p = max(vec)
            row = self.rows.get(p)
            if row is None:
                return p, vec
            vec = _axpy(-vec[p], row, vec)
        return None, vec

    def insert(self, vec):
        p, vec = self.reduce(vec)
        if p is None:
            return None
        inv = Rat(1) / Rat(vec[p]) if not isinstance(vec[p], float) else 1.0 / vec[p]
        vec = {j: inv * c for j, c in vec.items()}
        self.rows[p] = vec
        return vec

    @property
    def rank(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# The solver


class SolverEigenspace:
    """One curl eigenspace produced by the exact solver."""

    def __init__(self, eigenvalue: int, vectors, coords: _Coordinates):
        self.eigenvalue = eigenvalue
        self._vectors = vectors
        self._coords = coords

    @property
    def dimension(self) -> int:
        return len(self._vectors)

    def fields(self) -> List[FrameField]:
        return [self._coords.to_field(v) for v in self._vectors]


class SolverResult:
    """Outcome of eigenspace_solve: eigenspaces plus the gradient dimension."""

    def __init__(self, dmax: int, eigenspaces: Dict[int, SolverEigenspace],
                 gradient_dimension: int, trial_dimension: int):
        self.dmax = dmax
        self.eigenspaces = eigenspaces
        self.gradient_dimension = gradient_dimension
        self.trial_dimension = trial_dimension

    def dimension(self, eigenvalue: int) -> int:
        space = self.eigenspaces.get(eigenvalue)
        return space.dimension if space is not None else 0


class _Block:
    """A parity block of the trial space with its spectral projections."""

    def __init__(self, dmax: int, parity: int):
        degree_cap = dmax + 2
        self.coords = _Coordinates(degree_cap, parity)
        self.curl_columns = _curl_operator(self.coords)
        # Eigenvalues of this parity present up to dmax + 2 (plus 0 for the
        # gradient part, which lives in both blocks).
        start = 2 if parity == 0 else 3
        magnitudes = list(range(start, dmax + 3, 2))
        self.spectrum = [0] + [s * m for m in magnitudes for s in (1, -1)]
        rref = _Rref()
        self.basis = []
        for gen in self._generators(dmax + 1, parity):
            row = rref.insert(gen)
            if row is not None:
                self.basis.append(row)

    def _generators(self, cartesian_degree: int, parity: int):
        """Coordinate vectors of tangential monomial field projections."""
        # Frame coefficients of m e_a have degree deg(m) + 1, so the block of
        # coefficient parity `parity` comes from monomials of the opposite
        # degree parity.
        for d in range(1 - parity, cartesian_degree + 1, 2):
            for e1 in range(d + 1):
                for e2 in range(d + 1 - e1):
                    for e3 in range(d + 1 - e1 - e2):
                        m = (e1, e2, e3, d - e1 - e2 - e3)
                        for a in range(4):
                            field = FrameField(*(
                                canonicalize(Poly4.monomial(m) *
                                             _frame_linear(i, a))
                                for i in range(3)))
                            if not field.is_zero():
                                yield self.coords.to_vector(field)

    def project(self, vec, mu: int):
        """Apply the Lagrange projection onto eigenvalue mu to a vector."""
        out = vec
        for nu in self.spectrum:
            if nu == mu:
                continue
            scale = Rat(1, mu - nu)
            out = {j: scale * c for j, c in
                   _axpy(-Rat(nu), out, _matvec(self.curl_columns, out)).items()}
        return out

    def solve(self):
        """Eigenbases per eigenvalue, verifying the resolution of identity."""
        collectors = {mu: _Rref() for mu in self.spectrum}
        for b in self.basis:
            total: Dict[int, object] = {}
            for mu in self.spectrum:
                piece = self.project(b, mu)
                total = _axpy(Rat(1), piece, total)
                if piece:
                    collectors[mu].insert(piece)
            if total != b:
                raise SpectrumError(
                    "spectral projections do not resolve the identity on the "
                    "trial space; the candidate spectrum is incomplete")
        return collectors


def _frame_linear(i: int, a: int) -> Poly4:
    """The linear form (L_i x)_a as a polynomial."""
    L = FRAME_GENERATORS[i]
    out = Poly4.zero()
    for m in range(4):
        if L[a][m]:
            out = out + Poly4.variable(m + 1).scale(Rat(L[a][m]))
    return out


_BLOCK_CACHE: Dict[Tuple[int, int], Tuple[_Block, Dict[int, _Rref]]] = {}


def _solved_block(dmax: int, parity: int):
    key = (dmax, parity)
    if key not in _BLOCK_CACHE:
        block = _Block(dmax, parity)
        _BLOCK_CACHE[key] = (block, block.solve())
    return _BLOCK_CACHE[key]


def eigenspace_solve(dmax: int, limit: int = DEFAULT_DMAX_LIMIT) -> SolverResult:
    """Diagonalize curl exactly on the trial space of order dmax.

    Returns the eigenspaces for the integer spectrum {+-2, ..., +-(dmax+2)}
    together with the dimension of the gradient (curl-kernel) part.  Raises
    SpectrumError if that candidate spectrum fails to exhaust the trial
    space, and ValueError when dmax exceeds the configured limit.
    """
    if dmax < 0 or dmax > limit:
        raise ValueError(f"dmax must be between 0 and {limit}, got {dmax}")
    eigenspaces: Dict[int, SolverEigenspace] = {}
    gradient_dimension = 0
    trial_dimension = 0
    for parity in (0, 1):
        block, collectors = _solved_block(dmax, parity)
        trial_dimension += len(block.basis)
        for mu, collector in collectors.items():
            if mu == 0:
                gradient_dimension += collector.rank
            elif collector.rank:
                vectors = list(collector.rows.values())
                eigenspaces[mu] = SolverEigenspace(mu, vectors, block.coords)
    return SolverResult(dmax, eigenspaces, gradient_dimension, trial_dimension)


def project_vector(field: FrameField, mu: int, dmax: int) -> FrameField:
    """Exact spectral projection of a polynomial frame field.

    The field is split into its two coefficient-parity parts, each projected
    in the corresponding block of the order-dmax trial space.
    """
    even = FrameField(*(SphereScalar(c.even_part, Poly4.zero()) for c in field.f))
    odd = FrameField(*(SphereScalar(Poly4.zero(), c.odd_part) for c in field.f))
    out = FrameField.zero()
    for parity, part in ((0, even), (1, odd)):
        if part.is_zero():
            continue
        block, _ = _solved_block(dmax, parity)
        if mu not in block.spectrum:
            continue
        vec = block.coords.to_vector(part)
        out = out + block.coords.to_field(block.project(vec, mu))
    return out


def field_dmax(field: FrameField, limit: int = DEFAULT_DMAX_LIMIT) -> int:
    """The smallest solver order whose spectrum resolves the field.

    A field with coefficient degree D can carry eigencomponents up to
    +-(D + 2) plus a gradient part, so the order must be D itself.
    """
    k = max(field.coefficient_degree(), 0)
    if k > limit:
        raise ValueError(
            f"coefficient degree {field.coefficient_degree()} exceeds the "
            f"configured solver limit (dmax <= {limit})")
    return k
