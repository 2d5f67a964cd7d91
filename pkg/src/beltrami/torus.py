"""Beltrami fields and conformal eigenvalue perturbation on the flat torus.

Fields on T^3 = (R / 2 pi Z)^3 are finite Fourier series

    u(x) = sum_k a_k exp(i k . x),    a_{-k} = conj(a_k),  k . a_k = 0,

with integer wavevectors.  Curl acts mode by mode as i k x (.), so each
shell |k| = const carries curl eigenfields of eigenvalues +-|k| spanned by
helical polarization vectors.  All integrals reduce to Fourier
orthogonality over the volume (2 pi)^3 and are therefore exact up to float
rounding.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import scipy.linalg

Wavevector = Tuple[int, int, int]

VOLUME = (2.0 * math.pi) ** 3

_SYMMETRY_TOLERANCE = 1e-12


def _as_wavevector(k: Iterable[int]) -> Wavevector:
    k = tuple(int(a) for a in k)
    if len(k) != 3:
        raise ValueError(f"wavevectors have three components, got {k}")
    return k


def _neg(k: Wavevector) -> Wavevector:
    return (-k[0], -k[1], -k[2])


class TorusScalar:
    """A real trigonometric polynomial on T^3 as a Fourier coefficient map.

    modes maps wavevectors to complex coefficients with the reality
    constraint coeff(-k) = conj(coeff(k)).
    """

    __slots__ = ("modes",)

    def __init__(self, modes: Dict[Wavevector, complex]):
        cleaned: Dict[Wavevector, complex] = {}
        for k, c in modes.items():
            c = complex(c)
            if c != 0:
                cleaned[_as_wavevector(k)] = c
        for k, c in cleaned.items():
            mirror = cleaned.get(_neg(k), 0j)
            if abs(mirror - c.conjugate()) > _SYMMETRY_TOLERANCE:
                raise ValueError(
                    f"coefficients at {k} and {_neg(k)} violate the "
                    "reality constraint")
        self.modes = cleaned

    @staticmethod
    def zero() -> "TorusScalar":
        return TorusScalar({})

    @staticmethod
    def const(c: float) -> "TorusScalar":
        return TorusScalar({(0, 0, 0): complex(c)})

    @staticmethod
    def cosine(k: Iterable[int], amplitude: float = 1.0) -> "TorusScalar":
        """amplitude * cos(k . x)."""
        k = _as_wavevector(k)
        half = 0.5 * amplitude
        return TorusScalar({k: half, _neg(k): half})

    @staticmethod
    def sine(k: Iterable[int], amplitude: float = 1.0) -> "TorusScalar":
        """amplitude * sin(k . x)."""
        k = _as_wavevector(k)
        half = amplitude / 2j
        return TorusScalar({k: half, _neg(k): -half})

    def __add__(self, other: "TorusScalar") -> "TorusScalar":
        out = dict(self.modes)
        for k, c in other.modes.items():
            out[k] = out.get(k, 0j) + c
        return TorusScalar(out)

    def __sub__(self, other: "TorusScalar") -> "TorusScalar":
        return self + other.scale(-1.0)

    def scale(self, s: float) -> "TorusScalar":
        return TorusScalar({k: s * c for k, c in self.modes.items()})

    def mean(self) -> float:
        return self.modes.get((0, 0, 0), 0j).real

    def integral(self) -> float:
        """Integral over the torus: the mean times the volume (2 pi)^3."""
        return self.mean() * VOLUME

    def is_constant(self, tolerance: float = 0.0) -> bool:
        return all(k == (0, 0, 0) or abs(c) <= tolerance
                   for k, c in self.modes.items())

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Values at an (N, 3) array of points."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[0], dtype=complex)
        for k, c in self.modes.items():
            out += c * np.exp(1j * pts @ np.array(k, dtype=float))
        return out.real


class TorusField:
    """A real divergence-free trigonometric vector field on T^3.

    modes maps wavevectors to complex 3-component amplitudes with
    amp(-k) = conj(amp(k)) and k . amp(k) = 0, so the field is real and
    divergence free mode by mode.
    """

    __slots__ = ("modes",)

    def __init__(self, modes: Dict[Wavevector, Sequence[complex]]):
        cleaned: Dict[Wavevector, np.ndarray] = {}
        for k, amp in modes.items():
            amp = np.asarray(amp, dtype=complex)
            if amp.shape != (3,):
                raise ValueError("amplitudes must have three components")
            if np.any(amp != 0):
                cleaned[_as_wavevector(k)] = amp
        for k, amp in cleaned.items():
            mirror = cleaned.get(_neg(k))
            mirror = np.zeros(3, dtype=complex) if mirror is None else mirror
            if np.max(np.abs(mirror - amp.conjugate())) > \
                    _SYMMETRY_TOLERANCE:
                raise ValueError(
                    f"amplitudes at {k} and {_neg(k)} violate the reality "
                    "constraint")
            divergence = np.dot(np.array(k, dtype=float), amp)
            if abs(divergence) > _SYMMETRY_TOLERANCE:
                raise ValueError(f"mode {k} is not divergence free")
        self.modes = cleaned

    def __add__(self, other: "TorusField") -> "TorusField":
        out = {k: a.copy() for k, a in self.modes.items()}
        for k, a in other.modes.items():
            out[k] = out.get(k, np.zeros(3, dtype=complex)) + a
        return TorusField(out)

    def scale(self, s: float) -> "TorusField":
        return TorusField({k: s * a for k, a in self.modes.items()})

    def curl(self) -> "TorusField":
        """Curl acts per mode as i k x amplitude."""
        return TorusField({
            k: 1j * np.cross(np.array(k, dtype=float), a)
            for k, a in self.modes.items()})

    def dot(self, other: "TorusField") -> TorusScalar:
        """The pointwise inner product as a trigonometric polynomial."""
        out: Dict[Wavevector, complex] = {}
        for k1, a1 in self.modes.items():
            for k2, a2 in other.modes.items():
                m = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                out[m] = out.get(m, 0j) + complex(np.dot(a1, a2))
        return TorusScalar(out)

    def speed_sq(self) -> TorusScalar:
        return self.dot(self)

    def l2_inner(self, other: "TorusField") -> float:
        return self.dot(other).integral()

    def norm_sq(self) -> float:
        return self.l2_inner(self)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Values at an (N, 3) array of points, shape (N, 3)."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros((pts.shape[0], 3), dtype=complex)
        for k, a in self.modes.items():
            out += np.exp(1j * pts @ np.array(k, dtype=float))[:, None] \
                * a[None, :]
        return out.real


def abc_field(a: float, b: float, c: float) -> TorusField:
    """The field (a sin z + c cos y, b sin x + a cos z, c sin y + b cos x).

    A curl eigenfield of eigenvalue one for every choice of the three
    amplitudes.
    """
    modes: Dict[Wavevector, np.ndarray] = {}

    def add(k: Wavevector, amp: Sequence[complex]) -> None:
        amp = np.asarray(amp, dtype=complex)
        modes[k] = modes.get(k, np.zeros(3, dtype=complex)) + amp
        mk = _neg(k)
        modes[mk] = modes.get(mk, np.zeros(3, dtype=complex)) + \
            amp.conjugate()

    half, skew = 0.5, 0.5 / 1j
    add((0, 0, 1), (a * skew, a * half, 0))
    add((0, 1, 0), (c * half, 0, c * skew))
    add((1, 0, 0), (0, b * skew, b * half))
    return TorusField(modes)


def speed_is_constant(u: TorusField,
                      tolerance: float = 1e-12):
    """Whether |u|^2 is constant, with a witness mode when it is not.

    Returns (True, None) for constant speed, otherwise (False, k) where k
    is the nonzero wavevector carrying the largest Fourier coefficient of
    the squared speed.
    """
    speed = u.speed_sq()
    worst_k, worst = None, tolerance
    for k, c in speed.modes.items():
        if k != (0, 0, 0) and abs(c) > worst:
            worst_k, worst = k, abs(c)
    return (worst_k is None), worst_k


def first_variation(u: TorusField, phidot: TorusScalar) -> float:
    """Integral of phidot |u|^2: the volume response of the energy.

    phidot must have zero mean (a volume-preserving deformation rate); the
    integral is exact by Fourier orthogonality.
    """
    if abs(phidot.mean()) > _SYMMETRY_TOLERANCE:
        raise ValueError("the deformation rate must have zero mean")
    speed = u.speed_sq()
    total = 0j
    for k, c in phidot.modes.items():
        partner = speed.modes.get(_neg(k))
        if partner is not None:
            total += c * partner
    return total.real * VOLUME


def _helical_pair(k: Wavevector) -> Tuple[np.ndarray, np.ndarray]:
    """An orthonormal pair (e, f) normal to k with e x f = k / |k|."""
    kv = np.array(k, dtype=float)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(kv)))] = 1.0
    e = np.cross(axis, kv)
    e /= np.linalg.norm(e)
    f = np.cross(kv / np.linalg.norm(kv), e)
    return e, f


def beltrami_basis(kmax: int) -> Tuple[List[TorusField], List[float]]:
    """Real curl eigenfields spanning all shells with 0 < |k| <= kmax.

    For each wavevector (one per antipodal pair) and each helicity sign the
    two real parts of the helical mode are returned, along with the list of
    curl eigenvalues +-|k|.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least one")
    fields: List[TorusField] = []
    eigenvalues: List[float] = []
    bound = kmax * kmax
    for kx in range(-kmax, kmax + 1):
        for ky in range(-kmax, kmax + 1):
            for kz in range(-kmax, kmax + 1):
                k = (kx, ky, kz)
                norm_sq = kx * kx + ky * ky + kz * kz
                if norm_sq == 0 or norm_sq > bound:
                    continue
                if k < _neg(k):
                    continue
                e, f = _helical_pair(k)
                for sign in (1.0, -1.0):
                    h = (e + sign * 1j * f) / math.sqrt(2.0)
                    for amp in (h, 1j * h):
                        fields.append(TorusField({
                            k: amp, _neg(k): amp.conjugate()}))
                        eigenvalues.append(sign * math.sqrt(norm_sq))
    return fields, eigenvalues


class TorusPencil:
    """The pencil A c = mu B(t) c for the metric (1 + t q)^2 delta on T^3.

    A holds the curl pairings of the Beltrami basis and B(t) the mass
    matrix weighted by 1 + t q; both are exact by trigonometric
    orthogonality.
    """

    def __init__(self, q: TorusScalar, t: float, kmax: int):
        self.q = q
        self.t = t
        self.kmax = kmax
        fields, mus = beltrami_basis(kmax)
        self.fields = fields
        self.mus = np.array(mus)
        n = len(fields)
        gram = np.zeros((n, n))
        mass_q = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1):
                product = fields[i].dot(fields[j])
                gram[i, j] = gram[j, i] = product.integral()
                weighted = 0j
                for k, c in q.modes.items():
                    partner = product.modes.get(_neg(k))
                    if partner is not None:
                        weighted += c * partner
                mass_q[i, j] = mass_q[j, i] = weighted.real * VOLUME
        self.gram = gram
        self.mass_q = mass_q
        weighted = self.mus[:, None] * gram
        self.a = 0.5 * (weighted + weighted.T)
        self.b = gram + t * mass_q

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigh(self.a, self.b, eigvals_only=True)

    def mu1_group_derivatives(self) -> np.ndarray:
        """First-order t-derivatives of the smallest positive eigenvalue
        group at t = 0.

        The group at mu = 1 is degenerate, so the derivatives are the
        eigenvalues of the perturbation form -mu1 <q e_i, e_j> projected
        onto the group, in the metric of the unweighted mass matrix.
        """
        group = np.nonzero(np.abs(self.mus - 1.0) < 1e-12)[0]
        if group.size == 0:
            raise RuntimeError("the basis carries no eigenvalue-one group")
        sub_gram = self.gram[np.ix_(group, group)]
        sub_mass = self.mass_q[np.ix_(group, group)]
        return scipy.linalg.eigh(-1.0 * sub_mass, sub_gram,
                                 eigvals_only=True)


def torus_pencil(q: TorusScalar, t: float = 0.0,
                 kmax: int = 1) -> TorusPencil:
    """Assemble the conformal curl pencil on the torus."""
    return TorusPencil(q, t, kmax)
