"""Tests for the Hopf-coordinate product quadrature."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from beltrami.exactpoly import Poly4, integrate_monomial
from beltrami.frames import hopf_frame
from beltrami.atlas import explicit_basis
from beltrami.quadrature import (
    HopfGrid,
    convergence_probe,
    default_grid,
    grid_for_degree,
    integrate_scalar,
)


class TestHopfGrid:
    def test_total_weight(self):
        grid = default_grid()
        assert grid.total_weight() == pytest.approx(2 * math.pi ** 2,
                                                    rel=1e-14)

    def test_points_on_sphere(self):
        grid = HopfGrid(4, 8)
        radii = np.linalg.norm(grid.points, axis=1)
        np.testing.assert_allclose(radii, 1.0, rtol=1e-14)

    def test_immutable(self):
        grid = HopfGrid(4, 8)
        with pytest.raises(ValueError):
            grid.points[0, 0] = 2.0

    def test_rejects_bad_orders(self):
        with pytest.raises(ValueError):
            HopfGrid(0, 8)


class TestPolynomialExactness:
    def test_constant(self):
        assert integrate_scalar(lambda pts: np.ones(pts.shape[0])) == \
            pytest.approx(2 * math.pi ** 2, rel=1e-14)

    def test_spec_monomial(self):
        f = Poly4.variable(1) ** 2 * Poly4.variable(2) ** 2
        assert integrate_scalar(f) == pytest.approx(math.pi ** 2 / 12,
                                                    rel=1e-13)

    def test_all_monomials_up_to_degree_twelve(self):
        grid = default_grid()
        assert grid.exact_cartesian_degree() >= 12
        rng = random.Random(103)
        for _ in range(60):
            e = [rng.randrange(4) for _ in range(4)]
            while sum(e) > 12:
                e[rng.randrange(4)] = max(0, e[rng.randrange(4)] - 1)
            exact = float(integrate_monomial(tuple(e)))
            value = integrate_scalar(Poly4.monomial(tuple(e)), grid)
            if exact == 0.0:
                assert abs(value) < 1e-14
            else:
                assert value == pytest.approx(exact, rel=1e-13)

    def test_odd_integrands_vanish(self):
        grid = default_grid()
        for i in range(1, 5):
            value = integrate_scalar(Poly4.variable(i) ** 3, grid)
            assert abs(value) < 1e-14

    def test_grid_for_degree(self):
        grid = grid_for_degree(60)
        assert grid.exact_cartesian_degree() >= 60
        e = (30, 20, 10, 0)
        assert integrate_scalar(Poly4.monomial(e), grid) == \
            pytest.approx(float(integrate_monomial(e)), rel=1e-12)


class TestNonPolynomial:
    def test_closed_form_fractional_power(self):
        # Radial reduction: the integrand depends only on eta, and
        # 4 pi^2 * integral_0^{pi/2} cos(eta)^{5/2} sin(eta) cos(eta) d eta
        # evaluates to 8 pi^2 / 7.
        def f(pts):
            return (pts[:, 0] ** 2 + pts[:, 1] ** 2) ** 0.75

        # The integrand is (1 - u)^{3/4} in the radial variable, with an
        # algebraic endpoint singularity, so convergence is algebraic: the
        # default grid lands within a few 1e-6 relative.
        assert integrate_scalar(f) == pytest.approx(8 * math.pi ** 2 / 7,
                                                    rel=1e-5)
        refined = integrate_scalar(f, HopfGrid(96, 96))
        assert refined == pytest.approx(8 * math.pi ** 2 / 7, rel=1e-7)


class TestConvergenceProbe:
    def test_polynomial_immediately_flat(self):
        f = Poly4.variable(1) ** 4
        table = convergence_probe(f, [(8, 16), (12, 24), (24, 48)])
        assert table[0]["difference"] is None
        assert all(row["difference"] < 1e-13 for row in table[1:])
        assert all(row["converged"] for row in table[1:])

    def test_smoothed_energy_integrand_converges(self):
        B1, _, _ = hopf_frame()
        u5 = explicit_basis(3).orthonormal_float_fields()[4]
        field = B1.to_float() + u5.scale(0.05)

        def f(pts):
            return np.sum(field.evaluate(pts) ** 2, axis=1) ** 0.75

        table = convergence_probe(f, [(8, 16), (16, 32), (24, 48)])
        diffs = [row["difference"] for row in table[1:]]
        # The squared speed is bounded away from zero, so the integrand is
        # smooth and the probe is flat at machine precision right away.
        assert all(d < 1e-12 for d in diffs)
        assert table[-1]["converged"]

    def test_jump_flagged_as_nonconverging(self):
        def jump(pts):
            return (pts[:, 0] > 0.2).astype(float)

        table = convergence_probe(jump, [(8, 16), (16, 32), (24, 48)])
        assert not table[-1]["converged"]
