"""Tests for the unimodular torus metric family and its curl spectrum."""

from __future__ import annotations

import csv
import io
import math
from fractions import Fraction

import pytest
import sympy

from beltrami.annulus import (
    AnnulusMode,
    TORUS_VOLUME,
    bound_constants,
    first_eigenfields,
    first_eigenvalue,
    metric,
    metric_determinant,
    spectrum_candidates,
    spectrum_csv,
    volume,
)


class TestMetricFamily:
    def test_diagonal_entries(self):
        g = metric(5)
        assert g[0][0] == Fraction(1, 5)
        assert g[1][1] == Fraction(1, 5)
        assert g[2][2] == Fraction(25)
        assert g[0][1] == 0

    def test_unimodular(self):
        for n in range(1, 11):
            assert metric_determinant(n) == 1

    def test_volume_is_parameter_free(self):
        for n in (1, 4, 9):
            assert volume(n) == pytest.approx(TORUS_VOLUME, rel=1e-15)

    def test_rejects_bad_parameter(self):
        with pytest.raises(ValueError):
            metric(0)
        with pytest.raises(ValueError):
            metric(-2)


class TestAnnulusMode:
    def test_exact_eigenvalue_square(self):
        mode = AnnulusMode(n=3, m1=1, m2=2, m=1)
        assert mode.eigenvalue_sq() == \
            Fraction(3) * 5 + Fraction(1, 36)

    def test_pure_t_mode_needs_even_m(self):
        with pytest.raises(ValueError):
            AnnulusMode(n=2, m1=0, m2=0, m=1)
        AnnulusMode(n=2, m1=0, m2=0, m=2)
        AnnulusMode(n=2, m1=1, m2=0, m=1)

    def test_branch_sign(self):
        plus = AnnulusMode(n=2, m1=0, m2=0, m=2, branch=1)
        minus = AnnulusMode(n=2, m1=0, m2=0, m=2, branch=-1)
        assert plus.eigenvalue() == pytest.approx(0.5)
        assert minus.eigenvalue() == pytest.approx(-0.5)
        with pytest.raises(ValueError):
            AnnulusMode(n=2, m1=0, m2=0, m=2, branch=0)


class TestSpectrumCandidates:
    def test_bottom_mode_is_one_over_n(self):
        for n in range(1, 11):
            rows = spectrum_candidates(n, cutoff=3)
            bottom = rows[0]
            assert bottom["label"] == "confirmed"
            assert bottom["mode"].m1 == 0 and bottom["mode"].m2 == 0
            assert bottom["mode"].m == 2
            assert bottom["eigenvalue_sq"] == Fraction(1, n * n)
            assert first_eigenvalue(n) == Fraction(1, n)

    def test_twisted_candidates_stay_above_one(self):
        for n in range(1, 11):
            for row in spectrum_candidates(n, cutoff=3):
                if row["label"] == "candidate":
                    assert row["eigenvalue"] >= 1.0 - 1e-14

    def test_chain_is_monotone_decreasing(self):
        values = [float(first_eigenvalue(n)) for n in range(1, 11)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_rejects_empty_cutoff(self):
        with pytest.raises(ValueError):
            spectrum_candidates(2, cutoff=0)


class TestFirstEigenfields:
    def test_eigen_system_holds_symbolically(self):
        for n in (1, 2, 5):
            v1, v2 = first_eigenfields(n)
            lam = sympy.Rational(1, n)
            assert all(r == 0 for r in v1.eigen_residual(n, lam))
            assert all(r == 0 for r in v2.eigen_residual(n, lam))

    def test_initial_direction(self):
        v1, _ = first_eigenfields(4)
        t = v1.coordinates[2]
        at_zero = [c.subs(t, 0) for c in v1.components]
        assert at_zero == [0, 1, 0]

    def test_components_are_mean_zero(self):
        v1, v2 = first_eigenfields(2)
        assert all(m == 0 for m in v1.component_means())
        assert all(m == 0 for m in v2.component_means())

    def test_wrong_eigenvalue_leaves_residual(self):
        v1, _ = first_eigenfields(2)
        residual = v1.eigen_residual(2, sympy.Integer(1))
        assert any(r != 0 for r in residual)


class TestBoundConstants:
    def test_values(self):
        constants = bound_constants()
        assert constants["round_sphere"] == pytest.approx(
            2 * (2 * math.pi ** 2) ** (1 / 3), rel=1e-15)
        assert constants["ball_volume_cbrt"] == pytest.approx(
            (4 * math.pi / 3) ** (1 / 3), rel=1e-15)
        assert constants["conformal_lower_bound"] == pytest.approx(
            (16 / math.pi) ** (1 / 3), rel=1e-15)

    def test_sphere_exceeds_ball_constant(self):
        constants = bound_constants()
        assert constants["round_sphere"] > \
            constants["ball_volume_cbrt"] + 1e-12


class TestCsvExport:
    def test_header_and_rows(self):
        text = spectrum_csv(range(1, 11))
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["n", "mu1_exact", "mu1", "volume", "candidates"]
        assert len(rows) == 11
        row3 = rows[3]
        assert row3[0] == "3"
        assert row3[1] == "1/3"
        assert float(row3[2]) == pytest.approx(1 / 3, rel=1e-12)
        assert float(row3[3]) == pytest.approx(TORUS_VOLUME, rel=1e-12)
        assert "confirmed" in row3[4]
