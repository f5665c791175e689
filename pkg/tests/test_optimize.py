import math

import numpy as np
import pytest

from lowcostmi.errors import BracketError, DomainError
from lowcostmi.lowcost import U_STAR, f_curve
from lowcostmi.optimize import (
    SweepSpec,
    best_two_symbol_u,
    hadamard_strategy_pie,
    maximize_scalar,
    optimal_pie_three_symbol,
    optimal_pie_two_symbol,
    superadditivity_gap,
    superadditivity_threshold,
)
from lowcostmi.receivers import helstrom_mi, two_symbol_mi


class TestMaximizeScalar:
    def test_interior(self):
        x, fx = maximize_scalar(lambda x: -((x - 0.3) ** 2), 0.0, 1.0, 1e-10)
        assert x == pytest.approx(0.3, abs=1e-8)
        assert fx == pytest.approx(0.0, abs=1e-15)

    def test_sine(self):
        x, fx = maximize_scalar(math.sin, 0.0, math.pi, 1e-10)
        assert x == pytest.approx(math.pi / 2, abs=1e-7)
        assert fx == pytest.approx(1.0)

    def test_boundary_maximum(self):
        assert maximize_scalar(lambda x: x, 0.0, 1.0) == (1.0, 1.0)
        assert maximize_scalar(lambda x: -x, 0.0, 1.0) == (0.0, 0.0)

    def test_empty_interval(self):
        with pytest.raises(DomainError):
            maximize_scalar(lambda x: x, 1.0, 1.0)


class TestSweepSpec:
    def test_grid(self):
        g = SweepSpec(1e-4, 1.0, 5).grid()
        np.testing.assert_allclose(g, [1e-4, 1e-3, 1e-2, 1e-1, 1.0])

    def test_single_point(self):
        assert SweepSpec(0.01, 0.01, 1).grid().tolist() == [0.01]

    @pytest.mark.parametrize(
        "args", [(0.0, 1.0, 5), (1.0, 0.1, 5), (0.1, 0.1, 3), (0.1, 1.0, 0), (-1.0, 1.0, 3)]
    )
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            SweepSpec(*args)


class TestTwoSymbolSearch:
    def test_u_opt_is_interior_maximum(self):
        nbar = 1e-3
        u, pie = best_two_symbol_u(nbar)
        for du in (-0.01, 0.01):
            assert two_symbol_mi(nbar, u + du) / (2 * nbar) < pie
        assert 0.02 < u < 0.08

    @pytest.mark.parametrize("nbar", [1e-3, 1e-2])
    def test_displacement_never_hurts(self, nbar):
        plain, _, _ = optimal_pie_two_symbol(nbar)
        displaced, _, beta = optimal_pie_two_symbol(nbar, with_displacement=True)
        assert displaced >= plain - 1e-9
        assert 0 < beta < 8 * math.sqrt(nbar)

    def test_invalid_nbar(self):
        with pytest.raises(DomainError):
            optimal_pie_two_symbol(0.0)
        with pytest.raises(DomainError):
            optimal_pie_three_symbol(-1.0)

    def test_three_symbol_beats_two_symbol(self):
        pie3, v = optimal_pie_three_symbol(1e-3)
        pie2, _, _ = optimal_pie_two_symbol(1e-3)
        assert pie3 > pie2
        assert 0.01 < v < 0.1


class TestSuperadditivity:
    def test_gap_signs(self):
        assert superadditivity_gap(1e-3) > 0
        assert superadditivity_gap(0.05) < 0

    def test_gap_matches_components(self):
        n = 5e-3
        assert superadditivity_gap(n) == pytest.approx(best_two_symbol_u(n)[1] - helstrom_mi(n) / n)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            superadditivity_threshold(bracket=(0.05, 0.1))

    def test_threshold_is_root(self):
        n = superadditivity_threshold(tol=1e-6)
        assert superadditivity_gap(n * 0.99) > 0 > superadditivity_gap(n * 1.01)


class TestHadamard:
    def test_small(self):
        pie, strategy = hadamard_strategy_pie(2)
        assert strategy == "mixed"
        assert pie == pytest.approx(2 + U_STAR)

    def test_ppm(self):
        assert hadamard_strategy_pie(16) == (pytest.approx(math.log(16)), "ppm")

    def test_invalid_order(self):
        with pytest.raises(DomainError):
            hadamard_strategy_pie(6)

    @pytest.mark.parametrize("M", [1, 2, 4, 8, 12, 16, 20, 24, 32, 64])
    def test_brute_force(self, M):
        # k classes sent to photon counting with probability x each,
        # the rest (if any) to phase-sensitive detection
        xs = np.linspace(1e-6, 1, 20001)
        best = -math.inf
        for k in range(M + 1):
            if k == M:
                val = 2 + M * f_curve(1 / M)
            elif k == 0:
                val = 2.0
            else:
                feasible = xs[k * xs <= 1]
                val = 2 + k * f_curve(feasible).max()
            best = max(best, val)
        pie, _ = hadamard_strategy_pie(M)
        assert pie == pytest.approx(best, abs=1e-6)
