import numpy as np
import pytest

from rankone.errors import (BudgetTooSmallError, NonzeroCenterError,
                            ParameterError)
from rankone.recovery import (RecoveryConfig, error_constant, min_budget,
                              recover, required_n2)
from rankone.tensor import QueryOracle, RankOneTensor, sup_distance_bound
from rankone.univariate import make_bump, polynomial_factor, trig_factor


def poly_tensor(d, r, coeffs):
    return RankOneTensor(
        factors=tuple(polynomial_factor(coeffs, r) for _ in range(d)),
        r=r, M=10.0)


class TestBudgetFormulas:
    def test_required_n2_value(self):
        # d=3, r=2, M=1, eps=0.01, C=1: 3 * max(10 * sqrt(3), 2) = 52
        assert required_n2(3, 2, 1.0, 0.01, 1.0) == 52

    def test_required_n2_floor_at_two_nodes(self):
        # tiny M: the max clamps at 2 nodes per line
        assert required_n2(4, 1, 1e-9, 0.5, 1.0) == 8

    def test_required_n2_invalid(self):
        with pytest.raises(ParameterError):
            required_n2(0, 1, 1.0, 0.1, 1.0)
        with pytest.raises(ParameterError):
            required_n2(2, 1, 1.0, 0.0, 1.0)

    def test_min_budget(self):
        assert min_budget(3, 1) == 7   # 1 + 3 * 2
        assert min_budget(3, 5) == 16  # 1 + 3 * 5

    def test_error_constant_known_orders(self):
        for r in range(1, 6):
            assert error_constant(r) > 0
        assert error_constant(9) == error_constant(5)


class TestRecoveryConfig:
    def test_defaults_fill_constant(self):
        cfg = RecoveryConfig(r=2, budget_n2=20)
        assert cfg.c_calibrated == error_constant(2)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            RecoveryConfig(r=0, budget_n2=10)
        with pytest.raises(ParameterError):
            RecoveryConfig(r=1, budget_n2=0)


class TestRecover:
    def test_exact_on_low_degree_polynomials(self):
        # factors of degree <= r-1 are reproduced to rounding error
        for r in (2, 3, 4):
            t = poly_tensor(3, r, [0.4] + [0.1] * (r - 1))
            o = QueryOracle(t)
            ap = recover(o, np.full(3, 0.3), RecoveryConfig(r=r, budget_n2=40))
            up, _ = sup_distance_bound(t, ap.line_interpolants, ap.center_value,
                                       grid=1001, samples=500)
            assert up <= 1e-8

    def test_query_budget_respected(self):
        t = poly_tensor(4, 2, [0.5, 0.2])
        o = QueryOracle(t, budget=29)
        recover(o, np.full(4, 0.5), RecoveryConfig(r=2, budget_n2=29))
        assert o.query_count <= 29

    def test_center_value_stored(self):
        t = poly_tensor(2, 1, [0.5, 0.2])
        o = QueryOracle(t)
        z = np.array([0.2, 0.8])
        ap = recover(o, z, RecoveryConfig(r=1, budget_n2=9))
        assert ap.center_value == pytest.approx(t.value(z))

    def test_approximant_matches_target_at_center(self):
        t = poly_tensor(3, 2, [0.6, 0.3])
        o = QueryOracle(t)
        z = np.full(3, 0.45)
        ap = recover(o, z, RecoveryConfig(r=2, budget_n2=31))
        assert ap.value(z) == pytest.approx(t.value(z), rel=1e-10)

    def test_budget_too_small(self):
        t = poly_tensor(3, 3, [0.5])
        o = QueryOracle(t)
        with pytest.raises(BudgetTooSmallError):
            recover(o, np.full(3, 0.5), RecoveryConfig(r=3, budget_n2=9))

    def test_zero_center_rejected(self):
        f = make_bump(1, "left")
        t = RankOneTensor(factors=(f, f), r=1, M=2.0)
        o = QueryOracle(t)
        with pytest.raises(NonzeroCenterError):
            recover(o, np.full(2, 0.9), RecoveryConfig(r=1, budget_n2=9))

    def test_center_guard(self):
        t = poly_tensor(2, 1, [0.01])
        o = QueryOracle(t)
        with pytest.raises(NonzeroCenterError):
            recover(o, np.full(2, 0.5),
                    RecoveryConfig(r=1, budget_n2=9, min_center_value=0.1))

    def test_bad_z_shape(self):
        t = poly_tensor(3, 1, [0.5])
        o = QueryOracle(t)
        with pytest.raises(ParameterError):
            recover(o, np.array([0.5, 0.5]), RecoveryConfig(r=1, budget_n2=10))

    def test_batch_and_scalar_evaluation_agree(self):
        t = poly_tensor(3, 2, [0.5, 0.3])
        o = QueryOracle(t)
        ap = recover(o, np.full(3, 0.4), RecoveryConfig(r=2, budget_n2=25))
        X = np.random.default_rng(0).random((10, 3))
        vb = ap.value_batch(X)
        for row, v in zip(X, vb):
            assert ap.value(row) == pytest.approx(v)

    def test_error_contract_on_smooth_family(self):
        # calibrated contract: error <= C_r M d^(r+1) n2^(-r)
        for r in (1, 2, 3):
            M = 0.2 * (2 * np.pi) ** r
            t = RankOneTensor(
                factors=tuple(trig_factor(0.2, 1.0, 0.7 * i, 0.75, r)
                              for i in range(3)),
                r=r, M=M)
            for n2 in (24, 48, 96):
                o = QueryOracle(t)
                ap = recover(o, np.full(3, 0.41),
                             RecoveryConfig(r=r, budget_n2=n2))
                up, _ = sup_distance_bound(t, ap.line_interpolants,
                                           ap.center_value, grid=2001,
                                           samples=500)
                assert up <= error_constant(r) * M * 3 ** (r + 1) * n2 ** (-r)


class TestSmallCenterStability:
    def test_amplification_cancels(self):
        # a tiny f(z*) must not blow up the reconstruction error
        t = poly_tensor(6, 2, [0.05, 0.02])  # f(z*) ~ 1e-8 at d=6
        o = QueryOracle(t)
        ap = recover(o, np.full(6, 0.5), RecoveryConfig(r=2, budget_n2=61))
        up, _ = sup_distance_bound(t, ap.line_interpolants, ap.center_value,
                                   grid=1001, samples=500)
        assert up <= 1e-8
