import numpy as np
import pytest
from numpy.testing import assert_allclose

from ewg import (ConditioningError, DomainError, EwgParams, ResidualSpec, mean, mean_residual_life,
                 quantile, raw_moment, residual_moment, residual_variance, survival)
from ewg.quadrature import integrate_support

ENGINES = ["series", "quadrature"]


@pytest.mark.parametrize("engine", ENGINES)
class TestExponential:
    def test_memoryless(self, engine):
        for beta in (0.5, 2.0):
            p = EwgParams(1, beta, 1, 0)
            for t in np.linspace(0, 5 / beta, 6):
                assert_allclose(mean_residual_life(p, float(t), engine=engine), 1 / beta, rtol=1e-10)
                assert_allclose(residual_moment(p, ResidualSpec(float(t), 2), engine=engine).value,
                                2 / beta ** 2, rtol=1e-10)
                assert_allclose(residual_variance(p, float(t), engine=engine), 1 / beta ** 2, rtol=1e-9)


class TestGeneral:
    def test_spec(self):
        with pytest.raises(DomainError):
            ResidualSpec(-1.0)
        with pytest.raises(DomainError):
            ResidualSpec(1.0, 0)

    @pytest.mark.parametrize("engine", ENGINES)
    def test_mrl_oracle(self, engine):
        p = EwgParams(2, 1, 2, 0.5)
        expected = {0.1: 1.2182759883290264, 0.5: 0.84199235297302219, 1.0: 0.50358253736230223,
                    2.0: 0.23121834171995162}
        for t, v in expected.items():
            assert_allclose(mean_residual_life(p, t, engine=engine), v, rtol=1e-8)

    @pytest.mark.parametrize("engine", ENGINES)
    def test_residual_variance_oracle(self, engine):
        assert_allclose(residual_variance(EwgParams(0.5, 1, 0.7, 0.3), 1.0, engine=engine),
                        5.0045714190735968, rtol=1e-7)

    def test_zero_age_gives_raw_moments(self):
        p = EwgParams(1.7, 0.9, 1.3, 0.6)
        for r in (1, 2, 3):
            for engine in ENGINES:
                assert_allclose(residual_moment(p, ResidualSpec(0.0, r), engine=engine).value,
                                raw_moment(p, r).value, rtol=1e-8)
        assert_allclose(mean_residual_life(p, 1e-9), mean(p), rtol=1e-7)

    def test_survival_identity(self):
        for p in (EwgParams(2, 1, 2, 0.5), EwgParams(0.5, 1, 0.7, 0.3)):
            for t in (0.2, 1.0, 3.0):
                tail = integrate_support(lambda u: survival(p, u), p, lower=t).value
                assert_allclose(mean_residual_life(p, t), tail / survival(p, t), rtol=1e-6)

    def test_engines_agree(self):
        for p in (EwgParams(0.5, 2, 1.5, 0.8), EwgParams(3, 1, 0.8, 0.2), EwgParams(1, 1, 2.5, 0.0)):
            for t in quantile(p, np.array([0.05, 0.5, 0.9, 0.99])):
                for r in (1, 2):
                    s = residual_moment(p, ResidualSpec(float(t), r), engine="series").value
                    q = residual_moment(p, ResidualSpec(float(t), r), engine="quadrature").value
                    assert_allclose(s, q, rtol=1e-4)

    def test_decreasing_mrl_for_increasing_hazard(self):
        for p in (EwgParams(2, 1, 2, 0.2), EwgParams(1, 1, 1.5, 0.5), EwgParams(3, 2, 3, 0.0)):
            ts = np.linspace(0, float(quantile(p, 0.99)), 25)
            m = [mean_residual_life(p, float(t)) for t in ts]
            assert np.all(np.diff(m) <= 1e-12)

    def test_nonnegative_variance(self):
        for p in (EwgParams(0.5, 1, 0.7, 0.3), EwgParams(4, 1, 3, 0.8)):
            for t in (0.0, 0.5, 2.0):
                assert residual_variance(p, t) >= 0

    def test_refuses_vanishing_survival(self):
        with pytest.raises(ConditioningError):
            mean_residual_life(EwgParams(1, 1, 1, 0), 700.0)
