"""
Testes da expansão assintótica do erro da árvore CRR
"""
import math

import numpy as np
import pytest

from scr.engines.analytic import barrier_power, d_coefficients, normal_pdf
from scr.engines.crr import lattice_geometry
from scr.exceptions import (
    KnockedOutAtInceptionError,
    UnsupportedConfigurationError,
    ValidationError,
    WrongRegimeError,
)
from scr.expansion import (
    REPORT_COLUMNS,
    compute_coefficients,
    constant_term,
    leading_terms,
    observed_error,
    predicted_error,
    residual_flag,
    residual_order_report,
)
from scr.models import DigitalOptionSpec, MarketParams, Regime
from scr.tests.conftest import ABOVE_CRR, ABOVE_TRUE, N_GRID, down_call


class TestCoefficients:
    @pytest.mark.parametrize("eps_n", [0, 1])
    def test_cross_relations(self, market, eps_n):
        c = compute_coefficients(market, 100.0, 60.0, eps_n)
        assert c.C_t == (c.c1 - c.A_t[0], -c.A_t[1])
        assert c.D_t == (c.c2 - c.B_t[0], c.c3 - c.B_t[1], -c.B_t[2], -c.B_t[3])
        assert c.G_t == (-c.E_t[0], c.c1, -c.E_t[1])
        assert c.H_t == (c.c2 - c.F_t[0], c.c3, -c.F_t[1], -c.F_t[2])
        assert c.alpha_hat - c.alpha == pytest.approx(market.sigma / 2.0, rel=1e-14)
        assert c.c3 == pytest.approx(c.c_tilde * c.c1, rel=1e-14)

    def test_aligned_barrier_cancels_constant(self, market):
        c = compute_coefficients(market, 60.0, 100.0, eps_n=1)
        assert abs(c.E_t[0]) <= 1e-12

    def test_constant_without_barrier_node_is_image_term(self, market):
        c = compute_coefficients(market, 60.0, 100.0, eps_n=0)
        d = d_coefficients(market, 60.0, 100.0)
        image = barrier_power(market, 100.0) * normal_pdf(d.d42)
        for n in N_GRID:
            assert constant_term(c, n, Regime.DO_LgtK) == pytest.approx(c.discount * image / math.sqrt(n), rel=1e-12)
            assert constant_term(c, n, Regime.DI_LgtK) == pytest.approx(-c.discount * image / math.sqrt(n), rel=1e-12)

    def test_no_constant_below_strike(self, market):
        c = compute_coefficients(market, 100.0, 60.0, eps_n=0)
        assert constant_term(c, 100, Regime.DO_LltK) == 0.0

    def test_guards(self, market):
        with pytest.raises(KnockedOutAtInceptionError):
            compute_coefficients(MarketParams(s0=50.0, r=0.1, sigma=0.25, T=1.0), 100.0, 60.0, 0)
        with pytest.raises(WrongRegimeError):
            compute_coefficients(market, 100.0, 100.0, 0)
        with pytest.raises(ValidationError):
            compute_coefficients(market, 100.0, 60.0, 2)


class TestPredictedError:
    def test_aligned_inputs_kill_first_order_below_strike(self, market):
        c = compute_coefficients(market, 100.0, 60.0, eps_n=1)
        first, _ = leading_terms(c, 0.0, 0.0, Regime.DO_LltK)
        assert first == 0.0

    @pytest.mark.parametrize("regime", list(Regime))
    def test_quadratic_in_deltas(self, market, regime):
        K, L = (100.0, 60.0) if regime in (Regime.DI_LltK, Regime.DO_LltK) else (60.0, 100.0)
        c = compute_coefficients(market, K, L, eps_n=0)
        n = 400

        def basis(dK, dL):
            return [1.0, dK, dL, dK * dK, dK * dL, dL * dL]

        samples = [(-0.9, 0.1), (0.8, 0.9), (0.1, 0.5), (-0.4, 0.7), (0.5, 0.2), (0.0, 0.95)]
        A = np.array([basis(*s) for s in samples])
        b = np.array([predicted_error(c, n, dK, dL, regime) for dK, dL in samples])
        coeffs = np.linalg.solve(A, b)
        point = (0.3, 0.35)
        assert float(np.dot(basis(*point), coeffs)) == pytest.approx(predicted_error(c, n, *point, regime), abs=1e-14)

    def test_observed_error(self, below):
        market, spec = below
        assert observed_error(market, spec, 100, 'linear') == pytest.approx(0.004480, abs=2e-6)


class TestResidualFlag:
    @pytest.mark.parametrize("values, expected", [
        ([1.0, 2.0, 3.0, 10.0], True),
        ([1.0, 2.0, 3.0, 4.0], False),
        ([3.0, 1.0, 2.0, 9.0], False),
        ([-1.0, -2.0, -8.0], True),
        ([5.0], False),
    ])
    def test_rule(self, values, expected):
        assert residual_flag(values) is expected


class TestResidualReport:
    def test_barrier_below_strike(self, below):
        market, spec = below
        report = residual_order_report(market, spec, N_GRID, 'exact')
        table = report.table
        assert list(table.columns) == REPORT_COLUMNS
        assert table['n'].tolist() == N_GRID
        assert not report.flagged
        assert (table['residual'].abs() * table['n']).max() <= 0.1
        assert np.allclose(table['residual'], table['observed'] - table['predicted'], rtol=0, atol=1e-15)
        assert (table['constant_term'] == 0.0).all()

    def test_single_n(self, below):
        market, spec = below
        report = residual_order_report(market, spec, [200])
        assert len(report.table) == 1
        assert not report.flagged

    @pytest.mark.parametrize("knock", ['out', 'in'])
    def test_barrier_above_strike_bounded(self, above, knock):
        market, _ = above
        spec = down_call(60.0, 100.0, knock=knock)
        report = residual_order_report(market, spec, N_GRID, 'exact')
        table = report.table
        assert not report.flagged
        assert table['residual_times_n32'].abs().max() <= 10.0
        assert (table['constant_term'].abs() <= 1e-12).all()
        for n in N_GRID:
            assert lattice_geometry(market, 60.0, 100.0, n).eps_n == 1

    def test_barrier_above_strike_first_row(self, above):
        market, spec = above
        row = residual_order_report(market, spec, [100], 'exact').table.iloc[0]
        assert row['observed'] == pytest.approx(ABOVE_CRR[0] - ABOVE_TRUE, abs=5e-5)
        assert abs(row['residual']) <= 5e-3

    @pytest.mark.parametrize("n_list", [[], [200, 100], [100, 100]])
    def test_invalid_n_list(self, below, n_list):
        market, spec = below
        with pytest.raises(ValidationError):
            residual_order_report(market, spec, n_list)

    def test_unsupported_contracts(self, market):
        with pytest.raises(ValidationError):
            residual_order_report(market, down_call(100.0, 60.0, style='american'), [100])
        with pytest.raises(UnsupportedConfigurationError):
            residual_order_report(market, DigitalOptionSpec('put', 100.0, 60.0), [100])
        with pytest.raises(WrongRegimeError):
            residual_order_report(market, down_call(100.0, 100.0), [100])
