"""
Testes da árvore CRR: valores de referência, geometria, paridade e exercício americano
"""
import math

import numpy as np
import pytest

from scr.engines import get_engine
from scr.engines.analytic import price_analytic
from scr.engines.crr import (
    CrrEngine,
    build_tree_params,
    lattice_geometry,
    node_price,
    one_step_probability,
    price_backward,
    price_vanilla_backward,
    reflection_path_count,
)
from scr.exceptions import DegenerateTreeError, ValidationError
from scr.models import DigitalOptionSpec, MarketParams, ProbabilityScheme, in_out_parity
from scr.tests.conftest import ABOVE_CRR, BELOW_CRR, N_GRID, down_call


class TestTreeParams:
    def test_exact_probability_is_risk_neutral(self, market):
        tree = build_tree_params(market, 100, 'exact')
        growth = tree.p * tree.u + (1.0 - tree.p) * tree.d
        assert growth == pytest.approx(math.exp(market.r * tree.dtau), rel=1e-14)

    def test_linear_probability(self, market):
        p = one_step_probability(0.1, 0.25, 0.01, ProbabilityScheme.LINEAR)
        assert p == pytest.approx(0.5 + 0.5 * (0.1 - 0.03125) * 0.1 / 0.25)

    def test_schemes_agree_to_first_order(self, market):
        exact = build_tree_params(market, 3200, 'exact').p
        linear = build_tree_params(market, 3200, 'linear').p
        assert abs(exact - linear) < 1e-5

    def test_degenerate_tree(self):
        market = MarketParams(s0=100.0, r=0.5, sigma=0.05, T=1.0)
        with pytest.raises(DegenerateTreeError, match="degenerate tree"):
            build_tree_params(market, 1)

    def test_invalid_step_count(self, market):
        with pytest.raises(ValidationError):
            build_tree_params(market, 0)

    def test_node_price(self, market):
        tree = build_tree_params(market, 4)
        assert node_price(tree, 150.0, 0, 0) == 150.0
        assert node_price(tree, 150.0, 2, 2) == pytest.approx(150.0 * tree.u ** 2)
        with pytest.raises(IndexError):
            node_price(tree, 150.0, 2, 3)


class TestLatticeGeometry:
    @pytest.mark.parametrize("n", N_GRID)
    @pytest.mark.parametrize("K, L", [(100.0, 60.0), (60.0, 100.0)])
    def test_effective_barrier(self, market, n, K, L):
        g = lattice_geometry(market, K, L, n)
        assert g.j_tilde_L == pytest.approx(g.j_L + (1 - g.eps_n) / 2.0)
        assert g.L_tilde <= L * (1.0 + 1e-12)
        # o próximo nível da árvore já fica acima da barreira
        assert g.L_tilde * math.exp(g.h) > L
        assert 0.0 <= g.delta_L < 1.0
        assert -1.0 < g.delta_K <= 1.0
        assert g.eps_n in (0, 1)

    @pytest.mark.parametrize("n", N_GRID + [101, 333])
    @pytest.mark.parametrize("K, L", [(100.0, 60.0), (60.0, 100.0)])
    def test_effective_barrier_is_a_tree_level(self, market, n, K, L):
        g = lattice_geometry(market, K, L, n)
        assert g.eps_n == 1
        assert g.j_L == math.floor(2.0 * g.l_L) / 2.0
        assert g.j_tilde_L == g.j_L
        assert g.delta_L == pytest.approx(2.0 * g.l_L - math.floor(2.0 * g.l_L), abs=1e-12)

    def test_strike_index_pays(self, market):
        n = 100
        g = lattice_geometry(market, 100.0, 60.0, n)
        tree = build_tree_params(market, n)
        assert node_price(tree, market.s0, n, g.j_K) >= 100.0
        assert node_price(tree, market.s0, n, g.j_K - 1) < 100.0

    def test_diagnostics_carry_geometry(self, below):
        market, spec = below
        result = price_backward(market, spec, 100)
        assert {'delta_K', 'delta_L', 'eps_n', 'p'} <= set(result.diagnostics)


class TestReferenceValues:
    @pytest.mark.parametrize("n, expected", list(zip(N_GRID, BELOW_CRR)))
    def test_barrier_below_strike(self, below, n, expected):
        market, spec = below
        assert abs(price_backward(market, spec, n, 'linear').price - expected) <= 1e-6

    @pytest.mark.parametrize("n, expected", list(zip(N_GRID, ABOVE_CRR)))
    def test_barrier_above_strike(self, above, n, expected):
        market, spec = above
        assert abs(price_backward(market, spec, n, 'linear').price - expected) <= 1e-6

    @pytest.mark.parametrize("n", [100, 400, 1600])
    def test_exact_scheme_close_to_reference(self, below, above, n):
        i = N_GRID.index(n)
        for (market, spec), expected in ((below, BELOW_CRR[i]), (above, ABOVE_CRR[i])):
            assert abs(price_backward(market, spec, n, 'exact').price - expected) <= 2e-5

    def test_engine(self, below):
        market, spec = below
        result = CrrEngine('linear').price(market, spec, 400)
        assert result.method == 'crr'
        assert result.n_steps == 400
        assert abs(result.price - 0.880340) <= 1e-6


class TestParity:
    @pytest.mark.parametrize("n", [100, 400, 1600, 3200])
    @pytest.mark.parametrize("K, L", [(100.0, 60.0), (60.0, 100.0)])
    def test_in_plus_out_is_vanilla(self, market, n, K, L):
        out = price_backward(market, down_call(K, L, 'out'), n)
        knock_in = price_backward(market, down_call(K, L, 'in'), n)
        vanilla = price_vanilla_backward(market, down_call(K, L), n)
        assert abs(in_out_parity(knock_in, out, vanilla)) <= 1e-12

    def test_up_barrier_put_parity(self, market):
        spec = DigitalOptionSpec('put', 140.0, 170.0, orientation='up')
        out = price_backward(market, spec, 500)
        knock_in = price_backward(market, DigitalOptionSpec('put', 140.0, 170.0, orientation='up', knock='in'), 500)
        vanilla = price_vanilla_backward(market, spec, 500)
        assert abs(in_out_parity(knock_in, out, vanilla)) <= 1e-12

    def test_vanilla_call_plus_put_is_discount(self, market):
        call = price_vanilla_backward(market, DigitalOptionSpec('call', 100.0, 60.0), 200).price
        put = price_vanilla_backward(market, DigitalOptionSpec('put', 100.0, 60.0), 200).price
        assert call + put == pytest.approx(market.discount, abs=1e-12)


class TestBounds:
    @pytest.mark.parametrize("knock", ['in', 'out'])
    @pytest.mark.parametrize("K, L", [(100.0, 60.0), (60.0, 100.0), (140.0, 125.0)])
    def test_european_within_discount(self, market, knock, K, L):
        price = price_backward(market, down_call(K, L, knock), 300).price
        assert 0.0 <= price <= market.discount + 1e-12

    def test_knocked_out_spot(self):
        market = MarketParams(s0=55.0, r=0.1, sigma=0.25, T=1.0)
        assert price_backward(market, down_call(100.0, 60.0), 100).price == 0.0

    def test_put_close_to_closed_form(self, market):
        spec = DigitalOptionSpec('put', 100.0, 60.0)
        crr = price_backward(market, spec, 1600).price
        assert abs(crr - price_analytic(market, spec).price) < 1e-2


class TestAmerican:
    @pytest.mark.parametrize("n", [100, 400])
    @pytest.mark.parametrize("knock", ['in', 'out'])
    def test_american_dominates_european(self, american_market, n, knock):
        european = price_backward(american_market, down_call(100.0, 70.0, knock), n).price
        american = price_backward(american_market, down_call(100.0, 70.0, knock, 'american'), n).price
        assert european <= american <= 1.0 + 1e-12

    def test_in_the_money_spot_is_worth_one(self, market):
        result = price_backward(market, down_call(100.0, 60.0, style='american'), 200)
        assert result.price == 1.0

    def test_knocked_out_american_is_worthless(self):
        market = MarketParams(s0=55.0, r=0.1, sigma=0.25, T=1.0)
        assert price_backward(market, down_call(50.0, 60.0, style='american'), 100).price == 0.0

    def test_convergence_band(self, american_market):
        spec = down_call(100.0, 70.0, style='american')
        coarse = price_backward(american_market, spec, 1600, 'exact').price
        fine = price_backward(american_market, spec, 3200, 'exact').price
        assert abs(fine - coarse) <= 1e-3
        assert fine == pytest.approx(0.6694, abs=2e-3)


class TestWorkedExamples:
    def test_recombination(self, market):
        tree = build_tree_params(market, 100)
        assert node_price(tree, market.s0, 2, 1) == market.s0
        assert node_price(tree, market.s0, 100, 100) == pytest.approx(market.s0 * tree.u ** 100, rel=1e-12)

    def test_reference_step(self, market):
        tree = build_tree_params(market, 100, 'exact')
        assert tree.u == pytest.approx(math.exp(0.025), rel=1e-15)
        expected = (math.exp(0.001) - math.exp(-0.025)) / (math.exp(0.025) - math.exp(-0.025))
        assert tree.p == pytest.approx(expected, rel=1e-12)
        assert tree.u * tree.d == pytest.approx(1.0, rel=1e-15)

    def test_zero_rate_tilts_down(self):
        tree = build_tree_params(MarketParams(s0=100.0, r=0.0, sigma=0.25, T=1.0), 50)
        assert 0.0 < tree.p < 0.5

    def test_single_step_is_valid(self, market):
        assert 0.0 < build_tree_params(market, 1).p < 1.0

    @pytest.mark.parametrize("n, expected", [(100, 1.0), (101, 0.0)])
    def test_strike_at_spot(self, market, n, expected):
        assert lattice_geometry(market, market.s0, 60.0, n).delta_K == pytest.approx(expected, abs=1e-12)

    def test_barrier_on_terminal_node(self, market):
        n = 100
        h = market.sigma * math.sqrt(market.T / n)
        L = market.s0 * math.exp(-4.0 * h)
        g = lattice_geometry(market, 100.0, L, n)
        assert g.eps_n == 1
        assert g.delta_L == pytest.approx(0.0, abs=1e-9)
        assert g.L_tilde == pytest.approx(L, rel=1e-12)

    @pytest.mark.parametrize("j, expected", [(1, 4), (2, 1), (3, 0)])
    def test_reflection_counts(self, j, expected):
        assert reflection_path_count(4, j, 1) == expected


BARRIER_SWEEP = np.linspace(55.0, 65.0, 41)


class TestMonotoneInBarrier:
    @pytest.mark.parametrize("method", ['crr', 'crr_combinatorial'])
    def test_knock_out_nonincreasing(self, market, method):
        engine = get_engine(method, 'exact')
        prices = np.array([engine.price(market, down_call(100.0, L), 200).price for L in BARRIER_SWEEP])
        assert np.all(np.diff(prices) <= 1e-12)
        assert prices[-1] < prices[0]

    def test_knock_in_nondecreasing(self, market):
        prices = np.array([price_backward(market, down_call(100.0, L, knock='in'), 200).price for L in BARRIER_SWEEP])
        assert np.all(np.diff(prices) >= -1e-12)
