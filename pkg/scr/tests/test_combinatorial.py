"""
Testes dos preços combinatórios e da equivalência com os oráculos
"""
import itertools

import pytest

from scr.engines.combinatorial import (
    CombinatorialEngine,
    price_combinatorial,
    price_di_combinatorial,
    price_di_reflection,
    price_do_combinatorial,
    price_vanilla_digital_combinatorial,
)
from scr.engines.crr import price_backward, price_vanilla_backward, reflection_path_count
from scr.engines.enumeration import enumerate_paths_price
from scr.exceptions import KnockedOutAtInceptionError, UnsupportedConfigurationError, WrongRegimeError
from scr.models import DigitalOptionSpec, MarketParams
from scr.tests.conftest import down_call

# (K, L) cobrindo L < K e L > K, com barreiras alcançáveis para n pequeno
LEVELS = [(100.0, 60.0), (60.0, 100.0), (140.0, 125.0), (110.0, 130.0)]


class TestReflectionPathCount:
    def test_small_example(self):
        assert reflection_path_count(4, 2, 1) == 1

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_against_brute_force(self, n):
        for m in range(-2, n):
            level = m - n
            counts = [0] * (n + 1)
            for steps in itertools.product((-1, 1), repeat=n):
                positions = list(itertools.accumulate(steps, initial=0))
                if min(positions) <= level:
                    counts[steps.count(1)] += 1
            for j in range(n + 1):
                assert reflection_path_count(n, j, m / 2.0) == counts[j], (n, m, j)

    def test_half_integer_level_has_no_reflection(self):
        assert reflection_path_count(10, 6, 2.25) == 0


class TestOracleEquivalence:
    @pytest.mark.parametrize("n", [4, 8, 12, 16, 20])
    @pytest.mark.parametrize("K, L", LEVELS)
    @pytest.mark.parametrize("knock", ['in', 'out'])
    def test_three_way(self, market, n, K, L, knock):
        spec = down_call(K, L, knock)
        combinatorial = price_combinatorial(market, spec, n).price
        backward = price_backward(market, spec, n).price
        enumerated = enumerate_paths_price(market, spec, n).price
        assert abs(combinatorial - backward) <= 1e-12
        assert abs(combinatorial - enumerated) <= 1e-12
        assert abs(backward - enumerated) <= 1e-12

    @pytest.mark.parametrize("K, L", LEVELS)
    def test_generic_reflection_is_knock_in(self, market, K, L):
        n = 12
        assert abs(price_di_reflection(market, K, L, n).price
                   - enumerate_paths_price(market, down_call(K, L, 'in'), n).price) <= 1e-12

    def test_vanilla(self, market):
        spec = DigitalOptionSpec('call', 100.0, 60.0)
        for n in (18, 400):
            combinatorial = price_vanilla_digital_combinatorial(market, 100.0, n).price
            assert abs(combinatorial - price_vanilla_backward(market, spec, n).price) <= 1e-11


class TestLargeN:
    @pytest.mark.parametrize("n", [100, 800, 3200])
    @pytest.mark.parametrize("K, L", [(100.0, 60.0), (60.0, 100.0)])
    @pytest.mark.parametrize("knock", ['in', 'out'])
    def test_matches_backward_induction(self, market, n, K, L, knock):
        spec = down_call(K, L, knock)
        assert abs(price_combinatorial(market, spec, n, 'linear').price
                   - price_backward(market, spec, n, 'linear').price) <= 1e-9

    def test_engine_carries_geometry(self, above):
        market, spec = above
        result = CombinatorialEngine().price(market, spec, 200)
        assert result.method == 'crr_combinatorial'
        assert result.diagnostics['eps_n'] == 1


class TestErrors:
    def test_regime_guards(self, market):
        with pytest.raises(WrongRegimeError):
            price_di_combinatorial(market, 60.0, 100.0, 10)
        with pytest.raises(WrongRegimeError):
            price_do_combinatorial(market, 100.0, 60.0, 10)

    def test_knocked_out(self):
        market = MarketParams(s0=50.0, r=0.1, sigma=0.25, T=1.0)
        with pytest.raises(KnockedOutAtInceptionError):
            price_do_combinatorial(market, 40.0, 60.0, 10)

    def test_american_and_puts_unsupported(self, market):
        with pytest.raises(UnsupportedConfigurationError):
            price_combinatorial(market, down_call(100.0, 60.0, style='american'), 10)
        with pytest.raises(UnsupportedConfigurationError):
            price_combinatorial(market, DigitalOptionSpec('put', 100.0, 60.0), 10)
