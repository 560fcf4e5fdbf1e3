"""
Preços fechados na árvore CRR pela contagem de caminhos (princípio da reflexão)

Os coeficientes binomiais são avaliados em log-escala (log-gamma) e os termos
somados com ``math.fsum``: para n na casa dos milhares os fatoriais estouram.
"""
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln

from scr.engines.base import BaseEngine
from scr.engines.crr import build_tree_params, lattice_geometry
from scr.exceptions import KnockedOutAtInceptionError, UnsupportedConfigurationError, WrongRegimeError
from scr.models import DigitalOptionSpec, MarketParams, PriceResult, Regime, regime_of


def _binomial_mass(n: int, p: float, powers: np.ndarray, choose: np.ndarray) -> float:
    """Soma compensada de C(n, choose) p^powers (1-p)^(n-powers)"""
    if powers.size == 0:
        return 0.0
    log_terms = (gammaln(n + 1) - gammaln(choose + 1) - gammaln(n - choose + 1)
                 + powers * math.log(p) + (n - powers) * math.log1p(-p))
    return math.fsum(np.exp(log_terms).tolist())


def _indices(first: int, last: int) -> np.ndarray:
    if last < first:
        return np.empty(0, dtype=np.int64)
    return np.arange(first, last + 1, dtype=np.int64)


def _result(price: float, n: int, geometry, p: float) -> PriceResult:
    diagnostics = {'p': p}
    if geometry is not None:
        diagnostics.update(geometry.as_dict())
    return PriceResult(price=price, method='crr_combinatorial', n_steps=n, diagnostics=diagnostics)


def _check_alive(market: MarketParams, L: float):
    if market.s0 <= L:
        raise KnockedOutAtInceptionError(f"knocked out at inception: s0={market.s0} <= L={L}")


def price_vanilla_digital_combinatorial(market: MarketParams, K: float, n: int,
                                        probability: Optional[str] = None) -> PriceResult:
    tree = build_tree_params(market, n, probability)
    geometry = lattice_geometry(market, K, K, n)
    j = _indices(max(geometry.j_K, 0), n)
    mass = _binomial_mass(n, tree.p, j, j)
    return _result(market.discount * mass, n, None, tree.p)


def price_di_combinatorial(market: MarketParams, K: float, L: float, n: int,
                           probability: Optional[str] = None) -> PriceResult:
    """Down-and-in com L < K: soma refletida a partir de j_K até 2 j_tilde"""
    _check_alive(market, L)
    if L >= K:
        raise WrongRegimeError(f"wrong regime: expected L < K, got L={L} K={K}")
    tree = build_tree_params(market, n, probability)
    geometry = lattice_geometry(market, K, L, n)
    two_jt = geometry.two_j_tilde_L
    i = _indices(max(geometry.j_K, 0), min(two_jt, n))
    mass = _binomial_mass(n, tree.p, i, two_jt - i)
    return _result(market.discount * mass, n, geometry, tree.p)


def price_do_combinatorial(market: MarketParams, K: float, L: float, n: int,
                           probability: Optional[str] = None) -> PriceResult:
    """Down-and-out com K < L: caminhos acima da barreira menos os refletidos"""
    _check_alive(market, L)
    if L <= K:
        raise WrongRegimeError(f"wrong regime: expected L > K, got L={L} K={K}")
    tree = build_tree_params(market, n, probability)
    geometry = lattice_geometry(market, K, L, n)
    two_jt = geometry.two_j_tilde_L
    first = max(math.floor(geometry.j_tilde_L) + 1, 0)
    above = _indices(first, n)
    reflected = _indices(first, min(two_jt, n))
    mass = _binomial_mass(n, tree.p, above, above) - _binomial_mass(n, tree.p, reflected, two_jt - reflected)
    return _result(market.discount * max(mass, 0.0), n, geometry, tree.p)


def price_di_reflection(market: MarketParams, K: float, L: float, n: int,
                        probability: Optional[str] = None) -> PriceResult:
    """Down-and-in em qualquer regime: soma de Z_d(n, j, j_tilde) nos nós pagantes"""
    _check_alive(market, L)
    tree = build_tree_params(market, n, probability)
    geometry = lattice_geometry(market, K, L, n)
    two_jt = geometry.two_j_tilde_L
    start = max(geometry.j_K, 0)

    # j <= j_tilde: todo caminho terminou abaixo da barreira
    direct = _indices(start, min(two_jt // 2, n))
    # j_tilde < j <= 2 j_tilde: caminhos refletidos
    reflected = _indices(max(start, two_jt // 2 + 1), min(two_jt, n))
    mass = (_binomial_mass(n, tree.p, direct, direct)
            + _binomial_mass(n, tree.p, reflected, two_jt - reflected))
    return _result(market.discount * mass, n, geometry, tree.p)


def price_combinatorial(market: MarketParams, spec: DigitalOptionSpec, n: int,
                        probability: Optional[str] = None) -> PriceResult:
    """Os quatro regimes europeus de call com barreira inferior"""
    if spec.is_american:
        raise UnsupportedConfigurationError(
            "combinatorial prices are European only", 'unsupported_configuration'
        )
    regime = regime_of(spec)
    K, L = spec.strike, spec.barrier
    if regime == Regime.DI_LltK:
        return price_di_combinatorial(market, K, L, n, probability)
    if regime == Regime.DO_LgtK:
        return price_do_combinatorial(market, K, L, n, probability)

    vanilla = price_vanilla_digital_combinatorial(market, K, n, probability).price
    # paridade na mesma árvore: DO_LltK = vanilla - DI, DI_LgtK = vanilla - DO
    if regime == Regime.DO_LltK:
        complement = price_di_combinatorial(market, K, L, n, probability)
    else:
        complement = price_do_combinatorial(market, K, L, n, probability)
    price = max(vanilla - complement.price, 0.0)
    return PriceResult(price=price, method='crr_combinatorial', n_steps=n, diagnostics=complement.diagnostics)


class CombinatorialEngine(BaseEngine):
    name = 'crr_combinatorial'

    def _price(self, market, spec, n):
        return price_combinatorial(market, spec, n, self.probability)
