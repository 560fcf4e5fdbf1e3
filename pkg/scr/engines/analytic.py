"""
Fórmulas fechadas Black-Scholes para digitais com barreira inferior

Somente barreiras de baixa e estilo europeu; barreiras de alta ficam com os
motores de árvore, validados contra o Monte Carlo.
"""
import math
from dataclasses import dataclass

from scipy.special import ndtr

from scr.engines.base import BaseEngine
from scr.exceptions import KnockedOutAtInceptionError, UnsupportedConfigurationError, WrongRegimeError
from scr.models import DigitalOptionSpec, KnockType, MarketParams, PriceResult, validate

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class DCoefficients:
    d11: float
    d12: float
    d21: float
    d22: float
    d31: float
    d32: float
    d41: float
    d42: float


def normal_cdf(x: float) -> float:
    """Distribuição normal padrão acumulada (erfc, precisão de máquina)"""
    return float(ndtr(x))


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def d_coefficients(market: MarketParams, K: float, L: float) -> DCoefficients:
    s0, r, sigma, T = market.s0, market.r, market.sigma, market.T
    vol = sigma * math.sqrt(T)
    drift = (r + 0.5 * sigma * sigma) * T

    d11 = (math.log(s0 / K) + drift) / vol
    d21 = (math.log(L * L / (s0 * K)) + drift) / vol
    d31 = (math.log(s0 / L) + drift) / vol
    d41 = (math.log(L / s0) + drift) / vol
    return DCoefficients(
        d11=d11, d12=d11 - vol,
        d21=d21, d22=d21 - vol,
        d31=d31, d32=d31 - vol,
        d41=d41, d42=d41 - vol,
    )


def barrier_power(market: MarketParams, L: float) -> float:
    """(s0/L)^(1 - 2r/sigma^2)"""
    return (market.s0 / L) ** (1.0 - 2.0 * market.r / (market.sigma * market.sigma))


def _require_alive(market: MarketParams, L: float):
    if market.s0 <= L:
        raise KnockedOutAtInceptionError(f"knocked out at inception: s0={market.s0} <= L={L}")


def _result(price: float, **diagnostics) -> PriceResult:
    return PriceResult(price=price, method='analytic', diagnostics=diagnostics)


def price_vanilla_digital_call(market: MarketParams, K: float) -> PriceResult:
    d = d_coefficients(market, K, K)
    return _result(market.discount * normal_cdf(d.d12), d12=d.d12)


def price_vanilla_digital_put(market: MarketParams, K: float) -> PriceResult:
    d = d_coefficients(market, K, K)
    return _result(market.discount * normal_cdf(-d.d12), d12=d.d12)


def price_do_bond(market: MarketParams, L: float) -> PriceResult:
    """Paga 1 no vencimento se a barreira inferior nunca foi tocada"""
    _require_alive(market, L)
    d = d_coefficients(market, L, L)
    rho = barrier_power(market, L)
    return _result(market.discount * (normal_cdf(d.d32) - rho * normal_cdf(d.d42)), rho=rho)


def price_do_digital_call_L_below_K(market: MarketParams, K: float, L: float) -> PriceResult:
    _require_alive(market, L)
    if L >= K:
        raise WrongRegimeError(f"wrong regime: expected L < K, got L={L} K={K}")
    d = d_coefficients(market, K, L)
    rho = barrier_power(market, L)
    price = market.discount * (normal_cdf(d.d12) - normal_cdf(d.d22) * rho)
    return _result(price, rho=rho, d12=d.d12, d22=d.d22)


def price_do_digital_call_L_above_K(market: MarketParams, K: float, L: float) -> PriceResult:
    _require_alive(market, L)
    if L <= K:
        raise WrongRegimeError(f"wrong regime: expected L > K, got L={L} K={K}")
    d = d_coefficients(market, K, L)
    rho = barrier_power(market, L)
    price = market.discount * (normal_cdf(d.d32) - rho * normal_cdf(d.d42))
    return _result(price, rho=rho, d32=d.d32, d42=d.d42)


def price_do_digital_call(market: MarketParams, K: float, L: float) -> PriceResult:
    if L == K:
        # vivo no vencimento implica S_T > L = K
        return price_do_bond(market, L)
    if L < K:
        return price_do_digital_call_L_below_K(market, K, L)
    return price_do_digital_call_L_above_K(market, K, L)


def price_di_digital_call(market: MarketParams, K: float, L: float) -> PriceResult:
    vanilla = price_vanilla_digital_call(market, K).price
    out = price_do_digital_call(market, K, L).price
    return _result(max(vanilla - out, 0.0))


def price_digital_put_single_barrier(market: MarketParams, spec: DigitalOptionSpec) -> PriceResult:
    """Put digital com barreira inferior por decomposição: DO-put = bond - DO-call"""
    if not spec.is_down or spec.is_american:
        raise UnsupportedConfigurationError(
            "closed forms cover European down-barrier digitals only", 'unsupported_configuration'
        )
    K, L = spec.strike, spec.barrier
    bond = price_do_bond(market, L).price
    if L < K:
        do_put = bond - price_do_digital_call_L_below_K(market, K, L).price
    else:
        # vivo no vencimento implica S_T > L >= K: a put nunca paga
        do_put = 0.0
    do_put = max(do_put, 0.0)
    if spec.knock == KnockType.OUT:
        return _result(do_put, bond=bond)
    vanilla_put = price_vanilla_digital_put(market, K).price
    return _result(max(vanilla_put - do_put, 0.0), bond=bond)


def price_analytic(market: MarketParams, spec: DigitalOptionSpec) -> PriceResult:
    """Despacha o contrato para a fórmula fechada correspondente"""
    validate(market, spec, require_alive=True)
    if not spec.is_down or spec.is_american:
        raise UnsupportedConfigurationError(
            "closed forms cover European down-barrier digitals only", 'unsupported_configuration'
        )
    if not spec.is_call:
        return price_digital_put_single_barrier(market, spec)
    if spec.knock == KnockType.OUT:
        return price_do_digital_call(market, spec.strike, spec.barrier)
    return price_di_digital_call(market, spec.strike, spec.barrier)


class AnalyticEngine(BaseEngine):
    name = 'analytic'
    requires_steps = False

    def _price(self, market, spec, n):
        return price_analytic(market, spec)
