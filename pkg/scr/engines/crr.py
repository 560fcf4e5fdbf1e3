"""
Árvore binomial CRR para digitais com uma barreira

Posições na árvore: o nó (i, j) tem log-preço log(s0) + (2j - i) h, com
h = sigma sqrt(dtau). A barreira é testada em log-escala, inclusiva, em todos
os passos inclusive o vencimento.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, Optional

import numpy as np

from scr.config import Config
from scr.engines.base import BaseEngine
from scr.exceptions import DegenerateTreeError, ValidationError
from scr.models import (
    DigitalOptionSpec,
    KnockType,
    MarketParams,
    PriceResult,
    ProbabilityScheme,
    log_tolerance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeParams:
    n: int
    dtau: float
    u: float
    d: float
    p: float
    discount: float
    scheme: ProbabilityScheme = ProbabilityScheme.EXACT

    @property
    def h(self) -> float:
        """Passo em log-preço"""
        return math.log(self.u)


@dataclass(frozen=True)
class LatticeGeometry:
    n: int
    h: float
    j_K: int
    delta_K: float
    l_L: float
    j_L: float
    j_tilde_L: float
    two_j_tilde_L: int
    eps_n: int
    delta_L: float
    L_tilde: float

    def as_dict(self) -> Dict:
        return {
            'delta_K': self.delta_K,
            'delta_L': self.delta_L,
            'eps_n': self.eps_n,
            'j_K': self.j_K,
            'j_tilde_L': self.j_tilde_L,
            'L_tilde': self.L_tilde,
        }


def frac(x: float) -> float:
    """Parte fracionária em [0, 1), também para x negativo"""
    return x - math.floor(x)


def one_step_probability(r: float, sigma: float, dt: float, scheme: ProbabilityScheme) -> float:
    h = sigma * math.sqrt(dt)
    if scheme == ProbabilityScheme.LINEAR:
        return 0.5 + 0.5 * (r - 0.5 * sigma * sigma) * math.sqrt(dt) / sigma
    # (e^{r dt} - d) / (u - d) escrito com expm1
    return (math.expm1(r * dt) - math.expm1(-h)) / (math.expm1(h) - math.expm1(-h))


def build_tree_params(market: MarketParams, n: int, probability: Optional[str] = None) -> TreeParams:
    if n < 1:
        raise ValidationError(f"step count must be >= 1, got {n}", 'invalid_steps')
    scheme = ProbabilityScheme(probability or Config.PROBABILITY_SCHEME)
    dtau = market.T / n
    h = market.sigma * math.sqrt(dtau)
    u = math.exp(h)
    p = one_step_probability(market.r, market.sigma, dtau, scheme)
    if not 0.0 < p < 1.0:
        raise DegenerateTreeError(f"degenerate tree: p={p:.6g} outside (0, 1) for n={n}")
    return TreeParams(n=n, dtau=dtau, u=u, d=1.0 / u, p=p,
                      discount=math.exp(-market.r * dtau), scheme=scheme)


def node_price(tree: TreeParams, s0: float, i: int, j: int) -> float:
    if not 0 <= j <= i <= tree.n:
        raise IndexError(f"node ({i}, {j}) outside a {tree.n}-step tree")
    return s0 * math.exp((2 * j - i) * tree.h)


def lattice_geometry(market: MarketParams, K: float, L: float, n: int) -> LatticeGeometry:
    """Posição do strike e da barreira em relação aos nós da árvore"""
    h = market.sigma * math.sqrt(market.T / n)

    # strike: primeiro nó terminal que paga a call
    y = (math.log(K / market.s0) - log_tolerance(K)) / h
    j_K = math.ceil((n + y) / 2.0)
    delta_K = 1.0 - 2.0 * frac(math.log(market.s0 / K) / (2.0 * h) - n / 2.0)

    # barreira: posição 2l_L em unidades de meio passo. Monitorada em todos os
    # passos, a barreira efetiva é o nível m da árvore, de qualquer paridade:
    # é sempre um preço da árvore (eps_n = 1) e j_tilde_L = j_L = m / 2
    l_L = math.log(L / market.s0) / (2.0 * h) + n / 2.0
    two_l = 2.0 * l_L
    m = math.floor(two_l + log_tolerance(L) / h)
    eps_n = 1
    j_L = m / 2.0
    return LatticeGeometry(
        n=n,
        h=h,
        j_K=j_K,
        delta_K=delta_K,
        l_L=l_L,
        j_L=j_L,
        j_tilde_L=j_L + (1 - eps_n) / 2.0,
        two_j_tilde_L=m,
        eps_n=eps_n,
        delta_L=max(two_l - m, 0.0),
        L_tilde=market.s0 * math.exp((m - n) * h),
    )


def reflection_path_count(n: int, j: int, j_tilde_L: float) -> int:
    """Caminhos que terminam em j e tocam o nível j_tilde_L (reflexão)"""
    two_jt = 2.0 * j_tilde_L
    if abs(two_jt - round(two_jt)) > 1e-9 or not 0 <= j <= n:
        return 0
    two_jt = int(round(two_jt))
    if 2 * j <= two_jt:
        return math.comb(n, j)
    if j <= two_jt:
        return math.comb(n, two_jt - j)
    return 0


def _log_levels(log_s0: float, i: int, h: float) -> np.ndarray:
    return log_s0 + (2 * np.arange(i + 1) - i) * h


def _roll_back(market: MarketParams, spec: DigitalOptionSpec, tree: TreeParams, monitor_barrier: bool = True) -> float:
    p, q, disc, h = tree.p, 1.0 - tree.p, tree.discount, tree.h
    log_s0 = math.log(market.s0)

    def touched(x: np.ndarray) -> np.ndarray:
        if monitor_barrier:
            return spec.barrier_breached(x)
        return np.zeros(x.shape, dtype=bool)

    x = _log_levels(log_s0, tree.n, h)
    payoff = spec.pays(x).astype(float)
    breached = touched(x)
    if spec.is_knock_in:
        vanilla = payoff
        values = np.where(breached, vanilla, 0.0)
    else:
        values = np.where(breached, 0.0, payoff)

    for i in range(tree.n - 1, -1, -1):
        x = _log_levels(log_s0, i, h)
        breached = touched(x)
        exercise = spec.pays(x).astype(float) if spec.is_american else None
        continuation = disc * (p * values[1:] + q * values[:-1])
        if spec.is_knock_in:
            vanilla = disc * (p * vanilla[1:] + q * vanilla[:-1])
            if exercise is not None:
                vanilla = np.maximum(vanilla, exercise)
            values = np.where(breached, vanilla, continuation)
        else:
            if exercise is not None:
                continuation = np.maximum(continuation, exercise)
            values = np.where(breached, 0.0, continuation)
    return float(values[0])


def price_backward(market: MarketParams, spec: DigitalOptionSpec, n: int,
                   probability: Optional[str] = None) -> PriceResult:
    """Indução retroativa na árvore CRR

    Knock-out zera os nós tocados em todo passo. Knock-in usa duas árvores: a
    vanilla (já ativada) e a pendente, cujos nós tocados copiam a vanilla.
    No estilo americano o exercício paga 1 se o nó está dentro do dinheiro.
    """
    tree = build_tree_params(market, n, probability)
    price = _roll_back(market, spec, tree)
    logger.debug(f"🌳 CRR n={n} p={tree.p:.8f} ({tree.scheme.value}): {price:.10f}")

    diagnostics = {'p': tree.p, 'dtau': tree.dtau, 'style': spec.style.value, 'scheme': tree.scheme.value}
    if spec.is_down:
        diagnostics.update(lattice_geometry(market, spec.strike, spec.barrier, n).as_dict())
    return PriceResult(price=price, method='crr', n_steps=n, diagnostics=diagnostics)


def price_vanilla_backward(market: MarketParams, spec: DigitalOptionSpec, n: int,
                           probability: Optional[str] = None) -> PriceResult:
    """Mesma árvore, sem monitorar a barreira"""
    tree = build_tree_params(market, n, probability)
    price = _roll_back(market, replace(spec, knock=KnockType.OUT), tree, monitor_barrier=False)
    return PriceResult(price=price, method='crr', n_steps=n,
                       diagnostics={'p': tree.p, 'style': spec.style.value, 'vanilla': True})


class CrrEngine(BaseEngine):
    name = 'crr'

    def _price(self, market, spec, n):
        return price_backward(market, spec, n, self.probability)
