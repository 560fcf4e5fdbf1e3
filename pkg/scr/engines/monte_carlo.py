"""
Oráculo Monte Carlo sob Black-Scholes com correção de ponte browniana

Os caminhos são gerados em blocos de tamanho fixo; cada bloco tem seu próprio
gerador Philox semeado por SeedSequence([seed, bloco]), e as somas dos blocos
são acumuladas na ordem dos blocos. Assim a estimativa não depende do número
de threads usado.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.special import ndtri

from scr.config import Config
from scr.engines.base import BaseEngine
from scr.exceptions import UnsupportedConfigurationError, ValidationError
from scr.models import DigitalOptionSpec, MarketParams, PriceResult

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class McConfig:
    paths: int = Config.MC_PATHS
    steps_per_year: int = Config.MC_STEPS_PER_YEAR
    seed: int = Config.MC_SEED
    use_bridge_correction: bool = Config.MC_BRIDGE
    block_size: int = Config.MC_BLOCK_SIZE
    workers: int = 1

    def __post_init__(self):
        if self.paths < 1:
            raise ValidationError(f"paths must be >= 1, got {self.paths}", 'invalid_mc_config')
        if self.steps_per_year < 1:
            raise ValidationError(f"steps_per_year must be >= 1, got {self.steps_per_year}", 'invalid_mc_config')
        if self.block_size < 1 or self.workers < 1:
            raise ValidationError("block_size and workers must be >= 1", 'invalid_mc_config')
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}", 'invalid_mc_config')


def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _simulate_block(market: MarketParams, spec: DigitalOptionSpec, cfg: McConfig,
                    n_steps: int, block: int, size: int) -> Tuple[float, float]:
    """Soma e soma dos quadrados dos payoffs descontados de um bloco"""
    rng = _block_generator(cfg.seed, block)
    dt = market.T / n_steps
    drift = (market.r - 0.5 * market.sigma ** 2) * dt
    vol = market.sigma * math.sqrt(dt)

    # normais por inversa da CDF
    z = ndtri(np.maximum(rng.random((size, n_steps)), _TINY))
    log_path = np.empty((size, n_steps + 1))
    log_path[:, 0] = math.log(market.s0)
    np.cumsum(drift + vol * z, axis=1, out=log_path[:, 1:])
    log_path[:, 1:] += log_path[:, :1]

    # peso de sobrevivência: monitoramento discreto vezes não-cruzamento da ponte
    survival = np.where(spec.barrier_breached(log_path).any(axis=1), 0.0, 1.0)
    if cfg.use_bridge_correction:
        distance = np.abs(log_path - math.log(spec.barrier))
        crossing = np.exp(-2.0 * distance[:, :-1] * distance[:, 1:] / (market.sigma ** 2 * dt))
        survival *= np.prod(1.0 - crossing, axis=1)

    weight = 1.0 - survival if spec.is_knock_in else survival
    values = market.discount * spec.pays(log_path[:, -1]) * weight
    return math.fsum(values.tolist()), math.fsum((values * values).tolist())


def mc_price(market: MarketParams, spec: DigitalOptionSpec, cfg: Optional[McConfig] = None) -> PriceResult:
    cfg = cfg or McConfig()
    if spec.is_american:
        raise UnsupportedConfigurationError("Monte Carlo prices European style only", 'unsupported_configuration')

    n_steps = max(1, math.ceil(cfg.steps_per_year * market.T))
    blocks = [(b, min(cfg.block_size, cfg.paths - b * cfg.block_size))
              for b in range(math.ceil(cfg.paths / cfg.block_size))]
    logger.debug(f"🎲 Monte Carlo: {cfg.paths} caminhos, {n_steps} passos, {len(blocks)} blocos, seed={cfg.seed}")

    def run(block):
        return _simulate_block(market, spec, cfg, n_steps, *block)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            sums = list(executor.map(run, blocks))
    else:
        sums = [run(block) for block in blocks]

    total = math.fsum(s for s, _ in sums)
    total_sq = math.fsum(s2 for _, s2 in sums)
    n = cfg.paths
    mean = total / n
    variance = max(total_sq - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    standard_error = math.sqrt(variance / n)

    return PriceResult(
        price=min(max(mean, 0.0), 1.0),
        method='monte_carlo',
        n_steps=n_steps,
        diagnostics={
            'standard_error': standard_error,
            'seed': cfg.seed,
            'paths': cfg.paths,
            'bridge': cfg.use_bridge_correction,
        },
    )


class MonteCarloEngine(BaseEngine):
    """Monte Carlo no registro; ``n`` vira o número de datas de monitoramento"""

    name = 'mc'
    requires_steps = False

    def __init__(self, probability: Optional[str] = None, config: Optional[McConfig] = None):
        super().__init__(probability)
        self.config = config or McConfig()

    def _price(self, market, spec, n):
        cfg = self.config
        if n is not None:
            cfg = replace(cfg, steps_per_year=max(1, math.ceil(n / market.T)))
        return mc_price(market, spec, cfg)
