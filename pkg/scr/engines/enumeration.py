"""
Oráculo por enumeração exaustiva dos 2^n caminhos da árvore CRR
"""
import math
from typing import Optional

import numpy as np

from scr.config import Config
from scr.engines.base import BaseEngine
from scr.engines.crr import build_tree_params
from scr.exceptions import EnumerationLimitError, UnsupportedConfigurationError
from scr.models import DigitalOptionSpec, MarketParams, PriceResult


def enumerate_paths_price(market: MarketParams, spec: DigitalOptionSpec, n: int,
                          probability: Optional[str] = None) -> PriceResult:
    """Esperança descontada exata sobre todos os caminhos, com a barreira
    aplicada caminho a caminho e o payoff digital no vencimento"""
    if n > Config.ENUMERATION_MAX_STEPS:
        raise EnumerationLimitError(
            f"n too large for enumeration: {n} > {Config.ENUMERATION_MAX_STEPS}"
        )
    if spec.is_american:
        raise UnsupportedConfigurationError("enumeration prices European style only", 'unsupported_configuration')

    tree = build_tree_params(market, n, probability)
    log_s0 = math.log(market.s0)
    shifts = np.arange(n, dtype=np.int64)
    total_paths = 1 << n

    partial_sums = []
    for start in range(0, total_paths, Config.ENUMERATION_CHUNK):
        idx = np.arange(start, min(start + Config.ENUMERATION_CHUNK, total_paths), dtype=np.int64)
        ups = (idx[:, None] >> shifts) & 1
        # posição 2j - i ao longo do caminho, começando em 0
        positions = np.zeros((idx.size, n + 1), dtype=np.int64)
        positions[:, 1:] = np.cumsum(2 * ups - 1, axis=1)
        log_path = log_s0 + positions * tree.h

        touched = spec.barrier_breached(log_path).any(axis=1)
        active = touched if spec.is_knock_in else ~touched
        pays = spec.pays(log_path[:, -1]) & active

        n_up = ups.sum(axis=1)[pays]
        weights = tree.p ** n_up * (1.0 - tree.p) ** (n - n_up)
        partial_sums.append(math.fsum(weights.tolist()))

    price = tree.discount ** n * math.fsum(partial_sums)
    return PriceResult(price=price, method='enumeration', n_steps=n, diagnostics={'paths': total_paths})


class EnumerationEngine(BaseEngine):
    name = 'enumeration'

    def _price(self, market, spec, n):
        return enumerate_paths_price(market, spec, n, self.probability)
