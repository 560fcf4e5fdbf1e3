"""
Classe base para motores de precificação com funcionalidades comuns
"""
import logging
import time
from typing import Optional, Tuple

from scr.config import Config
from scr.exceptions import ValidationError
from scr.models import DigitalOptionSpec, MarketParams, PriceResult, ProbabilityScheme, validate

logger = logging.getLogger(__name__)


class BaseEngine:
    """Classe base para todos os motores

    Subclasses implementam ``_price``; a base cuida da validação, da
    cronometragem e do log.
    """

    name = 'base'
    requires_steps = True

    def __init__(self, probability: Optional[str] = None):
        self.probability = ProbabilityScheme(probability or Config.PROBABILITY_SCHEME)

    def price(self, market: MarketParams, spec: DigitalOptionSpec, n: Optional[int] = None) -> PriceResult:
        result, _ = self.timed_price(market, spec, n)
        return result

    def timed_price(self, market: MarketParams, spec: DigitalOptionSpec,
                    n: Optional[int] = None) -> Tuple[PriceResult, float]:
        """Precifica e devolve também o tempo gasto em milissegundos"""
        validate(market, spec)
        if self.requires_steps and (n is None or int(n) < 1):
            raise ValidationError(f"method '{self.name}' needs a step count n >= 1, got {n!r}", 'invalid_steps')

        inicio = time.perf_counter()
        result = self._price(market, spec, None if n is None else int(n))
        runtime_ms = (time.perf_counter() - inicio) * 1000.0

        logger.debug(f"💰 {self.name} n={n}: {result.price:.10f} ({runtime_ms:.1f} ms)")
        return result, runtime_ms

    def _price(self, market: MarketParams, spec: DigitalOptionSpec, n: Optional[int]) -> PriceResult:
        raise NotImplementedError
