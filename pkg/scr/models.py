"""
Tipos de domínio, validação, payoff e paridade in/out

Todos os tipos são imutáveis. As comparações com strike e barreira são feitas
em escala logarítmica com tolerância relativa ``Config.BARRIER_REL_TOL``, de
forma que um nó alinhado exatamente na barreira conte como tocado.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from scr.config import Config
from scr.exceptions import (
    KnockedOutAtInceptionError,
    PricingError,
    UnsupportedConfigurationError,
    ValidationError,
    WrongRegimeError,
)


class OptionSide(str, Enum):
    CALL = 'call'
    PUT = 'put'


class BarrierOrientation(str, Enum):
    DOWN = 'down'
    UP = 'up'


class KnockType(str, Enum):
    IN = 'in'
    OUT = 'out'


class ExerciseStyle(str, Enum):
    EUROPEAN = 'european'
    AMERICAN = 'american'


class ProbabilityScheme(str, Enum):
    """Probabilidade de subida de um passo"""

    EXACT = 'exact'    # (e^{r dt} - d) / (u - d)
    LINEAR = 'linear'  # 1/2 + (r - sigma^2/2) sqrt(dt) / (2 sigma)


class Regime(str, Enum):
    """Regimes de call digital europeia com barreira inferior"""

    DI_LltK = 'DI_LltK'
    DO_LltK = 'DO_LltK'
    DO_LgtK = 'DO_LgtK'
    DI_LgtK = 'DI_LgtK'


METHODS = ('analytic', 'crr', 'crr_combinatorial', 'bil', 'enumeration', 'monte_carlo')

# folga numérica aceita nos limites [0, 1] de um preço
PRICE_SLACK = 1e-9


@dataclass(frozen=True)
class MarketParams:
    """Mercado Black-Scholes: spot, taxa, volatilidade e maturidade"""

    s0: float
    r: float
    sigma: float
    T: float

    def __post_init__(self):
        for name in ('s0', 'r', 'sigma', 'T'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"{name} must be a finite number, got {value!r}", 'invalid_input')
        if self.sigma <= 0:
            raise ValidationError(f"nonpositive volatility: sigma={self.sigma}", 'nonpositive_volatility')
        if self.s0 <= 0:
            raise ValidationError(f"nonpositive spot: s0={self.s0}", 'nonpositive_spot')
        if self.T <= 0:
            raise ValidationError(f"nonpositive maturity: T={self.T}", 'nonpositive_maturity')
        if self.r < 0:
            raise ValidationError(f"negative rate: r={self.r}", 'negative_rate')

    @property
    def discount(self) -> float:
        return math.exp(-self.r * self.T)


@dataclass(frozen=True)
class DigitalOptionSpec:
    """Contrato digital cash-or-nothing (valor 1) com uma barreira"""

    side: OptionSide
    strike: float
    barrier: float
    orientation: BarrierOrientation = BarrierOrientation.DOWN
    knock: KnockType = KnockType.OUT
    style: ExerciseStyle = ExerciseStyle.EUROPEAN

    def __post_init__(self):
        # aceita strings vindas da CLI ou do PRESETS_CONFIG
        try:
            object.__setattr__(self, 'side', OptionSide(self.side))
            object.__setattr__(self, 'orientation', BarrierOrientation(self.orientation))
            object.__setattr__(self, 'knock', KnockType(self.knock))
            object.__setattr__(self, 'style', ExerciseStyle(self.style))
        except ValueError as e:
            raise ValidationError(str(e), 'invalid_input') from e
        if not math.isfinite(self.strike) or self.strike <= 0:
            raise ValidationError(f"nonpositive strike: K={self.strike}", 'nonpositive_strike')
        if not math.isfinite(self.barrier) or self.barrier <= 0:
            raise ValidationError(f"nonpositive barrier: barrier={self.barrier}", 'nonpositive_barrier')

    @property
    def is_down(self) -> bool:
        return self.orientation == BarrierOrientation.DOWN

    @property
    def is_call(self) -> bool:
        return self.side == OptionSide.CALL

    @property
    def is_knock_in(self) -> bool:
        return self.knock == KnockType.IN

    @property
    def is_american(self) -> bool:
        return self.style == ExerciseStyle.AMERICAN

    def is_alive_at(self, s0: float) -> bool:
        if self.is_down:
            return s0 > self.barrier
        return s0 < self.barrier

    def barrier_breached(self, log_price):
        """Indicador de barreira tocada (inclusivo), escalar ou vetorizado"""
        log_b = math.log(self.barrier)
        tol = log_tolerance(self.barrier)
        if self.is_down:
            return log_price <= log_b + tol
        return log_price >= log_b - tol

    def pays(self, log_price):
        """Indicador do payoff digital: call paga se S >= K, put se S < K"""
        in_the_money = log_price >= math.log(self.strike) - log_tolerance(self.strike)
        if self.is_call:
            return in_the_money
        return np.logical_not(in_the_money)


@dataclass(frozen=True)
class PriceResult:
    price: float
    method: str
    n_steps: Optional[int] = None
    diagnostics: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}", 'invalid_method')
        if not (-PRICE_SLACK <= self.price <= 1.0 + PRICE_SLACK):
            raise PricingError(f"price out of bounds: {self.price}", 'price_out_of_bounds')


def log_tolerance(level: float) -> float:
    """Tolerância absoluta em log-preço para comparações com ``level``"""
    return Config.BARRIER_REL_TOL * max(1.0, abs(math.log(level)))


def validate(market: MarketParams, spec: DigitalOptionSpec,
             require_alive: bool = False) -> Tuple[MarketParams, DigitalOptionSpec]:
    """Valida o par (mercado, contrato) e o devolve inalterado

    ``require_alive`` é usado pelos caminhos que assumem a opção viva na data
    zero (fórmulas fechadas); nesse caso um spot já do lado da barreira gera
    ``KnockedOutAtInceptionError`` e não um erro genérico.
    """
    if not isinstance(market, MarketParams) or not isinstance(spec, DigitalOptionSpec):
        raise ValidationError("expected MarketParams and DigitalOptionSpec", 'invalid_input')
    if require_alive and not spec.is_alive_at(market.s0):
        raise KnockedOutAtInceptionError(
            f"knocked out at inception: s0={market.s0} barrier={spec.barrier} ({spec.orientation.value})"
        )
    return market, spec


def terminal_payoff(spec: DigitalOptionSpec, s_T: float) -> int:
    if s_T <= 0:
        raise ValidationError(f"nonpositive terminal price: {s_T}", 'invalid_input')
    return int(bool(spec.pays(math.log(s_T))))


def regime_of(spec: DigitalOptionSpec) -> Regime:
    """Regime de uma call digital europeia com barreira inferior"""
    if not spec.is_down or not spec.is_call:
        raise UnsupportedConfigurationError(
            "regimes are defined for down-barrier digital calls only", 'unsupported_configuration'
        )
    if spec.barrier == spec.strike:
        raise WrongRegimeError(f"wrong regime: barrier equals strike ({spec.strike})")
    below = spec.barrier < spec.strike
    if spec.is_knock_in:
        return Regime.DI_LltK if below else Regime.DI_LgtK
    return Regime.DO_LltK if below else Regime.DO_LgtK


def in_out_parity(price_in: Union[float, PriceResult],
                  price_out: Union[float, PriceResult],
                  price_vanilla: Union[float, PriceResult],
                  style: ExerciseStyle = ExerciseStyle.EUROPEAN) -> float:
    """Resíduo knock-in + knock-out - vanilla (esperado ~0 no estilo europeu)"""
    values = []
    for item in (price_in, price_out, price_vanilla):
        if isinstance(item, PriceResult):
            if item.diagnostics.get('style') == ExerciseStyle.AMERICAN.value:
                style = ExerciseStyle.AMERICAN
            values.append(item.price)
        else:
            values.append(float(item))
    if ExerciseStyle(style) == ExerciseStyle.AMERICAN:
        raise UnsupportedConfigurationError(
            "in/out parity does not hold with early exercise", 'american_parity'
        )
    return values[0] + values[1] - values[2]
