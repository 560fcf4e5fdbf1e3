"""
Fixtures compartilhadas: mercados, contratos e valores de referência
"""
import pytest

from scr.config import PRESETS_CONFIG
from scr.models import DigitalOptionSpec, MarketParams

N_GRID = [100, 200, 400, 800, 1600, 3200]

# valores publicados (6 casas) para os dois presets
BELOW_TRUE = 0.878667
ABOVE_TRUE = 0.845659
BELOW_CRR = [0.883147, 0.879006, 0.880340, 0.876786, 0.878863, 0.877873]
ABOVE_CRR = [0.855913, 0.846415, 0.849497, 0.846188, 0.846107, 0.846252]
BELOW_BIL = [0.878791, 0.878732, 0.878700, 0.878684, 0.878676, 0.878671]
ABOVE_BIL = [0.844983, 0.845304, 0.845484, 0.845571, 0.845615, 0.845637]


def preset(name):
    cfg = PRESETS_CONFIG[name]
    return MarketParams(**cfg['market']), DigitalOptionSpec(**cfg['option'])


@pytest.fixture
def below():
    """(mercado, contrato) com L=60 < K=100"""
    return preset('barrier-below-strike')


@pytest.fixture
def above():
    """(mercado, contrato) com L=100 > K=60"""
    return preset('barrier-above-strike')


@pytest.fixture
def market():
    return MarketParams(s0=150.0, r=0.1, sigma=0.25, T=1.0)


@pytest.fixture
def american_market():
    return MarketParams(s0=90.0, r=0.05, sigma=0.25, T=1.0)


def down_call(K, L, knock='out', style='european'):
    return DigitalOptionSpec(side='call', strike=K, barrier=L, orientation='down', knock=knock, style=style)
