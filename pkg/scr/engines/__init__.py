"""
Motores de precificação de digitais com barreira
"""
from typing import Optional

from .base import BaseEngine
from .analytic import AnalyticEngine
from .crr import CrrEngine
from .combinatorial import CombinatorialEngine
from .interpolated_lattice import AdjustedBilEngine
from .enumeration import EnumerationEngine
from .monte_carlo import McConfig, MonteCarloEngine

__all__ = [
    'BaseEngine',
    'AnalyticEngine',
    'CrrEngine',
    'CombinatorialEngine',
    'AdjustedBilEngine',
    'EnumerationEngine',
    'MonteCarloEngine',
]

# Mapeamento de motores disponíveis
AVAILABLE_ENGINES = {
    'analytic': AnalyticEngine,
    'crr': CrrEngine,
    'crr_combinatorial': CombinatorialEngine,
    'bil': AdjustedBilEngine,
    'enumeration': EnumerationEngine,
    'mc': MonteCarloEngine,
}


def get_engine(method: str, probability: Optional[str] = None, mc_config: Optional[McConfig] = None) -> BaseEngine:
    """Retorna instância do motor para o método especificado"""
    if method not in AVAILABLE_ENGINES:
        raise ValueError(f"Método '{method}' não disponível. Opções: {list(AVAILABLE_ENGINES.keys())}")

    if method == 'mc':
        return MonteCarloEngine(probability, config=mc_config)
    return AVAILABLE_ENGINES[method](probability)


def get_all_engines(probability: Optional[str] = None):
    """Retorna todas as instâncias de motores disponíveis"""

    return {name: get_engine(name, probability) for name in AVAILABLE_ENGINES}
