"""
Configurações centralizadas do motor de precificação de digitais com barreira
"""
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


class Config:
    # Diretórios base
    BASE_DIR = Path(__file__).parent.parent
    DATA_DIR = BASE_DIR / 'data'
    LOGS_DIR = BASE_DIR / 'logs'

    # Database de resultados
    DATABASE_PATH = os.getenv('DATABASE_PATH', str(DATA_DIR / 'convergence_runs.db'))
    TIMEZONE = os.getenv('TIMEZONE', 'America/Sao_Paulo')

    # Árvore binomial
    PROBABILITY_SCHEME = os.getenv('PROBABILITY_SCHEME', 'exact')  # exact | linear
    BARRIER_REL_TOL = float(os.getenv('BARRIER_REL_TOL', '1e-12'))

    # Malha interpolada ajustada
    BIL_SPACE_WIDTH = float(os.getenv('BIL_SPACE_WIDTH', '6.0'))  # desvios-padrão acima de s0

    # Oráculos
    ENUMERATION_MAX_STEPS = int(os.getenv('ENUMERATION_MAX_STEPS', '22'))
    ENUMERATION_CHUNK = int(os.getenv('ENUMERATION_CHUNK', '65536'))
    MC_PATHS = int(os.getenv('MC_PATHS', '10000000'))
    MC_STEPS_PER_YEAR = int(os.getenv('MC_STEPS_PER_YEAR', '365'))
    MC_SEED = int(os.getenv('MC_SEED', '20240101'))
    MC_BLOCK_SIZE = int(os.getenv('MC_BLOCK_SIZE', '8192'))
    MC_BRIDGE = os.getenv('MC_BRIDGE', 'True').lower() == 'true'

    # Varreduras de convergência
    SWEEP_WORKERS = int(os.getenv('SWEEP_WORKERS', '1'))
    DEFAULT_N_VALUES = [int(n) for n in os.getenv('DEFAULT_N_VALUES', '100,200,400,800,1600,3200').split(',')]
    PRICE_DECIMALS = int(os.getenv('PRICE_DECIMALS', '6'))

    # Monitoring
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_MAX_SIZE = int(os.getenv('LOG_MAX_SIZE', '10485760'))  # 10MB
    LOG_BACKUP_COUNT = int(os.getenv('LOG_BACKUP_COUNT', '5'))


# Conjuntos de parâmetros de referência (call digital down-and-out europeia)
PRESETS_CONFIG = {
    'barrier-below-strike': {
        'name': 'Barreira abaixo do strike (L < K)',
        'market': {'s0': 150.0, 'r': 0.1, 'sigma': 0.25, 'T': 1.0},
        'option': {'side': 'call', 'strike': 100.0, 'barrier': 60.0,
                   'orientation': 'down', 'knock': 'out', 'style': 'european'},
    },
    'barrier-above-strike': {
        'name': 'Barreira acima do strike (L > K)',
        'market': {'s0': 150.0, 'r': 0.1, 'sigma': 0.25, 'T': 1.0},
        'option': {'side': 'call', 'strike': 60.0, 'barrier': 100.0,
                   'orientation': 'down', 'knock': 'out', 'style': 'european'},
    },
}
