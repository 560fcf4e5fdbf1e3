"""
Motor de precificação de opções digitais com uma barreira
"""
__version__ = '1.0.0'
