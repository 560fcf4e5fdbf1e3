"""
Exceções do motor de precificação

Toda exceção tem um ``code`` estável, usado pela CLI na linha de erro em JSON.
"""


class PricingError(Exception):
    """Erro base de precificação"""

    code = 'pricing_error'

    def __init__(self, message: str, code: str = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(PricingError):
    """Parâmetros de mercado ou do contrato inválidos"""

    code = 'invalid_input'


class KnockedOutAtInceptionError(PricingError):
    """O spot já está do lado errado da barreira na data zero"""

    code = 'knocked_out_at_inception'


class WrongRegimeError(PricingError):
    """Fórmula chamada fora do seu regime (L < K ou L > K)"""

    code = 'wrong_regime'


class DegenerateTreeError(PricingError):
    """Probabilidade de subida fora de (0, 1)"""

    code = 'degenerate_tree'


class SpotOutsideMeshError(PricingError):
    code = 'spot_outside_mesh'


class InterpolationError(PricingError):
    code = 'interpolation_error'


class UnsupportedConfigurationError(PricingError):
    """Combinação de contrato e método não suportada"""

    code = 'unsupported_configuration'


class EnumerationLimitError(PricingError):
    code = 'enumeration_limit'
