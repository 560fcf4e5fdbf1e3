"""
Expansão assintótica do erro da árvore CRR para calls digitais com barreira

O erro Err(n) = CRR(n) - Black-Scholes é previsto como
    e^{-rT} [ a(dK, dL) / sqrt(n) + b(dK, dL) / n ]
com a e b polinômios de grau <= 2 nas medidas de posição do strike e da
barreira. Os coeficientes recebem o eps_n da geometria de cada n; com a
barreira monitorada em todos os passos ele vale 1 e, para L > K, o termo
constante em 1/sqrt(n) se anula.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from scr.engines.analytic import barrier_power, d_coefficients, normal_cdf, normal_pdf, price_analytic
from scr.engines.crr import lattice_geometry, price_backward
from scr.exceptions import KnockedOutAtInceptionError, ValidationError, WrongRegimeError
from scr.models import DigitalOptionSpec, MarketParams, Regime, regime_of

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['n', 'observed', 'predicted', 'residual', 'residual_times_n32', 'constant_term']


@dataclass(frozen=True)
class ExpansionCoefficients:
    alpha: float
    alpha_hat: float
    beta: float
    beta_hat: float
    g: Tuple[float, float, float, float]
    g_hat: Tuple[float, float, float, float]
    I: float
    c1: float
    c2: float
    c3: float
    c_tilde: float
    A_t: Tuple[float, float]
    B_t: Tuple[float, float, float, float]
    C_t: Tuple[float, float]
    D_t: Tuple[float, float, float, float]
    E_t: Tuple[float, float]
    F_t: Tuple[float, float, float]
    G_t: Tuple[float, float, float]
    H_t: Tuple[float, float, float, float]
    eps_n: int
    discount: float


@dataclass(frozen=True)
class ResidualReport:
    table: pd.DataFrame
    flagged: bool


def compute_coefficients(market: MarketParams, K: float, L: float, eps_n: int) -> ExpansionCoefficients:
    if market.s0 <= L:
        raise KnockedOutAtInceptionError(f"knocked out at inception: s0={market.s0} <= L={L}")
    if K == L:
        raise WrongRegimeError(f"wrong regime: strike equals barrier ({K})")
    if eps_n not in (0, 1):
        raise ValidationError(f"eps_n must be 0 or 1, got {eps_n}", 'invalid_input')

    s0, r, sigma, T = market.s0, market.r, market.sigma, market.T
    sqrt_T = math.sqrt(T)
    d = d_coefficients(market, K, L)
    rho = barrier_power(market, L)
    eps = float(eps_n)

    alpha = (r - 0.5 * sigma ** 2) / (2.0 * sigma)
    alpha_hat = alpha + 0.5 * sigma
    beta = (sigma ** 4 - 4.0 * sigma ** 2 * r + 12.0 * r ** 2) / (48.0 * sigma)
    beta_hat = -beta - sigma * r / 6.0

    def g_of(x: float) -> float:
        return (2.0 * T * (alpha_hat ** 2 * x + beta_hat * sqrt_T)
                + (2.0 * alpha_hat * sqrt_T / 3.0 - x / 12.0) * (1.0 - x * x))

    g = tuple(g_of(x) for x in (d.d12, d.d22, d.d32, d.d42))
    g_hat = tuple(g_of(x) for x in (d.d11, d.d21, d.d31, d.d41))
    I = (4.0 * beta + 16.0 * alpha ** 3 / 3.0) / sigma * math.log(s0 / L) * T

    phi12, phi22, phi32, phi42 = (normal_pdf(x) for x in (d.d12, d.d22, d.d32, d.d42))
    Phi22, Phi42 = normal_cdf(d.d22), normal_cdf(d.d42)

    # barreira abaixo do strike
    A1 = rho * phi22
    A2 = -2.0 * A1 - 4.0 * alpha * sqrt_T * Phi22 * rho
    B1 = rho * (g[1] * phi22 - I * Phi22)
    B2 = rho * (-0.5 * d.d22) * phi22
    B3 = rho * phi22 * (2.0 * d.d22 - 4.0 * alpha * sqrt_T)
    B4 = rho * (phi22 * (-2.0 * d.d22 + 8.0 * alpha * sqrt_T) + 8.0 * alpha ** 2 * T * Phi22)

    # call vanilla
    c1 = phi12
    c2 = -0.5 * d.d12 * phi12
    c_tilde = ((d.d11 ** 3 + d.d11 * d.d12 ** 2 + 2.0 * d.d12 - 4.0 * d.d11) / 24.0
               + (2.0 - d.d11 * d.d12 - d.d11 ** 2) * sqrt_T * r / (6.0 * sigma)
               + T * d.d11 * r ** 2 / (2.0 * sigma ** 2))
    c3 = c_tilde * phi12

    # barreira acima do strike
    E1 = -eps * phi32 + rho * phi42
    E2 = phi32 + rho * (phi42 + 4.0 * alpha * sqrt_T * Phi42)
    F1 = (phi32 * (g[2] - 0.5 * d.d32 * eps ** 2)
          + rho * phi42 * (0.5 * d.d42 * eps ** 2 - g[3])
          + Phi42 * I * rho)
    F2 = phi32 * d.d32 * eps + rho * (phi42 * eps * d.d42 - 4.0 * eps * alpha * sqrt_T)
    F3 = (-0.5 * d.d32 * phi32
          + rho * phi42 * (0.5 * d.d42 - 4.0 * alpha * sqrt_T)
          - rho * Phi42 * 8.0 * alpha ** 2 * T)

    return ExpansionCoefficients(
        alpha=alpha, alpha_hat=alpha_hat, beta=beta, beta_hat=beta_hat,
        g=g, g_hat=g_hat, I=I,
        c1=c1, c2=c2, c3=c3, c_tilde=c_tilde,
        A_t=(A1, A2),
        B_t=(B1, B2, B3, B4),
        C_t=(c1 - A1, -A2),
        D_t=(c2 - B1, c3 - B2, -B3, -B4),
        E_t=(E1, E2),
        F_t=(F1, F2, F3),
        G_t=(-E1, c1, -E2),
        H_t=(c2 - F1, c3, -F2, -F3),
        eps_n=eps_n,
        discount=market.discount,
    )


def leading_terms(coeffs: ExpansionCoefficients, delta_K: float, delta_L: float,
                  regime: Regime) -> Tuple[float, float]:
    """Numeradores dos termos em 1/sqrt(n) e 1/n, sem o desconto"""
    dK, dL = delta_K, delta_L
    regime = Regime(regime)
    if regime == Regime.DI_LltK:
        A, B = coeffs.A_t, coeffs.B_t
        return A[0] * dK + A[1] * dL, B[0] + B[1] * dK ** 2 + B[2] * dK * dL + B[3] * dL ** 2
    if regime == Regime.DO_LltK:
        C, D = coeffs.C_t, coeffs.D_t
        return C[0] * dK + C[1] * dL, D[0] + D[1] * dK ** 2 + D[2] * dK * dL + D[3] * dL ** 2
    if regime == Regime.DO_LgtK:
        E, F = coeffs.E_t, coeffs.F_t
        return E[0] + E[1] * dL, F[0] + F[1] * dL + F[2] * dL ** 2
    G, H = coeffs.G_t, coeffs.H_t
    return G[0] + G[1] * dK + G[2] * dL, H[0] + H[1] * dK ** 2 + H[2] * dL + H[3] * dL ** 2


def predicted_error(coeffs: ExpansionCoefficients, n: int, delta_K: float, delta_L: float,
                    regime: Regime) -> float:
    first, second = leading_terms(coeffs, delta_K, delta_L, regime)
    return coeffs.discount * (first / math.sqrt(n) + second / n)


def constant_term(coeffs: ExpansionCoefficients, n: int, regime: Regime) -> float:
    """Parte do termo em 1/sqrt(n) que não se anula com a malha alinhada"""
    regime = Regime(regime)
    if regime == Regime.DO_LgtK:
        return coeffs.discount * coeffs.E_t[0] / math.sqrt(n)
    if regime == Regime.DI_LgtK:
        return coeffs.discount * coeffs.G_t[0] / math.sqrt(n)
    return 0.0


def observed_error(market: MarketParams, spec: DigitalOptionSpec, n: int,
                   probability: Optional[str] = None) -> float:
    reference = price_analytic(market, spec).price
    return price_backward(market, spec, n, probability).price - reference


def residual_flag(scaled: Sequence[float]) -> bool:
    """Sinaliza crescimento monotônico de |residual n^{3/2}| acima de 2x a mediana"""
    values = np.abs(np.asarray(scaled, dtype=float))
    if values.size < 2:
        return False
    monotone = bool(np.all(np.diff(values) >= 0))
    return monotone and bool(values[-1] > 2.0 * float(np.median(values)))


def residual_order_report(market: MarketParams, spec: DigitalOptionSpec, n_list: List[int],
                          probability: Optional[str] = None) -> ResidualReport:
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValidationError("n_list must not be empty", 'invalid_n_values')
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValidationError(f"n_list must be strictly ascending: {n_list}", 'invalid_n_values')
    if spec.is_american:
        raise ValidationError("the error expansion covers European digitals", 'unsupported_configuration')

    regime = regime_of(spec)
    K, L = spec.strike, spec.barrier
    reference = price_analytic(market, spec).price

    rows = []
    for n in n_list:
        geometry = lattice_geometry(market, K, L, n)
        coeffs = compute_coefficients(market, K, L, geometry.eps_n)
        observed = price_backward(market, spec, n, probability).price - reference
        predicted = predicted_error(coeffs, n, geometry.delta_K, geometry.delta_L, regime)
        residual = observed - predicted
        rows.append({
            'n': n,
            'observed': observed,
            'predicted': predicted,
            'residual': residual,
            'residual_times_n32': residual * n ** 1.5,
            'constant_term': constant_term(coeffs, n, regime),
        })
        logger.debug(f"📐 n={n}: observado={observed:.3e} previsto={predicted:.3e}")

    table = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    flagged = residual_flag(table['residual_times_n32'])
    if flagged:
        logger.warning("⚠️ resíduo * n^{3/2} cresce monotonicamente: ordem do resíduo suspeita")
    return ResidualReport(table=table, flagged=flagged)
