"""
Malha binomial interpolada ajustada

O passo de tempo é calibrado para que a barreira caia exatamente num nó do
vencimento e o strike exatamente no meio de dois nós terminais. A malha é
ancorada no vencimento (tau_j = T - j dt); o preço em t = 0 sai de uma
interpolação linear no tempo entre os níveis n'-2 e n', seguida de Lagrange
de quatro pontos em log-preço.

Coordenada espacial: q inteiro, log-preço = log(B) + direction * q * h, com
direction = +1 para barreira de baixa e -1 para barreira de alta, de modo que
q <= 0 é sempre a região tocada. O nível j contém os nós com q da paridade de j.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from scr.config import Config
from scr.engines.base import BaseEngine
from scr.engines.crr import frac, one_step_probability
from scr.exceptions import (
    DegenerateTreeError,
    InterpolationError,
    SpotOutsideMeshError,
    ValidationError,
    WrongRegimeError,
)
from scr.models import DigitalOptionSpec, MarketParams, PriceResult, ProbabilityScheme, Regime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BilMesh:
    k: float
    dt: float
    n_prime: int
    space_step: float
    anchor: float
    direction: int
    q_low: int
    q_high: int
    p_toward: float
    discount: float
    T: float

    @property
    def grid_levels(self) -> np.ndarray:
        """Escada de log-preços de todos os q da malha"""
        return self.log_price(np.arange(self.q_low, self.q_high + 1))

    @property
    def time_levels(self) -> np.ndarray:
        return self.T - np.arange(self.n_prime + 1) * self.dt

    def log_price(self, q):
        return self.anchor + self.direction * q * self.space_step

    def nodes(self, level: int) -> np.ndarray:
        """Valores de q presentes no nível de tempo ``level``"""
        start = self.q_low + (level % 2)
        stop = self.q_high - (level % 2)
        return np.arange(start, stop + 1, 2)


def _even_ceil(x: float) -> int:
    c = math.ceil(x)
    return c + (c % 2)


def calibrate_mesh(market: MarketParams, spec: DigitalOptionSpec, n: int,
                   probability: Optional[str] = None, width: Optional[float] = None) -> BilMesh:
    """Calibra dt para alinhar barreira e strike à malha a partir de dtau = T/n"""
    if n < 4:
        raise ValidationError(f"target step count must be >= 4, got {n}", 'invalid_steps')
    if spec.strike == spec.barrier:
        raise WrongRegimeError(f"wrong regime: strike equals barrier ({spec.strike})")
    scheme = ProbabilityScheme(probability or Config.PROBABILITY_SCHEME)
    width = Config.BIL_SPACE_WIDTH if width is None else width
    sigma = market.sigma

    k_tilde, l = math.log(spec.strike), math.log(spec.barrier)
    distance = abs(k_tilde - l)
    dtau = market.T / n
    k = math.ceil(distance / (2.0 * sigma * math.sqrt(dtau))) + 0.5
    dt = (distance / (2.0 * sigma * k)) ** 2
    n_prime = math.floor(market.T / dt) + 2
    h = sigma * math.sqrt(dt)

    p_up = one_step_probability(market.r, sigma, dt, scheme)
    if not 0.0 < p_up < 1.0:
        raise DegenerateTreeError(f"degenerate tree: p={p_up:.6g} outside (0, 1) on the calibrated mesh")

    direction = 1 if spec.is_down else -1
    spread = width * sigma * math.sqrt(market.T) / h
    far = max(direction * (math.log(market.s0) - l), direction * (k_tilde - l)) / h
    q_high = _even_ceil(far + spread)
    q_low = 0 if not spec.is_knock_in else -_even_ceil(spread)

    return BilMesh(
        k=k, dt=dt, n_prime=n_prime, space_step=h, anchor=l, direction=direction,
        q_low=q_low, q_high=q_high,
        p_toward=p_up if spec.is_down else 1.0 - p_up,
        discount=math.exp(-market.r * dt), T=market.T,
    )


def mesh_alignment(mesh: BilMesh, spec: DigitalOptionSpec) -> Tuple[float, float]:
    """(delta_K, delta_L) medidos na escada terminal da malha"""
    h = mesh.space_step
    delta_K = 1.0 - 2.0 * frac((mesh.anchor - math.log(spec.strike)) / (2.0 * h))
    delta_L = frac((math.log(spec.barrier) - mesh.anchor) / h)
    return delta_K, delta_L


def lagrange4(xs, ys, x: float) -> float:
    """Valor em x da cúbica que passa pelos quatro pontos"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != (4,) or ys.shape != (4,):
        raise InterpolationError("lagrange4 needs exactly four points")
    if not np.all(np.diff(xs) > 0):
        raise InterpolationError(f"non-ascending abscissae: {xs.tolist()}")
    slack = 1e-12 * max(1.0, abs(xs[0]), abs(xs[3]))
    if not xs[0] - slack <= x <= xs[3] + slack:
        raise InterpolationError(f"x={x} outside [{xs[0]}, {xs[3]}]")
    return float(BarycentricInterpolator(xs, ys)(x))


def _rollback(mesh: BilMesh, spec: DigitalOptionSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Indução retroativa até o nível n'; devolve os níveis n'-2 e n'"""
    pt, disc = mesh.p_toward, mesh.discount

    q = mesh.nodes(0)
    x = mesh.log_price(q)
    breached = q <= 0
    payoff = spec.pays(x).astype(float)
    if spec.is_knock_in:
        vanilla = payoff
        values = np.where(breached, vanilla, 0.0)
    else:
        values = np.where(breached, 0.0, payoff)

    def step(child: np.ndarray, parent_even: bool) -> np.ndarray:
        if not parent_even:
            return disc * (pt * child[1:] + (1.0 - pt) * child[:-1])
        parent = np.empty(child.size + 1)
        parent[1:-1] = disc * (pt * child[1:] + (1.0 - pt) * child[:-1])
        # bordas: filho ausente extrapolado constante
        parent[0] = disc * child[0]
        parent[-1] = disc * child[-1]
        return parent

    saved = {}
    for level in range(1, mesh.n_prime + 1):
        parent_even = level % 2 == 0
        q = mesh.nodes(level)
        breached = q <= 0
        exercise = spec.pays(mesh.log_price(q)).astype(float) if spec.is_american else None
        continuation = step(values, parent_even)
        if spec.is_knock_in:
            vanilla = step(vanilla, parent_even)
            if exercise is not None:
                vanilla = np.maximum(vanilla, exercise)
            values = np.where(breached, vanilla, continuation)
        else:
            if exercise is not None:
                continuation = np.maximum(continuation, exercise)
            values = np.where(breached, 0.0, continuation)
        if level >= mesh.n_prime - 2:
            saved[level] = values

    return saved[mesh.n_prime - 2], saved[mesh.n_prime]


def interpolate_time_space(mesh: BilMesh, values_a: np.ndarray, values_b: np.ndarray, log_spot: float) -> float:
    """Interpolação linear no tempo até t = 0 e Lagrange-4 no espaço em log_spot

    ``values_a`` e ``values_b`` são os valores dos nós dos níveis n'-2 e n'.
    """
    q_nodes = mesh.nodes(mesh.n_prime)
    q_spot = mesh.direction * (log_spot - mesh.anchor) / mesh.space_step
    i = math.floor((q_spot - q_nodes[0]) / 2.0 + 1e-12)
    if i - 1 < 0 or i + 2 > q_nodes.size - 1:
        raise SpotOutsideMeshError(
            f"spot outside mesh: fewer than two nodes on one side of log s0={log_spot:.6f}"
        )
    picked = slice(i - 1, i + 3)

    tau_a, tau_b = mesh.time_levels[mesh.n_prime - 2], mesh.time_levels[mesh.n_prime]
    weight_a = -tau_b / (tau_a - tau_b)
    at_origin = weight_a * values_a[picked] + (1.0 - weight_a) * values_b[picked]

    xs = mesh.log_price(q_nodes[picked])
    if mesh.direction < 0:
        xs, at_origin = xs[::-1], at_origin[::-1]
    return lagrange4(xs, at_origin, log_spot)


def price_adjusted_bil(market: MarketParams, spec: DigitalOptionSpec, n: int,
                       probability: Optional[str] = None, subtract_constant: bool = False) -> PriceResult:
    if not spec.is_alive_at(market.s0):
        raise SpotOutsideMeshError(
            f"spot outside mesh: s0={market.s0} is not inside the region delimited by the barrier {spec.barrier}"
        )
    mesh = calibrate_mesh(market, spec, n, probability)
    values_a, values_b = _rollback(mesh, spec)
    price = interpolate_time_space(mesh, values_a, values_b, math.log(market.s0))

    diagnostics: Dict = {'style': spec.style.value, 'k': mesh.k, 'dt': mesh.dt, 'n_prime': mesh.n_prime}
    if subtract_constant and spec.is_down and spec.is_call and not spec.is_american and spec.barrier > spec.strike:
        from scr.expansion import compute_coefficients, constant_term

        regime = Regime.DI_LgtK if spec.is_knock_in else Regime.DO_LgtK
        # a barreira é nó terminal da malha
        coeffs = compute_coefficients(market, spec.strike, spec.barrier, eps_n=1)
        constant = constant_term(coeffs, mesh.n_prime, regime)
        price -= constant
        diagnostics['constant_term'] = constant

    cap = 1.0 if spec.is_american else market.discount
    delta_K, delta_L = mesh_alignment(mesh, spec)
    diagnostics.update({'delta_K': delta_K, 'delta_L': delta_L, 'eps_n': 1})
    logger.debug(f"🧮 malha ajustada n={n}: k={mesh.k} n'={mesh.n_prime} q=[{mesh.q_low}, {mesh.q_high}]")
    return PriceResult(price=min(max(price, 0.0), cap), method='bil', n_steps=n, diagnostics=diagnostics)


class AdjustedBilEngine(BaseEngine):
    name = 'bil'

    def __init__(self, probability: Optional[str] = None, subtract_constant: bool = False):
        super().__init__(probability)
        self.subtract_constant = subtract_constant

    def _price(self, market, spec, n):
        return price_adjusted_bil(market, spec, n, self.probability, self.subtract_constant)
