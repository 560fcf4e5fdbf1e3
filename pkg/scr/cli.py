"""
Interface de linha de comando: price, converge e expansion

Códigos de saída: 0 sucesso, 2 erro de argumento, 3 erro numérico/de regime.
Erros saem em uma linha JSON no stderr; resultados vão para o stdout.
"""
import argparse
import json
import logging
import sys
import traceback
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional, Tuple

from scr.config import PRESETS_CONFIG, Config
from scr.engines import AVAILABLE_ENGINES, McConfig, get_engine
from scr.engines.interpolated_lattice import AdjustedBilEngine
from scr.exceptions import PricingError, ValidationError
from scr.expansion import residual_order_report
from scr.models import DigitalOptionSpec, MarketParams, ProbabilityScheme
from scr.pipeline import OUTPUT_FORMATS, ConvergencePipeline, OutputError, SweepConfig
from scr.database import ResultsDatabase

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_NUMERICAL = 3

_CONTRACT_FLAGS = {
    's0': ('market', 's0'), 'rate': ('market', 'r'), 'vol': ('market', 'sigma'), 'maturity': ('market', 'T'),
    'side': ('option', 'side'), 'strike': ('option', 'strike'), 'barrier': ('option', 'barrier'),
    'orientation': ('option', 'orientation'), 'knock': ('option', 'knock'), 'style': ('option', 'style'),
}


def setup_logging(level: Optional[str] = None):
    """Configura logging: arquivo rotativo em logs/ e stderr"""
    if logging.getLogger().handlers:
        return
    Config.LOGS_DIR.mkdir(parents=True, exist_ok=True)
    file_handler = RotatingFileHandler(
        Config.LOGS_DIR / 'harness.log',
        maxBytes=Config.LOG_MAX_SIZE,
        backupCount=Config.LOG_BACKUP_COUNT,
        encoding='utf-8',
    )
    logging.basicConfig(
        level=getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[file_handler, logging.StreamHandler(sys.stderr)],
    )


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _method_list(text: str) -> List[str]:
    methods = [part.strip() for part in text.split(',') if part.strip()]
    if not methods:
        raise argparse.ArgumentTypeError("at least one method is required")
    unknown = [m for m in methods if m not in AVAILABLE_ENGINES]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown methods {unknown}; options: {list(AVAILABLE_ENGINES)}")
    return methods


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {text}")
    return value


def _add_contract_args(p: argparse.ArgumentParser):
    p.add_argument('--preset', choices=sorted(PRESETS_CONFIG), help='Conjunto de parâmetros de referência')
    p.add_argument('--side', choices=['call', 'put'])
    p.add_argument('--knock', choices=['in', 'out'])
    p.add_argument('--orientation', choices=['down', 'up'])
    p.add_argument('--style', choices=['european', 'american'])
    p.add_argument('--s0', type=float, help='Spot inicial')
    p.add_argument('--strike', type=float)
    p.add_argument('--barrier', type=float)
    p.add_argument('--rate', type=float, help='Taxa livre de risco anual')
    p.add_argument('--vol', type=float, help='Volatilidade anual')
    p.add_argument('--maturity', type=float, help='Maturidade em anos')
    p.add_argument('--probability', choices=[s.value for s in ProbabilityScheme], default=Config.PROBABILITY_SCHEME,
                   help='Probabilidade de subida da árvore')
    p.add_argument('--log-level', default=Config.LOG_LEVEL)


def _add_mc_args(p: argparse.ArgumentParser):
    p.add_argument('--seed', type=_u64, default=Config.MC_SEED)
    p.add_argument('--mc-paths', type=int, default=Config.MC_PATHS)
    p.add_argument('--mc-steps-per-year', type=int, default=Config.MC_STEPS_PER_YEAR)
    p.add_argument('--no-bridge', action='store_true', help='Desliga a correção de ponte browniana')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='run_harness', description='Digitais com barreira: CRR, malha ajustada e oráculos')
    sub = parser.add_subparsers(dest='command', required=True)

    price = sub.add_parser('price', help='Preço de um contrato por um método')
    _add_contract_args(price)
    _add_mc_args(price)
    price.add_argument('--method', choices=list(AVAILABLE_ENGINES), default='crr')
    price.add_argument('--steps', type=int, help='Número de passos n')
    price.add_argument('--subtract-constant', action='store_true',
                       help='Malha ajustada: subtrai o termo constante em 1/sqrt(n) quando L > K; '
                            'com a barreira num nó da malha esse termo é nulo e o preço não muda')

    converge = sub.add_parser('converge', help='Varredura de convergência em n')
    _add_contract_args(converge)
    _add_mc_args(converge)
    converge.add_argument('--methods', type=_method_list, required=True, help='Lista separada por vírgulas')
    converge.add_argument('--n-values', type=_int_list, default=Config.DEFAULT_N_VALUES)
    converge.add_argument('--out', type=Path)
    converge.add_argument('--format', choices=OUTPUT_FORMATS, default='csv')
    converge.add_argument('--workers', type=int, default=Config.SWEEP_WORKERS)
    converge.add_argument('--save', action='store_true', help='Registra a varredura no banco de resultados')
    converge.add_argument('--db', type=Path, help='Caminho do banco (implica --save)')

    expansion = sub.add_parser('expansion', help='Relatório do resíduo da expansão do erro')
    _add_contract_args(expansion)
    expansion.add_argument('--n-values', type=_int_list, default=Config.DEFAULT_N_VALUES)
    expansion.add_argument('--out', type=Path)
    return parser


def build_contract(parser: argparse.ArgumentParser, args) -> Tuple[MarketParams, DigitalOptionSpec]:
    """Mercado e contrato a partir do preset e das flags explícitas"""
    values = {'market': {}, 'option': {'orientation': 'down', 'knock': 'out', 'style': 'european'}}
    if args.preset:
        preset = PRESETS_CONFIG[args.preset]
        values['market'].update(preset['market'])
        values['option'].update(preset['option'])
    for flag, (group, key) in _CONTRACT_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            values[group][key] = value

    missing = [flag for flag, (group, key) in _CONTRACT_FLAGS.items() if key not in values[group]]
    if missing:
        parser.error(f"missing contract flags: {', '.join('--' + m for m in missing)} (or use --preset)")
    return MarketParams(**values['market']), DigitalOptionSpec(**values['option'])


def _mc_config(args) -> McConfig:
    return McConfig(
        paths=args.mc_paths,
        steps_per_year=args.mc_steps_per_year,
        seed=args.seed,
        use_bridge_correction=not args.no_bridge,
        workers=getattr(args, 'workers', 1),
    )


def cmd_price(args, market: MarketParams, spec: DigitalOptionSpec) -> int:
    if args.method == 'bil':
        engine = AdjustedBilEngine(args.probability, subtract_constant=args.subtract_constant)
    else:
        engine = get_engine(args.method, args.probability, _mc_config(args))
    result, runtime_ms = engine.timed_price(market, spec, args.steps)

    print(f"price: {result.price:.{Config.PRICE_DECIMALS}f}")
    print(f"method: {result.method}")
    if result.n_steps is not None:
        print(f"n_steps: {result.n_steps}")
    for key, value in result.diagnostics.items():
        print(f"{key}: {value}")
    print(f"runtime_ms: {runtime_ms:.3f}")
    return EXIT_OK


def cmd_converge(args, market: MarketParams, spec: DigitalOptionSpec) -> int:
    if not args.methods:
        raise ValidationError("at least one method is required", 'invalid_methods')
    sweep = SweepConfig(
        market=market,
        spec=spec,
        n_values=args.n_values,
        methods=args.methods,
        output_format=args.format,
        output_path=args.out,
        probability=args.probability,
        mc_config=_mc_config(args),
        workers=args.workers,
    )
    database = ResultsDatabase(args.db) if (args.save or args.db) else None
    resultado = ConvergencePipeline(database).executar_completo(sweep)

    decimals = Config.PRICE_DECIMALS
    print(resultado['registros'].to_string(
        index=False,
        formatters={
            'price': f"{{:.{decimals}f}}".format,
            'reference': f"{{:.{decimals}f}}".format,
            'error': '{:.3e}'.format,
        },
    ))
    if resultado['arquivo'] is not None:
        print(f"output: {resultado['arquivo']}")
    return EXIT_OK


def cmd_expansion(args, market: MarketParams, spec: DigitalOptionSpec) -> int:
    report = residual_order_report(market, spec, args.n_values, args.probability)
    print(report.table.to_string(index=False, float_format='{:.6e}'.format))
    print(f"flagged: {str(report.flagged).lower()}")
    if args.out is not None:
        try:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            report.table.to_csv(args.out, index=False, float_format='%.17g', lineterminator='\n', encoding='utf-8')
        except OSError as e:
            raise OutputError(f"cannot write output file {args.out}: {e}") from e
        print(f"output: {args.out}")
    return EXIT_OK


COMMANDS = {
    'price': cmd_price,
    'converge': cmd_converge,
    'expansion': cmd_expansion,
}


def _error_line(code: str, message: str):
    print(json.dumps({'error': code, 'message': message}), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        market, spec = build_contract(parser, args)
        return COMMANDS[args.command](args, market, spec)
    except (ValidationError, OutputError) as e:
        _error_line(e.code, str(e))
        return EXIT_ARGUMENT
    except PricingError as e:
        _error_line(e.code, str(e))
        return EXIT_NUMERICAL
    except Exception as e:
        logger.error(f"💥 Erro durante execução: {e}")
        logger.error(traceback.format_exc())
        return 1
