"""
Pipeline de varreduras de convergência
Orquestra: Referência → Preços por (n, método) → Tabela → Arquivo → Banco
"""
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from scr.config import Config
from scr.database import RECORD_FIELDS, ResultsDatabase
from scr.engines import AVAILABLE_ENGINES, McConfig, get_engine
from scr.engines.analytic import price_analytic
from scr.exceptions import PricingError, ValidationError
from scr.models import DigitalOptionSpec, MarketParams, ProbabilityScheme

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('csv', 'json')


class OutputError(Exception):
    """Arquivo de saída não pôde ser escrito"""

    code = 'unwritable_output'


@dataclass
class SweepConfig:
    market: MarketParams
    spec: DigitalOptionSpec
    n_values: List[int]
    methods: List[str]
    output_format: str = 'csv'
    output_path: Optional[Path] = None
    probability: str = Config.PROBABILITY_SCHEME
    mc_config: McConfig = field(default_factory=McConfig)
    workers: int = Config.SWEEP_WORKERS

    def __post_init__(self):
        self.n_values = [int(n) for n in self.n_values]
        if not self.n_values:
            raise ValidationError("n_values must not be empty", 'invalid_n_values')
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValidationError(f"n_values must be strictly ascending: {self.n_values}", 'invalid_n_values')
        if not self.methods:
            raise ValidationError("at least one method is required", 'invalid_methods')
        unknown = [m for m in self.methods if m not in AVAILABLE_ENGINES]
        if unknown:
            raise ValidationError(f"unknown methods {unknown}; options: {list(AVAILABLE_ENGINES)}", 'invalid_methods')
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(f"output format must be one of {OUTPUT_FORMATS}", 'invalid_format')
        self.probability = ProbabilityScheme(self.probability).value
        if self.workers < 1:
            raise ValidationError("workers must be >= 1", 'invalid_workers')


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    method: str
    price: float
    reference: float
    error: float
    delta_K: float
    delta_L: float
    eps_n: float
    runtime_ms: float

    @classmethod
    def from_result(cls, n: int, method: str, result, reference: float, runtime_ms: float) -> 'ConvergenceRecord':
        diag = result.diagnostics
        return cls(
            n=n,
            method=method,
            price=result.price,
            reference=reference,
            error=result.price - reference,
            delta_K=float(diag.get('delta_K', math.nan)),
            delta_L=float(diag.get('delta_L', math.nan)),
            eps_n=float(diag.get('eps_n', math.nan)),
            runtime_ms=max(runtime_ms, 0.0),
        )


def method_label(method: str, sweep: SweepConfig) -> str:
    if method == 'mc':
        return f"mc(seed={sweep.mc_config.seed})"
    return method


def records_to_frame(records: List[ConvergenceRecord]) -> pd.DataFrame:
    df = pd.DataFrame([asdict(r) for r in records], columns=RECORD_FIELDS)
    return df.sort_values(['n', 'method'], kind='mergesort').reset_index(drop=True)


def write_records(df: pd.DataFrame, path: Path, output_format: str = 'csv') -> Path:
    """Grava a tabela com precisão total (17 dígitos significativos)"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if output_format == 'csv':
            df.to_csv(path, index=False, float_format='%.17g', lineterminator='\n', encoding='utf-8')
        else:
            rows = [
                {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
                for row in df.to_dict(orient='records')
            ]
            with open(path, 'w', encoding='utf-8', newline='\n') as f:
                json.dump(rows, f, indent=2)
                f.write('\n')
    except OSError as e:
        raise OutputError(f"cannot write output file {path}: {e}") from e
    return path


def read_records(path: Path, output_format: str = 'csv') -> pd.DataFrame:
    if output_format == 'csv':
        df = pd.read_csv(path, float_precision='round_trip')
    else:
        with open(path, encoding='utf-8') as f:
            df = pd.DataFrame(json.load(f), columns=RECORD_FIELDS)
    numeric = [c for c in RECORD_FIELDS if c not in ('n', 'method')]
    df[numeric] = df[numeric].astype(float)
    df['n'] = df['n'].astype(int)
    return df


class ConvergencePipeline:
    """Pipeline de varredura de convergência"""

    def __init__(self, database: Optional[ResultsDatabase] = None):
        self.database = database
        self.stats = {
            'inicio_execucao': None,
            'fim_execucao': None,
            'tempo_total': 0.0,
            'precos_calculados': 0,
        }

    def reference_price(self, sweep: SweepConfig) -> float:
        """Preço fechado quando existe, NaN caso contrário"""
        try:
            return price_analytic(sweep.market, sweep.spec).price
        except PricingError as e:
            logger.info(f"ℹ️ Sem preço de referência fechado: {e}")
            return math.nan

    def run(self, sweep: SweepConfig) -> List[ConvergenceRecord]:
        """Calcula uma linha por (n, método); erros de precificação são propagados"""
        reference = self.reference_price(sweep)
        engines = {m: get_engine(m, sweep.probability, sweep.mc_config) for m in sweep.methods}
        tasks = [(n, m) for n in sweep.n_values for m in sweep.methods]

        def price_row(task) -> ConvergenceRecord:
            n, method = task
            result, runtime_ms = engines[method].timed_price(sweep.market, sweep.spec, n)
            return ConvergenceRecord.from_result(n, method_label(method, sweep), result, reference, runtime_ms)

        if sweep.workers > 1:
            with ThreadPoolExecutor(max_workers=sweep.workers) as executor:
                records = list(executor.map(price_row, tasks))
        else:
            records = [price_row(task) for task in tasks]

        self.stats['precos_calculados'] += len(records)
        return sorted(records, key=lambda r: (r.n, r.method))

    def executar_completo(self, sweep: SweepConfig) -> Dict:
        """Executa a varredura, grava o arquivo e, se houver banco, registra a execução"""
        logger.info("🚀 VARREDURA DE CONVERGÊNCIA")
        logger.info(f"   métodos: {', '.join(sweep.methods)} | n: {sweep.n_values}")

        self.stats['inicio_execucao'] = datetime.now()
        inicio = time.time()

        stats_iniciais = self.database.get_stats() if self.database is not None else None
        if stats_iniciais is not None:
            logger.info(f"   Estado inicial: {stats_iniciais['total_sweeps']} varreduras no banco")

        records = self.run(sweep)
        df = records_to_frame(records)

        arquivo = None
        if sweep.output_path is not None:
            arquivo = write_records(df, sweep.output_path, sweep.output_format)
            logger.info(f"💾 {len(df)} linhas gravadas em {arquivo}")

        self.stats['fim_execucao'] = datetime.now()
        self.stats['tempo_total'] = time.time() - inicio

        sweep_id = None
        stats_finais = None
        if self.database is not None:
            sweep_id = self.database.register_sweep(
                market=asdict(sweep.market),
                option={k: getattr(v, 'value', v) for k, v in asdict(sweep.spec).items()},
                methods=sweep.methods,
                n_values=sweep.n_values,
                probability=sweep.probability,
                tempo_execucao=self.stats['tempo_total'],
            )
            self.database.insert_records(sweep_id, df)
            stats_finais = self.database.get_stats()
            logger.info(f"🗄️ Varredura registrada no banco (id={sweep_id}), "
                        f"{stats_finais['total_records']} linhas no total")

        logger.info(f"✅ Varredura concluída em {self.stats['tempo_total']:.2f}s")
        return {
            'sucesso': True,
            'tempo_execucao': self.stats['tempo_total'],
            'registros': df,
            'arquivo': arquivo,
            'sweep_id': sweep_id,
            'stats_iniciais': stats_iniciais,
            'stats_finais': stats_finais,
        }
