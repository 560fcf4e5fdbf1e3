"""
Banco SQLite com o histórico das varreduras de convergência
"""
import json
import logging
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
import pytz

from scr.config import Config

logger = logging.getLogger(__name__)

RECORD_FIELDS = ['n', 'method', 'price', 'reference', 'error', 'delta_K', 'delta_L', 'eps_n', 'runtime_ms']


class ResultsDatabase:
    """Gerenciador do banco de resultados"""

    def __init__(self, db_path: Optional[str] = None):
        self.db_path = str(db_path or Config.DATABASE_PATH)
        self.ensure_data_dir()
        self.init_database()
        logger.info(f"✅ Banco de resultados inicializado: {self.db_path}")

    def ensure_data_dir(self):
        """Garante que o diretório do banco existe"""
        Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)

    def init_database(self):
        """Cria as tabelas do banco se não existirem"""
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()

            # Uma linha por varredura executada
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS sweeps (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    data_execucao TEXT NOT NULL,
                    market TEXT NOT NULL,
                    option TEXT NOT NULL,
                    methods TEXT NOT NULL,
                    n_values TEXT NOT NULL,
                    probability TEXT,
                    tempo_execucao REAL,
                    status TEXT DEFAULT 'success',
                    created_at DATETIME DEFAULT CURRENT_TIMESTAMP
                )
            """)

            # Linhas de convergência de cada varredura
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS records (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    sweep_id INTEGER NOT NULL,
                    n INTEGER NOT NULL,
                    method TEXT NOT NULL,
                    price REAL NOT NULL,
                    reference REAL,
                    error REAL,
                    delta_K REAL,
                    delta_L REAL,
                    eps_n REAL,
                    runtime_ms REAL,
                    FOREIGN KEY (sweep_id) REFERENCES sweeps (id) ON DELETE CASCADE
                )
            """)

            cursor.execute("CREATE INDEX IF NOT EXISTS idx_records_sweep ON records(sweep_id)")
            conn.commit()

    def register_sweep(self, market: Dict, option: Dict, methods: List[str], n_values: List[int],
                       probability: str, tempo_execucao: float, status: str = 'success') -> int:
        agora = datetime.now(pytz.timezone(Config.TIMEZONE))
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()
            cursor.execute("""
                INSERT INTO sweeps (data_execucao, market, option, methods, n_values,
                                    probability, tempo_execucao, status)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                agora.isoformat(),
                json.dumps(market, sort_keys=True),
                json.dumps(option, sort_keys=True),
                ','.join(methods),
                ','.join(str(n) for n in n_values),
                probability,
                tempo_execucao,
                status,
            ))
            conn.commit()
            return cursor.lastrowid

    def insert_records(self, sweep_id: int, records: pd.DataFrame) -> int:
        def to_sql(value):
            if pd.isna(value):
                return None
            # escalares numpy viram tipos nativos para o sqlite3
            return value.item() if hasattr(value, 'item') else value

        rows = [
            (sweep_id, *[to_sql(v) for v in row])
            for row in records[RECORD_FIELDS].itertuples(index=False, name=None)
        ]
        with sqlite3.connect(self.db_path) as conn:
            conn.executemany(f"""
                INSERT INTO records (sweep_id, {', '.join(RECORD_FIELDS)})
                VALUES (?, {', '.join('?' for _ in RECORD_FIELDS)})
            """, rows)
            conn.commit()
        return len(rows)

    def get_records(self, sweep_id: int) -> pd.DataFrame:
        with sqlite3.connect(self.db_path) as conn:
            query = f"""
                SELECT {', '.join(RECORD_FIELDS)} FROM records
                WHERE sweep_id = ?
                ORDER BY n, method
            """
            df = pd.read_sql_query(query, conn, params=[sweep_id])
        numeric = [c for c in RECORD_FIELDS if c not in ('n', 'method')]
        df[numeric] = df[numeric].astype(float)
        return df

    def get_stats(self) -> Dict:
        """Estatísticas do banco"""
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()
            stats = {}

            cursor.execute("SELECT COUNT(*) FROM sweeps")
            stats['total_sweeps'] = cursor.fetchone()[0]

            cursor.execute("SELECT COUNT(*) FROM records")
            stats['total_records'] = cursor.fetchone()[0]

            cursor.execute("SELECT method, COUNT(*) FROM records GROUP BY method")
            stats['por_metodo'] = dict(cursor.fetchall())

            cursor.execute("SELECT MAX(data_execucao) FROM sweeps")
            stats['ultima_execucao'] = cursor.fetchone()[0]

            return stats
