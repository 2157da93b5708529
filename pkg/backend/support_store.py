"""
SQLite store for enumerated support tables and harness/verification reports
"""
import json
import logging
import os
import sqlite3
from datetime import datetime
from typing import Dict, List, Optional

from exact_family import SupportTable, enumerate_support

logger = logging.getLogger(__name__)


class SupportStore:
    """Caches support tables by n and keeps a log of report runs"""

    def __init__(self, db_path: str):
        """
        Initialize the store

        Args:
            db_path: Path to SQLite database file
        """
        self.db_path = db_path
        self.init_database()

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.db_path)

    def init_database(self):
        """Create tables if they don't exist"""
        db_dir = os.path.dirname(self.db_path)
        if db_dir and not os.path.exists(db_dir):
            os.makedirs(db_dir, exist_ok=True)

        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS support_tables (
                n INTEGER NOT NULL,
                e_count INTEGER NOT NULL,
                t_count INTEGER NOT NULL,
                count TEXT NOT NULL,
                PRIMARY KEY (n, e_count, t_count)
            )
        """)
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp TEXT NOT NULL,
                kind TEXT NOT NULL,
                params TEXT NOT NULL,
                report TEXT NOT NULL
            )
        """)
        conn.commit()
        conn.close()

    def save_support_table(self, table: SupportTable) -> None:
        """Replace the stored histogram for table.n"""
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute("DELETE FROM support_tables WHERE n = ?", (table.n,))
        cursor.executemany(
            "INSERT INTO support_tables (n, e_count, t_count, count) VALUES (?, ?, ?, ?)",
            [(table.n, e, t, str(c)) for (e, t), c in sorted(table.counts.items())],
        )
        conn.commit()
        conn.close()

    def load_support_table(self, n: int) -> Optional[SupportTable]:
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute(
            "SELECT e_count, t_count, count FROM support_tables WHERE n = ? ORDER BY e_count, t_count", (n,)
        )
        rows = cursor.fetchall()
        conn.close()
        if not rows:
            return None
        table = SupportTable(n, {(e, t): int(c) for e, t, c in rows})
        if table.total() != 1 << (n * (n - 1) // 2):
            logger.warning("stored support table for n=%d is incomplete, ignoring it", n)
            return None
        return table

    def save_run(self, kind: str, params: Dict, report: Dict) -> int:
        """
        Save a report

        Args:
            kind: report kind ("figure", "verify", ...)
            params: parameters that produced it
            report: JSON-serialisable report

        Returns:
            Run ID
        """
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute(
            "INSERT INTO runs (timestamp, kind, params, report) VALUES (?, ?, ?, ?)",
            (datetime.now().isoformat(), kind, json.dumps(params, ensure_ascii=False),
             json.dumps(report, ensure_ascii=False)),
        )
        run_id = cursor.lastrowid
        conn.commit()
        conn.close()
        return run_id

    def get_run(self, run_id: int) -> Optional[Dict]:
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute("SELECT id, timestamp, kind, params, report FROM runs WHERE id = ?", (run_id,))
        row = cursor.fetchone()
        conn.close()
        if row is None:
            return None
        return {
            "id": row[0],
            "timestamp": row[1],
            "kind": row[2],
            "params": json.loads(row[3]),
            "report": json.loads(row[4]),
        }

    def list_runs(self, kind: Optional[str] = None) -> List[Dict]:
        """Run summaries, newest first"""
        conn = self._connect()
        cursor = conn.cursor()
        if kind:
            cursor.execute("SELECT id, timestamp, kind FROM runs WHERE kind = ? ORDER BY id DESC", (kind,))
        else:
            cursor.execute("SELECT id, timestamp, kind FROM runs ORDER BY id DESC")
        rows = cursor.fetchall()
        conn.close()
        return [{"id": r[0], "timestamp": r[1], "kind": r[2]} for r in rows]

    def clear(self) -> None:
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute("DELETE FROM support_tables")
        cursor.execute("DELETE FROM runs")
        conn.commit()
        conn.close()


def cached_support(n: int, store: Optional[SupportStore] = None, allow_long: bool = False,
                   workers: Optional[int] = None) -> SupportTable:
    """Load the support table for n from the store, enumerating and saving it on a miss"""
    if store is not None:
        table = store.load_support_table(n)
        if table is not None:
            logger.info("Loaded support table for n=%d from %s", n, store.db_path)
            return table
    table = enumerate_support(n, allow_long=allow_long, workers=workers)
    if store is not None:
        store.save_support_table(table)
    return table
