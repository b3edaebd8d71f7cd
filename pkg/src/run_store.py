#!/usr/bin/env python3
"""
Run Registry

Keeps a record of every command-line run (configuration, seed, manifest
location, outputs and exit status) in SQLite, so experiments can be listed
and replayed later.
"""

import json
import logging
import sqlite3
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from config import get_run_db_path

logger = logging.getLogger(__name__)


class RunStatus(Enum):
    """Lifecycle of a run"""
    RUNNING = "running"       # started, not finished
    SUCCEEDED = "succeeded"   # exit code 0
    FAILED = "failed"         # validation, numeric or unexpected failure


@dataclass
class RunRecord:
    id: Optional[int]
    command: str
    status: RunStatus
    seed: Optional[int]
    config: Dict[str, Any]
    created_at: datetime
    updated_at: datetime
    manifest_path: Optional[str] = None
    outputs: Optional[List[str]] = None
    exit_code: Optional[int] = None
    message: Optional[str] = None


class RunStore:
    """SQLite store for run records"""

    def __init__(self, db_path: Optional[str] = None):
        self.db_path = db_path or get_run_db_path()
        self._init_database()

    def _init_database(self):
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute("""
                    CREATE TABLE IF NOT EXISTS runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        command TEXT NOT NULL,
                        status TEXT NOT NULL,
                        seed INTEGER,
                        config TEXT NOT NULL,
                        created_at TIMESTAMP NOT NULL,
                        updated_at TIMESTAMP NOT NULL,
                        manifest_path TEXT,
                        outputs TEXT,
                        exit_code INTEGER,
                        message TEXT
                    )
                """)
                self._migrate_schema(cursor)
                cursor.execute("CREATE INDEX IF NOT EXISTS idx_runs_status ON runs(status)")
                cursor.execute("CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command)")
                conn.commit()
                logger.debug(f"Run registry ready at {self.db_path}")
        except Exception as e:
            logger.error(f"Failed to initialize run registry: {e}")
            raise

    def _migrate_schema(self, cursor):
        """Add columns missing from registries created by older versions"""
        try:
            cursor.execute("PRAGMA table_info(runs)")
            columns = [column[1] for column in cursor.fetchall()]
            if "exit_code" not in columns:
                cursor.execute("ALTER TABLE runs ADD COLUMN exit_code INTEGER")
                logger.info("Added exit_code column")
            if "message" not in columns:
                cursor.execute("ALTER TABLE runs ADD COLUMN message TEXT")
                logger.info("Added message column")
        except Exception as e:
            logger.error(f"Schema migration failed: {e}")

    def create_run(self, command: str, config: Dict[str, Any], seed: Optional[int] = None,
                   manifest_path: Optional[str] = None) -> RunRecord:
        try:
            with sqlite3.connect(self.db_path) as conn:
                now = datetime.now(timezone.utc)
                cursor = conn.cursor()
                cursor.execute("""
                    INSERT INTO runs (command, status, seed, config, created_at, updated_at,
                                      manifest_path, outputs)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """, (command, RunStatus.RUNNING.value, seed, json.dumps(config, default=str),
                      now.isoformat(), now.isoformat(), manifest_path, "[]"))
                conn.commit()
                return RunRecord(id=cursor.lastrowid, command=command, status=RunStatus.RUNNING,
                                 seed=seed, config=config, created_at=now, updated_at=now,
                                 manifest_path=manifest_path, outputs=[])
        except Exception as e:
            logger.error(f"Failed to register run of {command}: {e}")
            raise

    def _finish(self, run_id: int, status: RunStatus, exit_code: int, message: Optional[str],
                outputs: Optional[List[str]], manifest_path: Optional[str]) -> bool:
        try:
            with sqlite3.connect(self.db_path) as conn:
                fields = ["status = ?", "updated_at = ?", "exit_code = ?", "message = ?"]
                params: List[Any] = [status.value, datetime.now(timezone.utc).isoformat(), exit_code, message]
                if outputs is not None:
                    fields.append("outputs = ?")
                    params.append(json.dumps(outputs))
                if manifest_path is not None:
                    fields.append("manifest_path = ?")
                    params.append(manifest_path)
                params.append(run_id)
                conn.execute(f"UPDATE runs SET {', '.join(fields)} WHERE id = ?", params)
                conn.commit()
                logger.debug(f"Run {run_id} -> {status.value}")
                return True
        except Exception as e:
            logger.error(f"Failed to update run {run_id}: {e}")
            return False

    def complete_run(self, run_id: int, outputs: List[str], manifest_path: Optional[str] = None) -> bool:
        return self._finish(run_id, RunStatus.SUCCEEDED, 0, None, outputs, manifest_path)

    def fail_run(self, run_id: int, exit_code: int, message: str) -> bool:
        return self._finish(run_id, RunStatus.FAILED, exit_code, message, None, None)

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        try:
            with sqlite3.connect(self.db_path) as conn:
                row = conn.execute("SELECT * FROM runs WHERE id = ?", (run_id,)).fetchone()
                return self._row_to_record(row) if row else None
        except Exception as e:
            logger.error(f"Failed to retrieve run {run_id}: {e}")
            return None

    def list_runs(self, command: Optional[str] = None, status: Optional[RunStatus] = None,
                  limit: int = 50) -> List[RunRecord]:
        """Most recent runs first, optionally filtered"""
        try:
            clauses, params = [], []
            if command is not None:
                clauses.append("command = ?")
                params.append(command)
            if status is not None:
                clauses.append("status = ?")
                params.append(status.value)
            where = f"WHERE {' AND '.join(clauses)}" if clauses else ""
            params.append(limit)
            with sqlite3.connect(self.db_path) as conn:
                rows = conn.execute(f"SELECT * FROM runs {where} ORDER BY id DESC LIMIT ?", params).fetchall()
                return [self._row_to_record(row) for row in rows]
        except Exception as e:
            logger.error(f"Failed to list runs: {e}")
            return []

    def get_statistics(self) -> Dict[str, Any]:
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute("SELECT COUNT(*) FROM runs")
                total = cursor.fetchone()[0]
                cursor.execute("SELECT status, COUNT(*) FROM runs GROUP BY status")
                status_counts = dict(cursor.fetchall())
                cursor.execute("SELECT command, COUNT(*) FROM runs GROUP BY command")
                command_counts = dict(cursor.fetchall())
                cursor.execute("""
                    SELECT AVG((julianday(updated_at) - julianday(created_at)) * 86400)
                    FROM runs WHERE status != 'running'
                """)
                avg_seconds = cursor.fetchone()[0] or 0
                return {
                    "total_runs": total,
                    "status_counts": status_counts,
                    "command_counts": command_counts,
                    "avg_duration_seconds": round(avg_seconds, 2),
                }
        except Exception as e:
            logger.error(f"Failed to get statistics: {e}")
            return {}

    def _row_to_record(self, row: tuple) -> RunRecord:
        return RunRecord(
            id=row[0],
            command=row[1],
            status=RunStatus(row[2]),
            seed=row[3],
            config=json.loads(row[4]) if row[4] else {},
            created_at=datetime.fromisoformat(row[5]),
            updated_at=datetime.fromisoformat(row[6]),
            manifest_path=row[7],
            outputs=json.loads(row[8]) if row[8] else [],
            exit_code=row[9],
            message=row[10],
        )


_run_store: Optional[RunStore] = None


def get_run_store() -> RunStore:
    """Process-wide registry, created on first use"""
    global _run_store
    if _run_store is None:
        _run_store = RunStore()
    return _run_store
