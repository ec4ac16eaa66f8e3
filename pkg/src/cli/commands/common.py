"""Helpers shared by the subcommand handlers."""

import logging
import sys
from typing import Dict, Optional, Sequence

from pydantic import BaseModel
from sqlalchemy.orm import Session

from src.cli.models import RunConfig
from src.models.records import ErrorRecord
from src.database.session import SessionLocal, init_db
from src.utils.records import output_path, render_table, to_json_line, write_jsonl

logger = logging.getLogger(__name__)


def emit(command: str, records: Sequence[BaseModel], config: RunConfig,
         columns: Optional[Dict[str, str]] = None, name: Optional[str] = None) -> None:
    """JSONL records to <out>/<name>.jsonl (stdout without --out), then the table."""
    path = output_path(config.out, f"{name or command}.jsonl")
    if path:
        write_jsonl(path, records)
    else:
        for record in records:
            print(to_json_line(record))
    print(render_table(records, columns))


def fail(command: str, error: str, error_type: str = "CommandError", code: int = 1) -> int:
    """Print a structured error record on stderr and return the exit code."""
    record = ErrorRecord(command=command, error_type=error_type, error=error)
    print(record.model_dump_json(), file=sys.stderr)
    return code


def finish(command: str, result: Dict) -> int:
    if result['success']:
        return 0
    return fail(command, result.get('error') or "verification failed", "VerificationError")


def open_db(config: RunConfig) -> Optional[Session]:
    if not config.persist:
        return None
    init_db()
    return SessionLocal()
