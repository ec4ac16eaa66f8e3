"""Line-delimited JSON records and rendered tables."""

import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

Record = Union[BaseModel, Dict[str, Any]]


def output_path(out_dir: Optional[str], name: str) -> Optional[str]:
    """Path of `name` inside out_dir, creating the directory; None without an out_dir."""
    if not out_dir:
        return None
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def to_json_line(record: BaseModel) -> str:
    return record.model_dump_json()


def write_jsonl(path: str, records: Iterable[BaseModel], append: bool = False) -> int:
    """Write one JSON object per line and return the number of lines written."""
    count = 0
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(to_json_line(record) + "\n")
            count += 1
    logger.info(f"Wrote {count} record(s) to {path}")
    return count


def _as_dict(record: Record) -> Dict[str, Any]:
    return record.model_dump() if isinstance(record, BaseModel) else dict(record)


def records_frame(records: Sequence[Record], columns: Optional[Dict[str, str]] = None) -> pd.DataFrame:
    """DataFrame over records; `columns` maps field names to headers and fixes the order."""
    frame = pd.DataFrame([_as_dict(r) for r in records])
    if columns:
        for name in columns:
            if name not in frame.columns:
                frame[name] = None
        frame = frame[list(columns)].rename(columns=columns)
    return frame


def render_table(records: Sequence[Record], columns: Optional[Dict[str, str]] = None) -> str:
    if not records:
        return "(no rows)"
    frame = records_frame(records, columns)
    return frame.to_string(index=False, na_rep="-")


def render_key_values(record: Record, skip: Sequence[str] = ()) -> str:
    """Two-column 'field value' rendering of a single record."""
    data = {k: v for k, v in _as_dict(record).items() if k not in skip}
    frame = pd.DataFrame({"field": list(data.keys()), "value": [_short(v) for v in data.values()]})
    return frame.to_string(index=False)


def _short(value: Any, limit: int = 80) -> str:
    text = str(value)
    return text if len(text) <= limit else text[:limit - 3] + "..."


def read_jsonl(path: str) -> List[Dict[str, Any]]:
    frame = pd.read_json(path, lines=True, dtype=False)
    return frame.to_dict(orient="records")
