"""CSV/JSON encoding of reports and figure series, plus terminal summaries.

Files carry every float at SIGNIFICANT_DIGITS significant digits; CSV and
JSON parse the same digit strings, so both hold identical numbers. NaN marks
a grid point where a quantity is undefined: "nan" in CSV, null in JSON.
"""
from __future__ import annotations
from settings import *
from errors import ConfigError
from figures import FigureSeries
from pathlib import Path
from typing import Any, Optional
import csv
import io
import json
import logging

logger = logging.getLogger(__name__)


def format_number(x: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return 'nan'
    if isinstance(x, (bool, np.bool_)):
        return 'true' if x else 'false'
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), f'.{digits}g')


def _plain(value: Any) -> Any:
    """Recursively turn numpy scalars and floats into JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return format_number(x)
        return float(format_number(x))
    return value


def _flatten(prefix: str, value: Any, out: dict):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f'{prefix}.{k}' if prefix else str(k), v, out)
    else:
        out[prefix] = value


def _cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, (float, int, np.floating, np.integer, bool, np.bool_)):
        return format_number(value)
    if isinstance(value, (list, tuple)):
        return ' '.join(_cell(v) for v in value)
    return str(value)


def encode_series(series: FigureSeries, fmt: str = 'csv') -> str:
    if fmt == 'json':
        payload = {'figure_id': series.figure_id, 'metadata': _plain(series.metadata),
                   'columns': {name: _plain(np.asarray(col)) for name, col in series.columns.items()}}
        return json.dumps(payload, indent=2) + '\n'
    if fmt != 'csv':
        raise ConfigError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    buf.write(f'# figure_id: {series.figure_id}\n')
    meta = {}
    _flatten('', series.metadata, meta)
    for key, value in meta.items():
        buf.write(f'# {key}: {_cell(value)}\n')
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(list(series.columns))
    for row in series.rows():
        writer.writerow([format_number(v) for v in row.values()])
    return buf.getvalue()


def encode_report(report: dict, fmt: str = 'csv') -> str:
    """A flat key/value report; nested dicts become dotted keys in CSV."""
    if fmt == 'json':
        return json.dumps(_plain(report), indent=2) + '\n'
    if fmt != 'csv':
        raise ConfigError(f"unknown output format {fmt!r}")
    flat = {}
    _flatten('', report, flat)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(['key', 'value'])
    for key, value in flat.items():
        writer.writerow([key, _cell(value)])
    return buf.getvalue()


def write_output(text: str, out: Optional[str]):
    if out is None or out == '-':
        print(text, end='')
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot write {out!r}: {exc.strerror or exc}") from exc
    logger.info("wrote %s", path)


def summary_number(x: Optional[float]) -> str:
    if x is None:
        return '-'
    return format_number(x, SUMMARY_DIGITS)


def summarize(title: str, items: dict) -> str:
    """Aligned 'name  value' lines at SUMMARY_DIGITS significant digits; nested dicts use dotted names."""
    flat = {}
    _flatten('', items, flat)
    items = flat
    width = max((len(k) for k in items), default=0)
    lines = [title]
    for key, value in items.items():
        shown = summary_number(value) if isinstance(value, (float, int, np.floating)) and \
            not isinstance(value, bool) else str(value)
        lines.append(f'  {key.ljust(width)}  {shown}')
    return '\n'.join(lines)
