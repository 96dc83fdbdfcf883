"""Sweep records and their CSV / JSON persistence.

Column order is the field order of SweepRecord. Floats are written with
17 significant digits, so read-back is bit-exact.
"""

import csv
from dataclasses import asdict, dataclass, fields
import json
from math import isfinite, nan
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from laplacelab.errors import SinkError, SummaryError
from laplacelab.risk import RiskEstimate

PathLike = Union[str, Path]

@dataclass(frozen=True)
class SweepRecord:
    """One (d, n, c, seed) experiment cell.

    Error rows keep the coordinates, carry NaN estimates and a non-empty
    `error` message.
    """
    d: int
    n: int
    c: float
    c_multiplier: float
    seed: int
    f0: str
    ridge: float
    risk_mean: float
    risk_std_error: float
    risk_m: int
    l2_fhat_mean: float
    l2_fhat_std_error: float
    l2_f0: float
    convention_norm_fhat: float
    witness_norm: float
    witness_alpha: float
    certificate: float
    local_mass: float
    sum_rd: float
    power_avg_m1: float
    power_avg_1: float
    power_avg_d: float
    jitter_used: float
    residual_max: float
    grid_hash: str
    version: str
    error: str = ''

    @property
    def coordinates(self):
        return (self.d, self.n, self.c_multiplier, self.seed)

    @property
    def failed(self) -> bool:
        return bool(self.error)

    @property
    def risk_p(self) -> RiskEstimate:
        return RiskEstimate(self.risk_mean, self.risk_std_error, self.risk_m,
            self.seed, 'population')

    @property
    def l2_norm_fhat(self) -> RiskEstimate:
        return RiskEstimate(self.l2_fhat_mean, self.l2_fhat_std_error,
            self.risk_m, self.seed, 'lebesgue')

COLUMNS: List[str] = [f.name for f in fields(SweepRecord)]
_TYPES: Dict[str, type] = {f.name: f.type for f in fields(SweepRecord)}

def _format(value: Any) -> str:
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)

def _parse(name: str, text: str) -> Any:
    kind = _TYPES[name]
    if kind in (int, 'int'):
        return int(text)
    if kind in (float, 'float'):
        return float(text)
    return text

def _require_records(records: Sequence[SweepRecord]):
    if not records:
        raise SummaryError('no records to write')

def emit_csv(records: Sequence[SweepRecord], path: PathLike) -> Path:
    """Write records as UTF-8 CSV with LF line endings."""
    _require_records(records)
    path = Path(path)
    try:
        with path.open('w', encoding='utf-8', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(COLUMNS)
            for record in records:
                writer.writerow([_format(getattr(record, name))
                    for name in COLUMNS])
    except OSError as error:
        raise SinkError(str(path), error.strerror) from error
    return path

def _json_row(record: SweepRecord) -> Dict[str, Any]:
    """Non-finite floats become null, which every JSON reader accepts."""
    return {name: None if isinstance(value, float) and not isfinite(value)
        else value for name, value in asdict(record).items()}

def emit_json(records: Sequence[SweepRecord], path: PathLike) -> Path:
    """Write records as a JSON array of flat objects.

    NaN and infinite estimates are written as null.
    """
    _require_records(records)
    path = Path(path)
    try:
        with path.open('w', encoding='utf-8', newline='\n') as handle:
            json.dump([_json_row(record) for record in records], handle,
                indent=1, allow_nan=False)
            handle.write('\n')
    except OSError as error:
        raise SinkError(str(path), error.strerror) from error
    return path

def read_csv(path: PathLike) -> List[SweepRecord]:
    with Path(path).open(encoding='utf-8', newline='') as handle:
        reader = csv.DictReader(handle)
        return [SweepRecord(**{name: _parse(name, row[name])
            for name in COLUMNS}) for row in reader]

def _from_json(name: str, value: Any) -> Any:
    if value is None and _TYPES[name] in (float, 'float'):
        return nan
    return value

def read_json(path: PathLike) -> List[SweepRecord]:
    """Load a JSON result file; null floats come back as NaN."""
    with Path(path).open(encoding='utf-8') as handle:
        rows = json.load(handle)
    return [SweepRecord(**{name: _from_json(name, row[name])
        for name in COLUMNS}) for row in rows]

def read_records(path: PathLike) -> List[SweepRecord]:
    """Load a CSV or JSON result file by its suffix."""
    if Path(path).suffix.lower() == '.json':
        return read_json(path)
    return read_csv(path)

def emit_records(records: Sequence[SweepRecord], path: PathLike) -> Path:
    """Write CSV or JSON by the suffix of path."""
    if Path(path).suffix.lower() == '.json':
        return emit_json(records, path)
    return emit_csv(records, path)

def check_sink(path: PathLike):
    """Fail before any compute if path cannot be written."""
    path = Path(path)
    try:
        with path.open('a', encoding='utf-8'):
            pass
    except OSError as error:
        raise SinkError(str(path), error.strerror) from error
