"""CSV ingestion into validated :class:`~longmem.series.PriceSeries`."""
import csv
import datetime as dt
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import InputError
from ..series import PriceSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ColumnMapping:
    date: str = "date"
    price: str = "price"
    volume: Optional[str] = None


def parse_date(text):
    """ISO 8601 (``YYYY-MM-DD``) or US ``MM/DD/YYYY``."""
    text = text.strip()
    try:
        return dt.date.fromisoformat(text[:10]) if "-" in text else \
            dt.datetime.strptime(text, "%m/%d/%Y").date()
    except ValueError:
        raise ValueError(f"unparseable date {text!r}") from None


def _number(text, what):
    try:
        value = float(text.replace(",", "")) if text.strip() else float("nan")
    except ValueError:
        raise ValueError(f"unparseable {what} {text!r}") from None
    if not np.isfinite(value):
        raise ValueError(f"missing or non-finite {what} {text!r}")
    return value


def ingest_csv(path, mapping=None):
    """Read a headed CSV of dates, prices and optional volume.

    Rows are sorted by date. Exact duplicate rows are dropped with a warning;
    duplicate dates carrying different values are an error. Errors cite the
    1-based file line number (the header is line 1).
    """
    mapping = mapping or ColumnMapping()
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        wanted = {"date": mapping.date, "price": mapping.price}
        if mapping.volume:
            wanted["volume"] = mapping.volume
        idx = {}
        for key, col in wanted.items():
            if col not in header:
                raise InputError(f"{path}: column {col!r} not found in header {header}")
            idx[key] = header.index(col)
        rows = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                date = parse_date(row[idx["date"]])
                price = _number(row[idx["price"]], "price")
                volume = _number(row[idx["volume"]], "volume") if "volume" in idx else None
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}: line {line_no}: {exc}", row=line_no) from None
            if not price > 0:
                raise InputError(f"{path}: line {line_no}: nonpositive price {price}",
                                 row=line_no)
            if volume is not None and volume < 0:
                raise InputError(f"{path}: line {line_no}: negative volume {volume}",
                                 row=line_no)
            record = (price, volume)
            if date in rows:
                if rows[date][0] != record:
                    raise InputError(f"{path}: line {line_no}: conflicting duplicate of "
                                     f"{date} from line {rows[date][1]}", row=line_no)
                logger.warning("%s: line %d duplicates %s; dropped", path, line_no, date)
                continue
            rows[date] = (record, line_no)
    if not rows:
        raise InputError(f"{path}: no data rows")
    dates = sorted(rows)
    prices = np.array([rows[d][0][0] for d in dates])
    volume = np.array([rows[d][0][1] for d in dates]) if mapping.volume else None
    return PriceSeries(np.array(dates, dtype="datetime64[D]"), prices, volume)
