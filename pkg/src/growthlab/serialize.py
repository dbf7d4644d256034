"""File formats: table CSV, checkpoint JSON, schedule JSON, reports.

Big naturals cross file boundaries as ``0x``-prefixed lowercase hex.  Writes
go to a temporary file first and are renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import List, Tuple

from .reports import from_hex, to_hex

DENSE_ROW_LIMIT = 100_000


class TableFormatError(ValueError):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def table_rows(table, force_dense: bool = False) -> List[Tuple[int, str, int]]:
    """Rows ``(x, segment, f)``; checkpoints only above the dense row limit."""
    if table.horizon == 0:
        return []
    if table.horizon <= DENSE_ROW_LIMIT or force_dense:
        xs = range(1, table.horizon + 1)
        vals = table.iter_values(1, table.horizon)
    else:
        xs = sorted(set(table.checkpoints) | {1, table.horizon})
        vals = (table.value_at(x) for x in xs)
    return [(x, table.segment_of(x).label, v) for x, v in zip(xs, vals)]


def write_rows_csv(path, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "segment", "f_hex"])
    for x, seg, v in rows:
        w.writerow([x, seg, to_hex(v)])
    atomic_write(path, buf.getvalue())


def write_table_csv(path, table, force_dense: bool = False) -> None:
    write_rows_csv(path, table_rows(table, force_dense))


def read_table_csv(path) -> Tuple[List[int], List[str], List[int]]:
    """Parse a table CSV into parallel lists; raises :class:`TableFormatError`."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise TableFormatError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["x", "segment", "f_hex"]:
        raise TableFormatError(f"{path}: missing header x,segment,f_hex")
    xs, segs, vals = [], [], []
    for i, row in enumerate(rows[1:], 2):
        if len(row) != 3:
            raise TableFormatError(f"{path}:{i}: expected 3 fields")
        try:
            x, v = int(row[0]), from_hex(row[2])
        except ValueError as exc:
            raise TableFormatError(f"{path}:{i}: {exc}") from exc
        if v < 0 or (xs and x <= xs[-1]):
            raise TableFormatError(f"{path}:{i}: bad row")
        xs.append(x)
        segs.append(row[1])
        vals.append(v)
    return xs, segs, vals


def is_dense(xs: List[int]) -> bool:
    return bool(xs) and xs[-1] - xs[0] + 1 == len(xs)


def checkpoints_dict(table) -> dict:
    return {"boundaries": [
        {"x": x, "f_hex": to_hex(v), "segment": table.segment_of(x).label}
        for x, v in sorted(table.checkpoints.items())
    ]}
