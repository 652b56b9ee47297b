"""
Measure file format.

The first line is an ASCII header::

    CANTORMEASURE 1 levels=<N> count=<2**N> encoding=<f64le|json>

followed by the payload: either ``count`` little-endian IEEE-754 doubles or a
JSON array of numbers.  JSON numbers are written with ``repr`` precision so
both encodings round-trip bit-exactly.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .errors import MeasureFormatError, UsageError
from .measure import CylinderMeasure

MAGIC = "CANTORMEASURE"
VERSION = 1
ENCODINGS = ("f64le", "json")


def dumps_measure(mu: CylinderMeasure, encoding: str = "f64le") -> bytes:
    if encoding not in ENCODINGS:
        raise UsageError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")
    header = f"{MAGIC} {VERSION} levels={mu.n_levels} count={mu.size} encoding={encoding}\n"
    if encoding == "f64le":
        payload = mu.masses.astype("<f8").tobytes()
    else:
        payload = (json.dumps([float(v) for v in mu.masses]) + "\n").encode("ascii")
    return header.encode("ascii") + payload


def write_measure(mu: CylinderMeasure, path, encoding: str = "f64le") -> None:
    data = dumps_measure(mu, encoding)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _parse_header(line: bytes) -> dict:
    try:
        text = line.decode("ascii").strip()
    except UnicodeDecodeError:
        raise MeasureFormatError("header is not ASCII") from None
    parts = text.split()
    if len(parts) != 5 or parts[0] != MAGIC:
        raise MeasureFormatError(f"not a measure file (bad header {text[:60]!r})")
    if parts[1] != str(VERSION):
        raise MeasureFormatError(f"unsupported format version {parts[1]}")
    fields = {}
    for item in parts[2:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise MeasureFormatError(f"malformed header field {item!r}")
        fields[key] = value
    try:
        levels = int(fields["levels"])
        count = int(fields["count"])
        encoding = fields["encoding"]
    except (KeyError, ValueError) as exc:
        raise MeasureFormatError(f"malformed header: {exc}") from None
    if encoding not in ENCODINGS:
        raise MeasureFormatError(f"unknown encoding {encoding!r}")
    if not 1 <= levels <= 30 or count != 1 << levels:
        raise MeasureFormatError(
            f"declared count {count} does not equal 2**levels for levels={levels}"
        )
    return {"levels": levels, "count": count, "encoding": encoding}


def loads_measure(data: bytes) -> CylinderMeasure:
    line, nl, payload = data.partition(b"\n")
    if not nl:
        raise MeasureFormatError("missing header line")
    head = _parse_header(line)
    if head["encoding"] == "f64le":
        if len(payload) != 8 * head["count"]:
            raise MeasureFormatError(
                f"payload holds {len(payload)} bytes, expected {8 * head['count']}"
            )
        masses = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    else:
        try:
            values = json.loads(payload.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MeasureFormatError(f"bad JSON payload: {exc}") from None
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise MeasureFormatError("JSON payload must be an array of numbers")
        if len(values) != head["count"]:
            raise MeasureFormatError(
                f"payload holds {len(values)} masses, expected {head['count']}"
            )
        masses = np.array(values, dtype=np.float64)
    try:
        return CylinderMeasure(head["levels"], masses)
    except UsageError as exc:
        raise MeasureFormatError(str(exc)) from None


def read_measure(path) -> CylinderMeasure:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MeasureFormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads_measure(data)
