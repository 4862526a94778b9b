"""Lossless matrix files (JSON or CSV) and report writers.

Every float is written with 17 significant digits so that reading a file
back reproduces the IEEE doubles bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from typing import Optional

import numpy as np

from spinmat.amplitudes import ParameterPoint
from spinmat.generator import Spectrum

__all__ = [
    "MatrixFileError",
    "format_float",
    "dumps",
    "complex_pair",
    "matrix_record",
    "dump_records_csv",
    "loads_matrix",
    "read_matrix",
]

_MARK = re.compile(r'"@@f:([^"@]+)@@"')
_INNER_LIST = re.compile(r"\[\s+([^\[\]{}\"]*?)\s+\]")


class MatrixFileError(ValueError):
    pass


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(x, ".17g")


def _mark(obj):
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, (np.bool_, np.integer)):
        return obj.item()
    if isinstance(obj, (float, np.floating)):
        return f"@@f:{format_float(obj)}@@"
    if isinstance(obj, dict):
        return {str(k): _mark(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float rendered at 17 significant digits."""
    text = _MARK.sub(lambda m: m.group(1), json.dumps(_mark(obj), indent=1))
    # keep innermost numeric lists, e.g. [re, im] pairs, on one line
    return _INNER_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text) + "\n"


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_record(entries, point: Optional[ParameterPoint] = None, spectrum=None) -> dict:
    A = np.asarray(entries, dtype=complex)
    record = {"n": 5, "entries": [complex_pair(z) for z in A.ravel()]}
    if point is not None:
        record["provenance"] = {
            "angles": list(point.angles),
            "spectrum": [complex_pair(z) for z in spectrum] if spectrum is not None else None,
        }
    return record


def _flatten(prefix: str, value, rows: list) -> None:
    # pairs [re, im] and lists of them become indexed rows
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif _is_pair(value):
        rows.append([prefix, "", "", format_float(value[0]), format_float(value[1])])
    elif isinstance(value, (list, tuple)) and value and all(_is_pair(v) for v in value):
        for i, v in enumerate(value, 1):
            rows.append([prefix, i, "", format_float(v[0]), format_float(v[1])])
    elif isinstance(value, (list, tuple)) and value and all(
        isinstance(v, (list, tuple)) and v and all(_is_pair(w) or w is None for w in v) for v in value
    ):
        for i, v in enumerate(value, 1):
            for j, w in enumerate(v, 1):
                if w is not None:
                    rows.append([prefix, i, j, format_float(w[0]), format_float(w[1])])
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value, 1):
            rows.append([prefix, i, "", _scalar(v), ""])
    else:
        rows.append([prefix, "", "", _scalar(value), ""])


def _is_pair(v) -> bool:
    return (
        isinstance(v, (list, tuple))
        and len(v) == 2
        and all(isinstance(x, (float, np.floating)) for x in v)
    )


def _scalar(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def dump_records_csv(record: dict) -> str:
    """Long-format CSV: one ``field,i,j,re,im`` row per number.

    Matrix entries are written as ``entries`` rows with 1-based row/column
    indices, so the output can be read back by ``read_matrix``.
    """
    record = dict(record)
    rows = []
    if "entries" in record:
        A = np.array([complex(*p) for p in record.pop("entries")]).reshape(5, 5)
        for i in range(5):
            for j in range(5):
                rows.append(["entries", i + 1, j + 1, format_float(A[i, j].real), format_float(A[i, j].imag)])
    _flatten("", record, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "i", "j", "re", "im"])
    writer.writerows(rows)
    return buf.getvalue()


def _pairs_to_complex(pairs, count: int, what: str) -> np.ndarray:
    try:
        values = np.array([complex(float(re), float(im)) for re, im in pairs])
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(f"{what}: expected [re, im] pairs ({exc})") from None
    if values.size != count:
        raise MatrixFileError(f"{what}: expected {count} values, found {values.size}")
    return values


def _from_json(data: dict):
    if data.get("n") != 5:
        raise MatrixFileError(f'"n" must be 5, got {data.get("n")!r}')
    entries = _pairs_to_complex(data.get("entries", []), 25, "entries").reshape(5, 5)
    point = spectrum = None
    prov = data.get("provenance")
    if prov:
        point = ParameterPoint.from_angles(*[float(a) for a in prov["angles"]])
        if prov.get("spectrum") is not None:
            spectrum = Spectrum(tuple(_pairs_to_complex(prov["spectrum"], 5, "provenance.spectrum")))
    return entries, point, spectrum


def _from_csv(text: str):
    entries = np.full((5, 5), np.nan, dtype=complex)
    angles = {}
    spectrum = {}
    for row in csv.DictReader(io.StringIO(text)):
        field = row["field"]
        if field == "entries":
            entries[int(row["i"]) - 1, int(row["j"]) - 1] = complex(float(row["re"]), float(row["im"]))
        elif field == "provenance.angles":
            angles[int(row["i"])] = float(row["re"])
        elif field == "provenance.spectrum":
            spectrum[int(row["i"])] = complex(float(row["re"]), float(row["im"]))
    if np.isnan(entries).any():
        raise MatrixFileError("CSV matrix is missing entries")
    point = ParameterPoint.from_angles(*(angles[k] for k in range(1, 5))) if len(angles) == 4 else None
    spec = Spectrum(tuple(spectrum[k] for k in range(1, 6))) if len(spectrum) == 5 else None
    return entries, point, spec


def loads_matrix(text: str):
    """Parse a matrix file; returns ``(entries, point or None, spectrum or None)``."""
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            return _from_json(json.loads(text))
        return _from_csv(text)
    except MatrixFileError:
        raise
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise MatrixFileError(f"malformed matrix file: {exc}") from None


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return loads_matrix(fh.read())
