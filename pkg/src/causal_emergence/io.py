"""Reading and writing TPMs and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError
from .tpm import Tpm, tpm_from_rows


def tpm_to_dict(tpm: Tpm) -> dict:
    return {
        "n": tpm.n,
        "labels": [sorted(lab) for lab in tpm.labels],
        "rows": tpm.rows.tolist(),
    }


def tpm_from_dict(data) -> Tpm:
    if not isinstance(data, dict) or "rows" not in data:
        raise ParseError("TPM JSON must be an object with a 'rows' field")
    rows = data["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("'rows' must be a list of lists")
    if "n" in data and data["n"] != len(rows):
        raise ParseError(f"'n' is {data['n']} but there are {len(rows)} rows")
    try:
        rows = [[float(x) for x in r] for r in rows]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric entry in rows: {exc}") from exc
    return tpm_from_rows(rows, data.get("labels"))


def parse_tpm_csv(text: str) -> Tpm:
    rows = []
    for line in csv.reader(io.StringIO(text)):
        if not line or all(not c.strip() for c in line):
            continue
        try:
            rows.append([float(c) for c in line])
        except ValueError as exc:
            raise ParseError(f"bad CSV entry: {exc}") from exc
    if not rows:
        raise ParseError("empty CSV")
    return tpm_from_rows(rows)


def read_tpm(path: str | Path) -> Tpm:
    """Load a TPM from JSON or CSV; the format is picked by content."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if text.lstrip().startswith(("{", "[")) or str(path).endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON in {path}: {exc}") from exc
        return tpm_from_dict(data)
    return parse_tpm_csv(text)


def tpm_to_csv(tpm: Tpm) -> str:
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in tpm.rows)


def write_tpm(tpm: Tpm, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".csv":
        path.write_text(tpm_to_csv(tpm), encoding="utf-8")
    else:
        path.write_text(dumps(tpm_to_dict(tpm)), encoding="utf-8")


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2) + "\n"


def fmt(x) -> str:
    """CSV float formatting: 12 significant digits, blank for missing."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return f"{x:.12g}"


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def load_schema(name: str) -> dict:
    ref = resources.files("causal_emergence") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))
