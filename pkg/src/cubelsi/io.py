"""File formats for functions, relations and reports.

Function files are a JSON header ``{n, d, encoding}`` followed by either an
inline row-major ``values`` array (``encoding: "inline"``) or a sidecar file of
little-endian float64 values (``encoding: "binary"``, path in ``blob``,
relative to the header).
"""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .cube import CubeFunction
from .errors import ArgumentError
from .quotient import relation_from_pairs
from .symgroup import PermFunction

_LE = np.dtype("<f8")


def _write_table(path, header, values, encoding):
    path = Path(path)
    header = dict(header, encoding=encoding)
    if encoding == "inline":
        header["values"] = values.tolist()
    elif encoding == "binary":
        blob = path.with_suffix(".bin")
        values.astype(_LE).tofile(blob)
        header["blob"] = blob.name
    else:
        raise ArgumentError(f"unknown encoding {encoding!r}")
    path.write_text(json.dumps(header, indent=1) + "\n")
    return path


def _read_table(path, rows):
    path = Path(path)
    header = json.loads(path.read_text())
    d = int(header["d"])
    enc = header.get("encoding", "inline")
    if enc == "inline":
        vals = np.asarray(header["values"], dtype=np.float64).reshape(rows, d)
    elif enc == "binary":
        vals = np.fromfile(path.parent / header["blob"], dtype=_LE)
        if vals.size != rows * d:
            raise ArgumentError(f"blob has {vals.size} values, expected {rows * d}")
        vals = vals.reshape(rows, d).astype(np.float64)
    else:
        raise ArgumentError(f"unknown encoding {enc!r}")
    return header, vals


def save_function(f, path, encoding="inline"):
    return _write_table(path, {"n": f.n, "d": f.d}, f.values, encoding)


def load_function(path):
    header = json.loads(Path(path).read_text())
    _, vals = _read_table(path, 1 << int(header["n"]))
    return CubeFunction(int(header["n"]), vals)


def save_perm_function(f, path, encoding="binary"):
    return _write_table(path, {"n": f.n, "d": f.d}, f.values, encoding)


def load_perm_function(path):
    header = json.loads(Path(path).read_text())
    n = int(header["n"])
    _, vals = _read_table(path, math.factorial(n))
    return PermFunction(n, vals)


def relation_pairs(rel):
    """A spanning set of pairs: each point joined to the first point of its class."""
    first = {}
    pairs = []
    for u, c in enumerate(rel.class_of.tolist()):
        if c in first:
            pairs.append([first[c], u])
        else:
            first[c] = u
    return pairs


def save_relation(rel, path):
    Path(path).write_text(json.dumps({"n": rel.n, "pairs": relation_pairs(rel)}) + "\n")


def load_relation(path):
    data = json.loads(Path(path).read_text())
    return relation_from_pairs(int(data["n"]), [tuple(p) for p in data["pairs"]])


def _plain(x):
    """Make numpy scalars, enums and non-finite floats JSON-safe."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(x, "value") and not isinstance(x, (int, str)):
        return x.value
    return x


def to_json(obj):
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def report_record(report, seed=None, witness_path=None):
    rid = getattr(report.id, "value", report.id)
    return {"id": rid, "params": report.params, "lhs": report.lhs,
            "rhs_unit": report.rhs_unit, "ratio": report.ratio, "seed": seed,
            "witness_path": None if witness_path is None else str(witness_path)}


def write_csv(path, rows, fields=None):
    rows = [_plain(r) for r in rows]
    fields = fields or sorted({k for r in rows for k in r})
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in fields})
