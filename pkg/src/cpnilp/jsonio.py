"""JSON instance files.

Complex scalars are ``[re, im]`` pairs and matrices are arrays of rows. Floats
are written with Python's shortest round-trip repr, so load(dump(x)) == x
bit for bit.

Instance file layout::

    {"schema_version": "1", "kind": "kraus_map", "payload": {"dim": n, "kraus": [...]}}
    {"schema_version": "1", "kind": "root_candidate",
     "payload": {"dim": n, "kraus": [...], "u": [[re, im], ...], "p": p}}
    {"schema_version": "1", "kind": "vector", "payload": [x_1, ..., x_n]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .cpmap import KrausMap
from .errors import CPNilpError
from .roots import RootCandidate

SCHEMA_VERSION = "1"
KINDS = ("kraus_map", "root_candidate", "vector")


class SchemaError(CPNilpError, ValueError):
    """Malformed or unsupported instance file."""


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(A) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(A)]


def _decode_complex(v) -> complex:
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        raise SchemaError(f"complex scalar must be [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError("matrix must be a nonempty array of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError("matrix rows have unequal lengths")
    return np.array([[_decode_complex(v) for v in r] for r in rows], dtype=complex)


def _check_keys(obj: dict, required: set, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be a JSON object")
    keys = set(obj)
    if keys - required:
        raise SchemaError(f"unknown fields in {where}: {sorted(keys - required)}")
    if required - keys:
        raise SchemaError(f"missing fields in {where}: {sorted(required - keys)}")


def encode_kraus_map(alpha: KrausMap) -> dict:
    return {"dim": alpha.dim, "kraus": [encode_matrix(L) for L in alpha.kraus]}


def decode_kraus_map(obj: dict, extra: frozenset = frozenset()) -> KrausMap:
    _check_keys(obj, {"dim", "kraus"} | extra, "payload")
    n = obj["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("dim must be a positive integer")
    if not isinstance(obj["kraus"], list) or not obj["kraus"]:
        raise SchemaError("kraus must be a nonempty array of matrices")
    ops = [decode_matrix(m) for m in obj["kraus"]]
    if any(L.shape != (n, n) for L in ops):
        raise SchemaError(f"every Kraus operator must be {n}x{n}")
    return KrausMap(ops)


def encode_root(r: RootCandidate) -> dict:
    if not isinstance(r.tau, KrausMap):
        raise TypeError("convert τ to Kraus form before serializing (roots.root_kraus)")
    body = encode_kraus_map(r.tau)
    body["u"] = [encode_complex(z) for z in r.u]
    body["p"] = r.order_claim
    return body


def decode_root(obj: dict) -> RootCandidate:
    tau = decode_kraus_map(obj, frozenset({"u", "p"}))
    if not isinstance(obj["u"], list):
        raise SchemaError("u must be an array of complex scalars")
    u = np.array([_decode_complex(v) for v in obj["u"]], dtype=complex)
    p = obj["p"]
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise SchemaError("p must be a positive integer")
    try:
        return RootCandidate(tau, u, p)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def decode_vector(obj) -> np.ndarray:
    if (not isinstance(obj, list) or not obj
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in obj)):
        raise SchemaError("vector payload must be a nonempty array of reals")
    return np.array(obj, dtype=float)


Instance = Union[KrausMap, RootCandidate, np.ndarray]


def to_document(obj: Instance) -> dict:
    if isinstance(obj, KrausMap):
        kind, payload = "kraus_map", encode_kraus_map(obj)
    elif isinstance(obj, RootCandidate):
        kind, payload = "root_candidate", encode_root(obj)
    else:
        kind, payload = "vector", [float(v) for v in np.asarray(obj, dtype=float)]
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": payload}


def from_document(doc: Any) -> tuple[str, Instance]:
    _check_keys(doc, {"schema_version", "kind", "payload"}, "instance file")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    kind = doc["kind"]
    if kind == "kraus_map":
        return kind, decode_kraus_map(doc["payload"])
    if kind == "root_candidate":
        return kind, decode_root(doc["payload"])
    if kind == "vector":
        return kind, decode_vector(doc["payload"])
    raise SchemaError(f"unknown kind {kind!r}; expected one of {KINDS}")


def dumps(obj: Instance) -> str:
    return json.dumps(to_document(obj), indent=1)


def loads(text: str) -> tuple[str, Instance]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return from_document(doc)


def save(obj: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def load(path: Union[str, Path]) -> tuple[str, Instance]:
    return loads(Path(path).read_text(encoding="utf-8"))
