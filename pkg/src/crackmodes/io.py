"""CSV and JSON artifacts, schema validation and the on-disk block cache."""
from __future__ import annotations

import csv
import functools
import hashlib
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

SCHEMA_VERSION = "1.0"
CACHE_VERSION = 1

HEADERS = {
    "dispersion": ("xi", "branch", "omega", "residual"),
    "mode": ("x2", "re_u1", "im_u1", "re_u2", "im_u2"),
    "symbol": ("xi", "omega_re", "omega_im", "m_re", "m_im"),
    "eigen": ("class", "ell", "lambda", "gap", "route", "residual"),
    "matrix": ("i", "j", "value"),
}


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, kind: str, rows) -> Path:
    """Write ``rows`` under the fixed header of ``kind``; returns the path."""
    header = HEADERS[kind]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row of length {len(row)} for header {header}")
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def dispersion_rows(points):
    return [(p.xi, p.k, p.omega, p.residual) for p in points]


def mode_rows(x2, u):
    u = np.asarray(u)
    return [(x, u[0, i].real, u[0, i].imag, u[1, i].real, u[1, i].imag) for i, x in enumerate(np.asarray(x2))]


def symbol_rows(xi, omega, values):
    omega = complex(omega)
    return [(x, omega.real, omega.imag, complex(v).real, complex(v).imag) for x, v in zip(xi, values)]


def eigen_rows(results):
    return [(r.label, r.ell, r.lam, r.gap, r.route, r.mu1_residual) for r in results]


def matrix_rows(A):
    A = np.asarray(A)
    return [(i, j, A[i, j]) for i in range(A.shape[0]) for j in range(A.shape[1])]


# ---------------------------------------------------------------------------
# JSON


@functools.lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files("crackmodes").joinpath("schema/artifacts.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _plain(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": _plain(obj.real), "im": _plain(obj.imag)}
    return obj


def document(kind: str, payload: dict) -> dict:
    """Wrap ``payload`` with the schema version and kind tag and validate it."""
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    doc.update(_plain(payload))
    validate(doc)
    return doc


def validate(doc: dict) -> None:
    jsonschema.validate(doc, load_schema())


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, kind: str, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document(kind, payload)), encoding="utf-8")
    return path


def read_json(path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    validate(doc)
    return doc


def write_block(directory, stem: str, block, dimension: int, N: int) -> dict:
    """Dense ``i,j,value`` files for Q, Q0 and M plus the JSON sidecar."""
    directory = Path(directory)
    files = {}
    for name, A in (("Q", block.Q_matrix), ("Q0", block.Q0_matrix), ("M", block.M_matrix)):
        p = write_csv(directory / f"{stem}_{name}.csv", "matrix", matrix_rows(A))
        files[name] = p.name
    sidecar = {
        "basis": {"label": block.label, "dimension": dimension, "N": N},
        "ell": block.ell,
        "omega": block.omega,
        "gap": block.gap,
        "N": N,
        "shape": list(block.Q_matrix.shape),
        "files": files,
        "meta": block.meta,
    }
    write_json(directory / f"{stem}.json", "matrix", sidecar)
    return sidecar


# ---------------------------------------------------------------------------
# binary cache of assembled blocks


class BlockCache:
    """``.npz`` store of assembled blocks keyed by ``(class, ell, gap, N)`` and the cache version."""

    def __init__(self, directory):
        self.directory = Path(directory)

    @staticmethod
    def key(label: str, ell: float, gap: float, N: int) -> str:
        raw = f"v{CACHE_VERSION}|{label}|{float(ell).hex()}|{float(gap).hex()}|{int(N)}"
        return hashlib.sha256(raw.encode()).hexdigest()[:32]

    def _path(self, label, ell, gap, N) -> Path:
        return self.directory / f"{self.key(label, ell, gap, N)}.npz"

    def load(self, label, ell, gap, N):
        p = self._path(label, ell, gap, N)
        if not p.exists():
            return None
        with np.load(p, allow_pickle=False) as data:
            if int(data["version"]) != CACHE_VERSION:
                return None
            out = {k: data[k] for k in ("Q", "Q0", "M", "f")}
            out["meta"] = json.loads(str(data["meta"]))
            return out

    def store(self, label, ell, gap, N, Q, Q0, M, f, meta=None) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        p = self._path(label, ell, gap, N)
        np.savez(p, version=CACHE_VERSION, Q=Q, Q0=Q0, M=M, f=f, meta=np.array(json.dumps(_plain(meta or {}))))
        return p
