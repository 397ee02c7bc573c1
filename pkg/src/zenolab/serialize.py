"""JSON wire formats for matrices, models and Zeno structures.

A matrix is ``{"dim": n, "entries": [[re, im], ...]}`` with the ``n * n``
entries in row-major order.
"""

from __future__ import annotations

import json

import numpy as np

from .engine import ZenoStructure
from .linalg import as_matrix
from .models import ModelInstance


def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    flat = m.reshape(-1)
    return {"dim": int(m.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(d: dict) -> np.ndarray:
    n = int(d["dim"])
    entries = d["entries"]
    if len(entries) != n * n:
        raise ValueError(f"matrix of dim {n} needs {n * n} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return as_matrix(flat.reshape(n, n))


def model_to_json(m: ModelInstance) -> dict:
    return {"label": m.label, "seed": m.seed, "H": matrix_to_json(m.H), "U1": matrix_to_json(m.U1)}


def model_from_json(d: dict) -> ModelInstance:
    return ModelInstance(matrix_from_json(d["H"]), matrix_from_json(d["U1"]),
                         label=d.get("label", "file"), seed=d.get("seed"))


def zeno_structure_to_json(zs: ZenoStructure) -> dict:
    return {
        "phases": [float(p) for p in zs.decomposition.phases],
        "projectors": [matrix_to_json(p) for p in zs.decomposition.projectors],
        "HZ": matrix_to_json(zs.HZ),
        "sourceH": matrix_to_json(zs.source_H),
    }


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
