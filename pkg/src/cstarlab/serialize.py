"""JSON persistence for every value the laboratory produces.

Matrices are stored densely as parallel row-major real and imaginary lists,
so a round trip is bit-exact at double precision (Python emits
shortest-round-trip decimal literals).  Every composite object carries a
"kind" tag and a "schema_version"; the loader dispatches on the tag and
reports schema violations with the JSON path of the offending field.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import ConcreteAlgebra, FDAlgebra
from .certs import Certificate
from .cpmaps import LinMap
from .geometry import DistanceInterval, NearInclusionCert, SampleSpec
from .orderzero import NucDimDecomposition, OrderZeroMap

__all__ = [
    "SchemaError",
    "matrix_to_json",
    "matrix_from_json",
    "to_jsonable",
    "from_jsonable",
    "save",
    "load",
    "dumps",
    "loads",
]


class SchemaError(ValueError):
    """A JSON document that does not match the expected schema; the message
    names the path of the offending field."""


def _need(d: dict, key: str, path: str):
    if key not in d:
        raise SchemaError(f"missing field {path}.{key}")
    return d[key]


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("only two-dimensional arrays are stored")
    return {"kind": "matrix", "schema_version": 1,
            "rows": m.shape[0], "cols": m.shape[1],
            "re": [float(v) for v in m.real.reshape(-1)],
            "im": [float(v) for v in m.imag.reshape(-1)]}


def matrix_from_json(d: dict, path: str = "$") -> np.ndarray:
    rows, cols = _need(d, "rows", path), _need(d, "cols", path)
    re, im = _need(d, "re", path), _need(d, "im", path)
    if not (isinstance(rows, int) and isinstance(cols, int)
            and rows >= 0 and cols >= 0):
        raise SchemaError(f"invalid shape at {path}.rows/cols")
    if len(re) != rows * cols:
        raise SchemaError(f"{path}.re has {len(re)} entries, expected {rows * cols}")
    if len(im) != rows * cols:
        raise SchemaError(f"{path}.im has {len(im)} entries, expected {rows * cols}")
    m = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    return m.reshape(rows, cols)


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def to_jsonable(obj):
    """Convert a laboratory value into plain JSON-ready data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Certificate):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, SampleSpec):
        return obj.to_dict()
    if isinstance(obj, FDAlgebra):
        return {"kind": "fd_algebra", "schema_version": 1,
                "block_sizes": list(obj.block_sizes)}
    if isinstance(obj, ConcreteAlgebra):
        return {"kind": "concrete_algebra", "schema_version": 1,
                "ambient_dim": obj.ambient_dim,
                "basis": [matrix_to_json(b) for b in obj.basis],
                "support": matrix_to_json(obj.support)}
    if isinstance(obj, LinMap):
        return {"kind": "lin_map", "schema_version": 1,
                "domain": to_jsonable(obj.domain),
                "codomain_dim": obj.codomain_dim,
                "images": [matrix_to_json(m) for m in obj.images],
                "codomain_algebra": to_jsonable(obj.codomain_algebra)}
    if isinstance(obj, OrderZeroMap):
        return {"kind": "order_zero_map", "schema_version": 1,
                "map": to_jsonable(obj.map), "pi": to_jsonable(obj.pi),
                "h": matrix_to_json(obj.h)}
    if isinstance(obj, NucDimDecomposition):
        return {"kind": "nucdim_decomposition", "schema_version": 1,
                "F": to_jsonable(obj.F),
                "pieces": [list(g) for g in obj.pieces],
                "down": to_jsonable(obj.down),
                "ups": [to_jsonable(u) for u in obj.ups],
                "defect": float(obj.defect),
                "composite_cpc": bool(obj.composite_cpc)}
    if isinstance(obj, NearInclusionCert):
        return {"kind": "near_inclusion", "schema_version": 1,
                "gamma_hi": obj.gamma_hi, "gamma_lo": obj.gamma_lo,
                "direction": obj.direction,
                "n_witnesses": len(obj.witnesses),
                "sample_spec": obj.sample_spec.to_dict()}
    if isinstance(obj, DistanceInterval):
        return {"kind": "distance_interval", "schema_version": 1,
                "lo": obj.lo, "hi": obj.hi,
                "cert_ab": to_jsonable(obj.cert_ab),
                "cert_ba": to_jsonable(obj.cert_ba)}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def from_jsonable(d, path: str = "$"):
    """Rebuild a laboratory value from tagged JSON data; plain values and
    untagged containers come back as-is."""
    if isinstance(d, list):
        return [from_jsonable(v, f"{path}[{i}]") for i, v in enumerate(d)]
    if not isinstance(d, dict):
        return d
    kind = d.get("kind")
    if kind is None:
        return {k: from_jsonable(v, f"{path}.{k}") for k, v in d.items()}
    if kind == "matrix":
        return matrix_from_json(d, path)
    if kind == "fd_algebra":
        sizes = _need(d, "block_sizes", path)
        return FDAlgebra(tuple(int(n) for n in sizes))
    if kind == "concrete_algebra":
        basis = [matrix_from_json(b, f"{path}.basis[{i}]")
                 for i, b in enumerate(_need(d, "basis", path))]
        support = matrix_from_json(_need(d, "support", path), f"{path}.support")
        return ConcreteAlgebra(ambient_dim=int(_need(d, "ambient_dim", path)),
                               basis=tuple(basis), support=support)
    if kind == "lin_map":
        dom = from_jsonable(_need(d, "domain", path), f"{path}.domain")
        images = [matrix_from_json(m, f"{path}.images[{i}]")
                  for i, m in enumerate(_need(d, "images", path))]
        cod = from_jsonable(d.get("codomain_algebra"), f"{path}.codomain_algebra")
        return LinMap(dom, int(_need(d, "codomain_dim", path)), tuple(images),
                      codomain_algebra=cod)
    if kind == "order_zero_map":
        return OrderZeroMap(
            map=from_jsonable(_need(d, "map", path), f"{path}.map"),
            pi=from_jsonable(_need(d, "pi", path), f"{path}.pi"),
            h=matrix_from_json(_need(d, "h", path), f"{path}.h"))
    if kind == "nucdim_decomposition":
        return NucDimDecomposition(
            F=from_jsonable(_need(d, "F", path), f"{path}.F"),
            pieces=tuple(tuple(int(k) for k in g) for g in _need(d, "pieces", path)),
            down=from_jsonable(_need(d, "down", path), f"{path}.down"),
            ups=tuple(from_jsonable(u, f"{path}.ups[{i}]")
                      for i, u in enumerate(_need(d, "ups", path))),
            defect=float(_need(d, "defect", path)),
            composite_cpc=bool(d.get("composite_cpc", True)))
    if kind == "certificate":
        return Certificate.from_dict(d)
    if kind == "instance":
        from .instances import Instance
        tu = d.get("true_unitary")
        return Instance(
            A=from_jsonable(_need(d, "A", path), f"{path}.A"),
            B=from_jsonable(_need(d, "B", path), f"{path}.B"),
            recipe=str(_need(d, "recipe", path)),
            params=from_jsonable(_need(d, "params", path), f"{path}.params"),
            true_unitary=None if tu is None else matrix_from_json(tu, f"{path}.true_unitary"),
            seed=int(_need(d, "seed", path)))
    # reports and other tagged summaries come back as plain dicts
    return {k: from_jsonable(v, f"{path}.{k}") for k, v in d.items()}


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                          f"{exc.msg}") from exc
    return from_jsonable(data)


def save(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
