"""Reading and writing model files (JSON, schema version 1).

Complex scalars are ``[re, im]`` pairs and matrices are nested row-major
lists. Every validation failure raises :class:`SchemaError` naming the
field path, e.g. ``observables.A[0][1][0]``.
"""

import json

import numpy as np

from .config import Tolerances
from .errors import SchemaError, URError
from .gaussian import GaussianMoments, LinearChannel, LinearObservable
from .model import FiniteModel, GaussianModel
from .operators import QuantumState

SCHEMA_VERSION = 1


def _get(d, key, path, kind=None):
    if not isinstance(d, dict):
        raise SchemaError(path or "<root>", "expected an object")
    if key not in d:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    value = d[key]
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool)):
        raise SchemaError(f"{path}.{key}" if path else key, f"expected {_kind_name(kind)}")
    return value


def _kind_name(kind):
    names = {dict: "an object", list: "an array", str: "a string", int: "an integer",
             (int, float): "a number"}
    return names.get(kind, str(kind))


def _real(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(path, "expected a number")
    return float(x)


def _complex(x, path):
    if not (isinstance(x, list) and len(x) == 2):
        raise SchemaError(path, "expected a complex number as [re, im]")
    return complex(_real(x[0], f"{path}[0]"), _real(x[1], f"{path}[1]"))


def _vector(x, path, parse, size=None):
    if not isinstance(x, list) or not x:
        raise SchemaError(path, "expected a non-empty array")
    if size is not None and len(x) != size:
        raise SchemaError(path, f"expected {size} entries, got {len(x)}")
    return [parse(v, f"{path}[{i}]") for i, v in enumerate(x)]


def _matrix(x, path, parse, size=None):
    rows = _vector(x, path, lambda r, p: r, size)
    n = len(rows)
    return [_vector(r, f"{path}[{i}]", parse, n) for i, r in enumerate(rows)]


def complex_matrix(x, path, size=None):
    return np.array(_matrix(x, path, _complex, size), dtype=complex)


def real_matrix(x, path, size=None):
    return np.array(_matrix(x, path, _real, size), dtype=float)


def _wrap(path, fn, *args):
    """Re-raise library validation errors against a field path."""
    try:
        return fn(*args)
    except SchemaError:
        raise
    except URError as exc:
        raise SchemaError(path, str(exc)) from exc


def _tolerances(doc):
    raw = doc.get("tolerances")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise SchemaError("tolerances", "expected an object")
    fields = Tolerances().as_dict()
    out = {}
    for key, value in raw.items():
        if key not in fields:
            raise SchemaError(f"tolerances.{key}", f"unknown tolerance; expected one of {sorted(fields)}")
        out[key] = _real(value, f"tolerances.{key}")
    return out


def _finite_state(d, path):
    dim = _get(d, "dim", path, int)
    if dim < 1:
        raise SchemaError(f"{path}.dim", "must be positive")
    state = _get(d, "state", path, dict)
    kind = _get(state, "kind", f"{path}.state", str)
    if kind == "pure":
        v = np.array(_vector(_get(state, "vector", f"{path}.state"), f"{path}.state.vector", _complex, dim))
        return dim, _wrap(f"{path}.state.vector", QuantumState.pure, v)
    if kind == "density":
        rho = complex_matrix(_get(state, "matrix", f"{path}.state"), f"{path}.state.matrix", dim)
        return dim, _wrap(f"{path}.state.matrix", QuantumState.density, rho)
    raise SchemaError(f"{path}.state.kind", "expected 'pure' or 'density'")


def _parse_finite(doc):
    _, obj = _finite_state(_get(doc, "object", "", dict), "object")
    _, probe = _finite_state(_get(doc, "probe", "", dict), "probe")
    obs = _get(doc, "observables", "", dict)
    ops = {}
    for label, dim in (("A", obj.dim), ("B", obj.dim), ("M", probe.dim)):
        lst = _get(obs, label, "observables", list)
        ops[label] = [complex_matrix(m, f"observables.{label}[{i}]", dim) for i, m in enumerate(lst)]
    inter = _get(doc, "interaction", "", dict)
    u = complex_matrix(_get(inter, "unitary", "interaction"), "interaction.unitary", obj.dim * probe.dim)
    return FiniteModel(obj, probe, ops["A"], ops["B"], ops["M"], u, name=doc.get("name", "custom"))


def _moments(d, path):
    modes = _get(d, "modes", path, int)
    if modes < 1:
        raise SchemaError(f"{path}.modes", "must be positive")
    mean = _vector(_get(d, "mean", path), f"{path}.mean", _real, 2 * modes)
    cov = real_matrix(_get(d, "cov", path), f"{path}.cov", 2 * modes)
    return _wrap(f"{path}.cov", GaussianMoments, mean, cov)


def _parse_gaussian(doc):
    c = _real(_get(doc, "comm_constant", ""), "comm_constant")
    if c <= 0:
        raise SchemaError("comm_constant", "must be positive")
    obj = _moments(_get(doc, "object", "", dict), "object")
    probe = _moments(_get(doc, "probe", "", dict), "probe")
    obs = _get(doc, "observables", "", dict)
    parsed = {}
    for label, size in (("A", obj.size), ("B", obj.size), ("M", probe.size)):
        lst = _get(obs, label, "observables", list)
        out = []
        for i, u in enumerate(lst):
            p = f"observables.{label}[{i}]"
            coeffs = _vector(_get(u, "coeffs", p), f"{p}.coeffs", _real, size)
            offset = _real(u.get("offset", 0.0), f"{p}.offset") if isinstance(u, dict) else 0.0
            out.append(LinearObservable(coeffs, offset))
        parsed[label] = out
    inter = _get(doc, "interaction", "", dict)
    s = real_matrix(_get(inter, "channel", "interaction"), "interaction.channel", obj.size + probe.size)
    channel = _wrap("interaction.channel", LinearChannel, s)
    return GaussianModel(obj, probe, parsed["A"], parsed["B"], parsed["M"], channel, c,
                         name=doc.get("name", "custom"))


def parse_model(doc):
    """Build a model from a decoded document.

    Returns ``(model, tolerance_overrides_or_None, seed_or_None)``.
    """
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "expected an object")
    version = _get(doc, "schema", "", int)
    if version != SCHEMA_VERSION:
        raise SchemaError("schema", f"unsupported version {version}; expected {SCHEMA_VERSION}")
    if "name" in doc and not isinstance(doc["name"], str):
        raise SchemaError("name", "expected a string")
    backend = _get(doc, "backend", "", str)
    if backend == "finite":
        model = _parse_finite(doc)
    elif backend == "gaussian":
        model = _parse_gaussian(doc)
    else:
        raise SchemaError("backend", "expected 'finite' or 'gaussian'")
    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise SchemaError("seed", "expected an integer")
    return model, _tolerances(doc), seed


def load_model(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"invalid JSON: {exc}") from exc
    return parse_model(doc)


def _enc_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def _enc_cmatrix(m):
    return [[_enc_complex(z) for z in row] for row in np.asarray(m)]


def _enc_state(state):
    if state.kind == "pure":
        return {"kind": "pure", "vector": [_enc_complex(z) for z in state.data]}
    return {"kind": "density", "matrix": _enc_cmatrix(state.data)}


def model_to_doc(model, tolerances=None, seed=None) -> dict:
    doc = {"schema": SCHEMA_VERSION, "name": model.name, "backend": model.backend}
    if model.backend == "finite":
        doc["object"] = {"dim": model.object_dim, "state": _enc_state(model.object_state)}
        doc["probe"] = {"dim": model.probe_dim, "state": _enc_state(model.probe_state)}
        doc["observables"] = {k: [_enc_cmatrix(o) for o in getattr(model, k)] for k in ("A", "B", "M")}
        doc["interaction"] = {"unitary": _enc_cmatrix(model.unitary)}
    else:
        doc["comm_constant"] = model.comm_constant
        for key, mom in (("object", model.object_moments), ("probe", model.probe_moments)):
            doc[key] = {"modes": mom.size // 2, "mean": mom.mean.tolist(), "cov": mom.cov.tolist()}
        doc["observables"] = {k: [{"coeffs": u.coeffs.tolist(), "offset": u.offset} for u in getattr(model, k)]
                              for k in ("A", "B", "M")}
        doc["interaction"] = {"channel": model.channel.matrix.tolist()}
    if tolerances is not None:
        doc["tolerances"] = dict(tolerances)
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def dump_model(model, path, tolerances=None, seed=None):
    with open(path, "w") as fh:
        json.dump(model_to_doc(model, tolerances, seed), fh, indent=1)
        fh.write("\n")
