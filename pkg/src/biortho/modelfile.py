"""JSON model files.

Schema (version 1)::

    {
      "schemaVersion": 1,
      "model": {"preset": "bit_by_bit"}
             | {"preset": "stern_gerlach", "latticeSize": 5, "shift": 1}
             | {"dimS": 2, "dimM": 2, "hInt": [[...]], "deltaT": 1.0,
                "readyState": [...], "pointerObservable": [[...]], "label": "..."},
      "systemState": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
      "sampleChanges": [{"classIndex": 0, "M": [[...]]}],
      "targets": {"systemBasis": [[...]], "pointerStates": [[...]]},
      "tolerances": {"degeneracy": 1e-9, "cutoff": 1e-12, "calibration": 1e-10}
    }

Complex numbers are ``[re, im]`` pairs (bare reals are accepted), matrices
are row-major nested lists, and the tensor ordering is system-first. In
``targets`` the basis vectors are the matrix columns.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import models, schmidt, tensor
from .errors import BiorthoError, DimensionError, IoError, SchemaError
from .measurement import MeasurementModel

SCHEMA_VERSION = 1
STATE_NORM_TOL = 1e-6
TOLERANCE_KEYS = ("degeneracy", "cutoff", "calibration")
PRESETS = ("bit_by_bit", "stern_gerlach")


@dataclass(eq=False)
class ModelFile:
    path: str
    digest: str
    schema_version: int
    model: MeasurementModel
    model_spec: dict
    system_state: np.ndarray
    sample_changes: list = field(default_factory=list)
    targets: tuple | None = None
    tolerances: dict = field(default_factory=dict)


class _Reader:
    def __init__(self, path, text):
        self.path = path
        self.text = text

    def line_of(self, key):
        pos = self.text.find(f'"{key}"')
        return self.text.count("\n", 0, pos) + 1 if pos >= 0 else 1

    def fail(self, where, message, exc=SchemaError):
        key = where.split(".")[-1].split("[")[0]
        raise exc(f"{self.path}:{self.line_of(key)}: {where}: {message}")

    def number(self, x, where):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            self.fail(where, f"expected a number, got {x!r}")
        if not np.isfinite(x):
            self.fail(where, "non-finite number")
        return float(x)

    def complex(self, x, where):
        if isinstance(x, list):
            if len(x) != 2:
                self.fail(where, f"complex numbers are [re, im] pairs, got {x!r}")
            return complex(self.number(x[0], where), self.number(x[1], where))
        return complex(self.number(x, where), 0.0)

    def vector(self, x, where):
        if not isinstance(x, list) or not x:
            self.fail(where, "expected a non-empty list of complex numbers")
        return np.array([self.complex(v, f"{where}[{i}]") for i, v in enumerate(x)])

    def matrix(self, x, where):
        if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
            self.fail(where, "expected a non-empty list of rows")
        width = len(x[0])
        rows = []
        for i, row in enumerate(x):
            if len(row) != width:
                self.fail(where, f"row {i} has {len(row)} entries, expected {width}", DimensionError)
            rows.append([self.complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
        return np.array(rows, dtype=np.complex128)

    def integer(self, x, where):
        if isinstance(x, bool) or not isinstance(x, int):
            self.fail(where, f"expected an integer, got {x!r}")
        return x


def _parse_model(r, spec):
    if not isinstance(spec, dict):
        r.fail("model", "expected an object")
    preset = spec.get("preset")
    if preset is not None:
        if preset == "bit_by_bit":
            return models.bit_by_bit_model()
        if preset == "stern_gerlach":
            n = r.integer(spec.get("latticeSize", 5), "model.latticeSize")
            k = r.integer(spec.get("shift", 1), "model.shift")
            try:
                return models.stern_gerlach_model(n, k)
            except BiorthoError as exc:
                r.fail("model.latticeSize", str(exc))
        r.fail("model.preset", f"unknown preset {preset!r}; expected one of {PRESETS}")

    for key in ("dimS", "dimM", "hInt", "deltaT", "readyState", "pointerObservable"):
        if key not in spec:
            r.fail(f"model.{key}", "missing field")
    dim_s = r.integer(spec["dimS"], "model.dimS")
    dim_m = r.integer(spec["dimM"], "model.dimM")
    if dim_s < 1 or dim_m < 1:
        r.fail("model.dimS", "dimensions must be positive", DimensionError)
    h = r.matrix(spec["hInt"], "model.hInt")
    z = r.matrix(spec["pointerObservable"], "model.pointerObservable")
    ready = r.vector(spec["readyState"], "model.readyState")
    delta_t = r.number(spec["deltaT"], "model.deltaT")
    n = dim_s * dim_m
    if h.shape != (n, n):
        r.fail("model.hInt", f"shape {h.shape} does not match dimS*dimM = {n}", DimensionError)
    if z.shape != (dim_m, dim_m):
        r.fail("model.pointerObservable", f"shape {z.shape}, expected {(dim_m, dim_m)}", DimensionError)
    if ready.size != dim_m:
        r.fail("model.readyState", f"{ready.size} entries, expected {dim_m}", DimensionError)
    if not tensor.is_hermitian(h):
        r.fail("model.hInt", "matrix hInt is not Hermitian")
    if not tensor.is_hermitian(z):
        r.fail("model.pointerObservable", "matrix pointerObservable is not Hermitian")
    if abs(np.linalg.norm(ready) - 1.0) > STATE_NORM_TOL:
        r.fail("model.readyState", "readyState is not normalized")
    ready = ready / np.linalg.norm(ready)
    return MeasurementModel(dim_s, dim_m, h, delta_t, ready, z, str(spec.get("label", "explicit")))


def parse_model_text(text, path="<string>"):
    """Validate the JSON document ``text``; see :func:`parse_model_file`."""
    r = _Reader(path, text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}:1: top level must be an object")
    version = doc.get("schemaVersion")
    if version != SCHEMA_VERSION:
        r.fail("schemaVersion", f"expected {SCHEMA_VERSION}, got {version!r}")
    if "model" not in doc:
        r.fail("model", "missing field")
    if "systemState" not in doc:
        r.fail("systemState", "missing field")

    model = _parse_model(r, doc["model"])
    state = r.vector(doc["systemState"], "systemState")
    if state.size != model.dim_s:
        r.fail("systemState", f"{state.size} amplitudes, expected dimS = {model.dim_s}", DimensionError)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        r.fail("systemState", f"norm {norm:.9g} is not 1")
    state = state / norm

    changes = []
    raw_changes = doc.get("sampleChanges", [])
    if not isinstance(raw_changes, list):
        r.fail("sampleChanges", "expected a list")
    for i, item in enumerate(raw_changes):
        where = f"sampleChanges[{i}]"
        if not isinstance(item, dict) or "M" not in item:
            r.fail(where, "expected an object with field M")
        m = r.matrix(item["M"], f"{where}.M")
        index = r.integer(item.get("classIndex", 0), f"{where}.classIndex")
        try:
            changes.append(schmidt.BasisChange(m, index))
        except BiorthoError as exc:
            r.fail(f"{where}.M", str(exc))

    targets = None
    if "targets" in doc:
        t = doc["targets"]
        if not isinstance(t, dict) or "systemBasis" not in t or "pointerStates" not in t:
            r.fail("targets", "expected an object with systemBasis and pointerStates")
        a = r.matrix(t["systemBasis"], "targets.systemBasis")
        z = r.matrix(t["pointerStates"], "targets.pointerStates")
        if a.shape != (model.dim_s, model.dim_s):
            r.fail("targets.systemBasis", f"shape {a.shape}, expected {(model.dim_s,) * 2}", DimensionError)
        if z.shape != (model.dim_m, model.dim_s):
            r.fail("targets.pointerStates", f"shape {z.shape}, expected {(model.dim_m, model.dim_s)}",
                   DimensionError)
        targets = (a, z)

    tolerances = {}
    raw_tol = doc.get("tolerances", {})
    if not isinstance(raw_tol, dict):
        r.fail("tolerances", "expected an object")
    for key, value in raw_tol.items():
        if key not in TOLERANCE_KEYS:
            r.fail(f"tolerances.{key}", f"unknown tolerance; expected one of {TOLERANCE_KEYS}")
        tolerances[key] = r.number(value, f"tolerances.{key}")
        if tolerances[key] <= 0:
            r.fail(f"tolerances.{key}", "must be positive")

    spec = doc["model"]
    return ModelFile(
        path=path,
        digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        schema_version=version,
        model=model,
        model_spec=spec,
        system_state=state,
        sample_changes=changes,
        targets=targets,
        tolerances=tolerances,
    )


def parse_model_file(path):
    """Read and validate a model file.

    Raises
    ------
    IoError
        The file cannot be read or is not UTF-8.
    SchemaError, DimensionError
        Validation failed; the message carries ``path:line: field: reason``.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        text = raw.decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"{path}: {exc}") from None
    mf = parse_model_text(text, str(path))
    mf.digest = hashlib.sha256(raw).hexdigest()
    return mf
