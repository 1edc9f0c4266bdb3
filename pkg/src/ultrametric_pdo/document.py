"""JSON tree-spec documents.

A document is an object with keys::

    vertices     {id: [child ids]}            required; leaves may be omitted
    root         id                           optional, checked if given
    leaf_masses  {leaf: mass}                 exactly one of leaf_masses /
    measure      {"type": "homogeneous", "total": x}       measure
    metric       {"type": "standard", "reference": id}     optional
                 {"type": "padic", "p": x}
                 {"type": "table", "diameters": {id: x}}
    kernel       {"type": "table", "values": {id: x}}      optional
                 {"type": "power", "alpha": x}

Complex kernel values are written as ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from numbers import Real

import numpy as np

from . import metric as _metric
from .exceptions import DuplicateId, SpecFormatError
from .measure import BallMeasure, from_leaf_masses, homogeneous_measure
from .pdo import Kernel, power_kernel, table_kernel
from .tree import DirectedTree, build_tree

__all__ = ["TreeDocument", "load_document", "parse_document", "parse_kernel", "loads", "dumps", "write_json"]

TOP_KEYS = {"vertices", "root", "leaf_masses", "measure", "metric", "kernel"}


@dataclass(frozen=True, eq=False)
class TreeDocument:
    tree: DirectedTree
    measure: BallMeasure
    assignment: _metric.UltrametricAssignment | None = None
    kernel: Kernel | None = None

    @property
    def metric_or_standard(self) -> _metric.UltrametricAssignment:
        return self.assignment if self.assignment is not None else _metric.standard_assignment(self.tree)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DuplicateId(f"key {k!r} appears twice")
        out[k] = v
    return out


def loads(text: str):
    """``json.loads`` that rejects duplicate object keys."""
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"malformed JSON: {e}") from None


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as e:
        raise SpecFormatError(f"cannot read {path}: {e.strerror}") from None


def load_document(path) -> TreeDocument:
    return parse_document(load_json(path))


def _obj(x, what, keys=None, required=()):
    if not isinstance(x, dict):
        raise SpecFormatError(f"{what} must be a JSON object")
    if keys is not None:
        unknown = set(x) - set(keys)
        if unknown:
            raise SpecFormatError(f"unknown key {sorted(unknown)[0]!r} in {what}")
    for k in required:
        if k not in x:
            raise SpecFormatError(f"{what} is missing {k!r}")
    return x


def _real(x, what):
    if isinstance(x, bool) or not isinstance(x, Real):
        raise SpecFormatError(f"{what} must be a number, got {x!r}")
    return float(x)


def _number(x, what):
    if isinstance(x, list) and len(x) == 2:
        return complex(_real(x[0], what), _real(x[1], what))
    return _real(x, what)


def _real_map(x, what):
    return {k: _real(v, f"{what}[{k!r}]") for k, v in _obj(x, what).items()}


def parse_document(doc) -> TreeDocument:
    _obj(doc, "document", TOP_KEYS, ("vertices",))
    vertices = _obj(doc["vertices"], "vertices")
    for v, kids in vertices.items():
        if not isinstance(kids, list):
            raise SpecFormatError(f"children of {v!r} must be a list")
    root = doc.get("root")
    if root is not None and not isinstance(root, str):
        raise SpecFormatError("root must be a string")
    tree = build_tree(vertices, root)

    if ("leaf_masses" in doc) == ("measure" in doc):
        raise SpecFormatError("exactly one of 'leaf_masses' and 'measure' is required")
    if "leaf_masses" in doc:
        measure = from_leaf_masses(tree, _real_map(doc["leaf_masses"], "leaf_masses"))
    else:
        spec = _obj(doc["measure"], "measure", {"type", "total"}, ("type",))
        if spec["type"] != "homogeneous":
            raise SpecFormatError(f"unknown measure type {spec['type']!r}")
        measure = homogeneous_measure(tree, _real(spec.get("total", 1.0), "measure.total"))

    assignment = None
    if "metric" in doc:
        spec = _obj(doc["metric"], "metric", {"type", "reference", "p", "diameters"}, ("type",))
        kind = spec["type"]
        if kind == "standard":
            ref = spec.get("reference")
            if ref is not None and not isinstance(ref, str):
                raise SpecFormatError("metric.reference must be a string")
            assignment = _metric.standard_assignment(tree, ref)
        elif kind == "padic":
            p = spec.get("p")
            assignment = _metric.padic_assignment(tree, None if p is None else _real(p, "metric.p"))
        elif kind == "table":
            _obj(spec, "metric", None, ("diameters",))
            # monotonicity is reported by validation, not rejected here
            assignment = _metric.table_assignment(tree, _real_map(spec["diameters"], "metric.diameters"),
                                                  check=False)
        else:
            raise SpecFormatError(f"unknown metric type {kind!r}")

    kernel = None
    if "kernel" in doc:
        kernel = parse_kernel(doc["kernel"], tree, assignment)
    return TreeDocument(tree, measure, assignment, kernel)


def parse_kernel(spec, tree: DirectedTree, assignment=None) -> Kernel:
    spec = _obj(spec, "kernel", {"type", "values", "alpha"}, ("type",))
    if spec["type"] == "table":
        _obj(spec, "kernel", None, ("values",))
        values = {k: _number(v, f"kernel.values[{k!r}]") for k, v in _obj(spec["values"], "kernel.values").items()}
        return table_kernel(tree, values)
    if spec["type"] == "power":
        _obj(spec, "kernel", None, ("alpha",))
        if assignment is None:
            assignment = _metric.standard_assignment(tree)
        return power_kernel(tree, assignment, _real(spec["alpha"], "kernel.alpha"))
    raise SpecFormatError(f"unknown kernel type {spec['type']!r}")


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON; floats use the shortest repr that round-trips exactly."""
    return json.dumps(obj, indent=2, default=_default, allow_nan=False) + "\n"


def write_json(obj, path=None):
    text = dumps(obj)
    if path is None or path == "-":
        print(text, end="")
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def document_dict(tree: DirectedTree, leaf_masses=None, measure=None, metric=None, kernel=None) -> dict:
    """Assemble a document object (the inverse of :func:`parse_document`)."""
    doc = {"root": tree.root, "vertices": tree.to_children_map()}
    if leaf_masses is not None:
        doc["leaf_masses"] = dict(zip(tree.leaves, np.asarray(leaf_masses, dtype=float).tolist()))
    else:
        doc["measure"] = measure or {"type": "homogeneous", "total": 1.0}
    if metric is not None:
        doc["metric"] = metric
    if kernel is not None:
        doc["kernel"] = kernel
    return doc
