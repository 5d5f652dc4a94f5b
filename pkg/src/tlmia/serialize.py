"""Deterministic JSON serialization with lossless floats.

Every persisted artifact (network files, threshold files, reports) is written
through this module so that the same in-memory object always produces the same
bytes, and every float64 survives a round-trip exactly. Floats are printed
with 17 significant digits, which is enough to pin down any float64.
"""

import json
import math

import numpy as np

from .errors import ValidationError


def format_float(value):
    """Render a finite float with 17 significant digits."""
    v = float(value)
    if not math.isfinite(v):
        raise ValidationError(f"cannot serialize non-finite float {value!r}")
    return format(v, ".17g")


def _emit(obj, out, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out, indent, level)
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(inner)
            _emit(item, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            if not isinstance(key, str):
                raise ValidationError(f"JSON object keys must be strings, got {key!r}")
            out.append(inner + json.dumps(key) + ": ")
            _emit(val, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    else:
        raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize to a JSON string with deterministic layout and key order."""
    out = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def loads(text):
    return json.loads(text)


def dump(obj, path, indent=2):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj, indent=indent))


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.loads(fh.read())
