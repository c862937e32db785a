"""File formats: posets, kernels and pdfs as JSON, tables as CSV.

Poset file::

    {"elements": ["e", "a", ...], "edges": [["e", "a"], ...]}
    {"generator": "grid", "k": 2}
    {"generator": "free", "alphabet": ["a", "b"]}
    {"generator": "tree", "children": {"e": ["a", "b"], "a": ["c"]}}

Kernel file: a map ``label -> {target label: probability}``, optionally
wrapped as ``{"direction": ..., "root": ..., "rows": {...}, "poset": {...}}``.

Pdf file: a map ``label -> weight`` plus an optional ``"tail"`` entry.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path as FsPath

from .distributions import Pdf
from .errors import ValidationError
from .kernels import DownwardKernel, Kernel, UpwardKernel
from .poset import FinitePoset, Poset, free_poset, grid_poset, tree_poset

FLOAT_FORMAT = ".17g"


# -- JSON emission ------------------------------------------------------------

def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, (float, Fraction, np_float_types())):
        x = float(obj)
        out.append(format(x, FLOAT_FORMAT) if math.isfinite(x) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for n, (k, v) in enumerate(items):
            out.append(pad + json.dumps(str(k), ensure_ascii=False) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if n < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            out.append("[")
            for n, v in enumerate(obj):
                _emit(v, indent, level + 1, out)
                if n < len(obj) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def np_float_types():
    import numpy as np

    return (np.floating,)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    out = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_text(path, text: str):
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


# -- posets -------------------------------------------------------------------

def poset_from_json(data) -> Poset:
    if not isinstance(data, dict):
        raise ValidationError("poset description must be a JSON object")
    gen = data.get("generator")
    if gen is None:
        if "elements" not in data or "edges" not in data:
            raise ValidationError('poset file needs "elements" and "edges"')
        return FinitePoset(data["elements"], [tuple(e) for e in data["edges"]], root=data.get("root"))
    if gen == "grid":
        return grid_poset(int(data["k"]))
    if gen == "free":
        return free_poset(data["alphabet"])
    if gen == "tree":
        return tree_poset(data["children"], root=data.get("root"))
    raise ValidationError(f"unknown generator {gen!r}")


def load_poset(path) -> Poset:
    return poset_from_json(read_json(path))


def poset_to_json(poset: FinitePoset) -> dict:
    return {
        "elements": [poset.label(x) for x in poset.elements],
        "edges": [[poset.label(x), poset.label(y)] for x, y in poset.edges],
    }


# -- kernels ------------------------------------------------------------------

def _unwrap_rows(data):
    if isinstance(data, dict) and isinstance(data.get("rows"), dict) and all(
            isinstance(v, dict) for v in data["rows"].values()):
        return data["rows"], data
    return data, {}


def infer_poset(rows: dict, direction: str, root=None) -> FinitePoset:
    """Recover the covering graph from the support of kernel rows."""
    labels = list(rows)
    for row in rows.values():
        for y in row:
            if y not in labels:
                labels.append(y)
    if root is None:
        if direction == "up":
            common = set(labels)
            for row in rows.values():
                common &= set(row)
        else:
            common = {x for x, row in rows.items() if x in row}
        if len(common) != 1:
            raise ValidationError("cannot infer the root from the kernel; add a \"root\" field")
        root = common.pop()
    if direction == "up":
        edges = [(x, y) for x, row in rows.items() for y in row if y != root]
    else:
        edges = [(y, x) for x, row in rows.items() if x != root for y in row]
    return FinitePoset(labels, edges, root=root)


def kernel_from_json(data, poset: Poset | None = None, direction: str | None = None,
                     strict: bool = True, depth: int | None = None) -> Kernel:
    """Parse and validate a kernel description."""
    from .downward import validate_downward
    from .upward import validate_upward

    rows_raw, meta = _unwrap_rows(data)
    direction = direction or meta.get("direction") or "up"
    if direction not in ("up", "down"):
        raise ValidationError(f"direction must be 'up' or 'down', not {direction!r}")
    if poset is None and "poset" in meta:
        poset = poset_from_json(meta["poset"])
    if poset is None:
        poset = infer_poset(rows_raw, direction, meta.get("root"))
    rows = {}
    for xl, row in rows_raw.items():
        x = poset.parse(xl)
        rows[x] = {poset.parse(yl): _number(p) for yl, p in row.items()}
    if direction == "up":
        return validate_upward(rows, poset, strict=strict, depth=depth)
    return validate_downward(rows, poset, tail=float(meta.get("tail", 0.0)), strict=strict,
                             depth=depth)


def _number(p):
    if isinstance(p, str):
        return float(Fraction(p))
    return p


def load_kernel(path, poset=None, direction=None, strict=True, depth=None) -> Kernel:
    return kernel_from_json(read_json(path), poset, direction, strict, depth)


def kernel_to_json(kernel: Kernel, elements=None) -> dict:
    """Serialise the rows of ``kernel`` on ``elements`` (default: stored rows)."""
    poset = kernel.poset
    if elements is None:
        elements = kernel.domain()
    out = {
        "direction": "up" if isinstance(kernel, UpwardKernel) else "down",
        "root": poset.label(poset.root),
        "rows": {
            poset.label(x): {poset.label(y): p for y, p in kernel.row(x).items()}
            for x in elements
        },
    }
    if isinstance(kernel, DownwardKernel) and kernel.e_tail:
        out["tail"] = kernel.e_tail
    if isinstance(poset, FinitePoset):
        out["poset"] = poset_to_json(poset)
    return out


# -- pdfs and tables ----------------------------------------------------------

def pdf_from_json(data, poset: Poset) -> Pdf:
    data = dict(data)
    tail = float(data.pop("tail", 0.0))
    return Pdf({poset.parse(k): _number(v) for k, v in data.items()}, tail=tail)


def pdf_to_json(pdf: Pdf, poset: Poset) -> dict:
    out = {poset.label(x): w for x, w in pdf.weights.items()}
    out["tail"] = pdf.tail
    return out


def write_csv(path, header, rows):
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), FLOAT_FORMAT) if isinstance(v, (float, Fraction)) else v
                        for v in row])


def distribution_table(pdf: Pdf, upf, rate, poset: Poset) -> list:
    """Rows ``(label, f, F, r)`` for CSV export."""
    return [(poset.label(x), pdf[x], upf[x], rate[x]) for x in upf.values]
