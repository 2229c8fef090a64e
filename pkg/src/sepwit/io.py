"""File formats: matrix/pair/state JSON, polygon CSV, report JSON and a static SVG plot.

Matrices are ``{"dim": n, "re": [[...]], "im": [[...]]}``. A pair file holds
four matrices under ``A1, A2, B1, B2``; a two-operator file holds ``H1, H2``.
A state file is a matrix with extra ``dimA`` and ``dimB`` keys. All writers
are deterministic and replace their target atomically.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .linalg import DensityState, InvalidInputError, as_hermitian
from .ranges import ProductPair

__all__ = [
    "SCHEMA",
    "matrix_to_json",
    "matrix_from_json",
    "pair_to_json",
    "read_json",
    "load_pair_or_operators",
    "load_state",
    "state_to_json",
    "to_jsonable",
    "write_json",
    "write_text",
    "polygon_csv",
    "render_svg",
]

SCHEMA = "witness-lab/1"


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def _matrix(obj, name: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise InvalidInputError(f"{name}: expected an object with 're' (and optional 'im')")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: non-numeric entries ({exc})") from None
    if re.ndim != 2 or re.shape != im.shape:
        raise InvalidInputError(f"{name}: 're' and 'im' must be matching 2-d arrays")
    if "dim" in obj and obj["dim"] != re.shape[0]:
        raise InvalidInputError(f"{name}: dim {obj['dim']} does not match {re.shape[0]} rows")
    return re + 1j * im


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    """Parse and validate a Hermitian matrix."""
    return as_hermitian(_matrix(obj, name), name)


def pair_to_json(pair: ProductPair) -> dict:
    return {name: matrix_to_json(getattr(pair, name)) for name in ("A1", "A2", "B1", "B2")}


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InvalidInputError(f"{path}: {exc.strerror}") from None


def load_pair_or_operators(path):
    """Return a :class:`ProductPair` or an ``(H1, H2)`` tuple, depending on the file's keys."""
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{path}: top level must be an object")
    if all(k in obj for k in ("A1", "A2", "B1", "B2")):
        return ProductPair(*(matrix_from_json(obj[k], k) for k in ("A1", "A2", "B1", "B2")))
    if "H1" in obj and "H2" in obj:
        h1, h2 = matrix_from_json(obj["H1"], "H1"), matrix_from_json(obj["H2"], "H2")
        if h1.shape != h2.shape:
            raise InvalidInputError("H1 and H2 differ in dimension")
        return h1, h2
    raise InvalidInputError(f"{path}: expected keys A1,A2,B1,B2 or H1,H2")


def state_to_json(state: DensityState) -> dict:
    out = matrix_to_json(state.matrix)
    out.update(dimA=state.dim_a, dimB=state.dim_b)
    return out


def load_state(path) -> DensityState:
    obj = read_json(path)
    if not isinstance(obj, dict) or "dimA" not in obj or "dimB" not in obj:
        raise InvalidInputError(f"{path}: state file needs 'dimA' and 'dimB'")
    return DensityState(int(obj["dimA"]), int(obj["dimB"]), _matrix(obj, "state"))


def to_jsonable(x):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"re": to_jsonable(x.real.tolist()), "im": to_jsonable(x.imag.tolist())}
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else None
    return x


def write_text(path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj) -> Path:
    payload = {"schema": SCHEMA, **obj}
    return write_text(path, json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")


def polygon_csv(points) -> str:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    rows = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in pts]
    return "\n".join(rows) + "\n"


_SVG_SIZE = 480
_SVG_PAD = 40


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(joint, separable=None, cloud=None, tangents=(), title: str = "") -> str:
    """Static plot of the joint range, the separable range, an optional cloud and tangent lines.

    ``tangents`` holds ``(k1, k2, value, side)`` tuples, each drawn as the
    line ``k1 x + k2 y = value`` and labelled by direction and side.
    """
    polys = [np.asarray(p.vertices if hasattr(p, "vertices") else p, dtype=float).reshape(-1, 2)
             for p in (joint, separable) if p is not None]
    allpts = np.vstack(polys + ([np.asarray(cloud)] if cloud is not None and len(cloud) else []))
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    centre = (lo + hi) / 2
    lo, hi = centre - 0.6 * span, centre + 0.6 * span
    inner = _SVG_SIZE - 2 * _SVG_PAD

    def sx(x):
        return _SVG_PAD + (x - lo[0]) / (hi[0] - lo[0]) * inner

    def sy(y):
        return _SVG_PAD + (hi[1] - y) / (hi[1] - lo[1]) * inner

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_SIZE}" height="{_SVG_SIZE + 20 * (len(polys) + len(tangents))}">',
        f'<rect x="{_SVG_PAD}" y="{_SVG_PAD}" width="{inner}" height="{inner}" fill="white" stroke="#999"/>',
    ]
    if lo[1] < 0 < hi[1]:
        out.append(f'<line x1="{_SVG_PAD}" y1="{_fmt(sy(0))}" x2="{_SVG_PAD + inner}" y2="{_fmt(sy(0))}" stroke="#ccc"/>')
    if lo[0] < 0 < hi[0]:
        out.append(f'<line x1="{_fmt(sx(0))}" y1="{_SVG_PAD}" x2="{_fmt(sx(0))}" y2="{_SVG_PAD + inner}" stroke="#ccc"/>')
    for poly, fill, stroke in zip(polys, ("#9ecae1", "#fdae6b"), ("#3182bd", "#e6550d")):
        if len(poly) >= 2:
            d = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in poly)
            out.append(f'<polygon points="{d}" fill="{fill}" fill-opacity="0.6" stroke="{stroke}" stroke-width="1.5"/>')
        else:
            out.append(f'<circle cx="{_fmt(sx(poly[0, 0]))}" cy="{_fmt(sy(poly[0, 1]))}" r="3" fill="{stroke}"/>')
    if cloud is not None:
        for x, y in np.asarray(cloud, dtype=float).reshape(-1, 2):
            out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="1" fill="#636363"/>')
    out.append(f'<clipPath id="frame"><rect x="{_SVG_PAD}" y="{_SVG_PAD}" width="{inner}" height="{inner}"/></clipPath>')
    legend = [("#3182bd", "joint range"), ("#e6550d", "separable range")][:len(polys)]
    for k1, k2, value, side in tangents:
        # two far points on k1 x + k2 y = value
        n = np.array([k1, k2], dtype=float)
        n2 = float(n @ n)
        p0 = n * value / n2
        t = np.array([-n[1], n[0]]) / math.sqrt(n2)
        a, b = p0 - 4 * span * t, p0 + 4 * span * t
        out.append(f'<line x1="{_fmt(sx(a[0]))}" y1="{_fmt(sy(a[1]))}" x2="{_fmt(sx(b[0]))}" y2="{_fmt(sy(b[1]))}" '
                   f'stroke="#31a354" stroke-width="1.5" clip-path="url(#frame)"/>')
        legend.append(("#31a354", f"k=({k1:g},{k2:g}) {side} side: {k1:g}x + {k2:g}y = {value:.6g}"))
    y0 = _SVG_SIZE
    for i, (colour, text) in enumerate(legend):
        y = y0 + 20 * i
        out.append(f'<rect x="{_SVG_PAD}" y="{y - 10}" width="12" height="12" fill="{colour}"/>')
        out.append(f'<text x="{_SVG_PAD + 18}" y="{y}" font-family="sans-serif" font-size="12">{text}</text>')
    if title:
        out.append(f'<text x="{_SVG_PAD}" y="{_SVG_PAD - 12}" font-family="sans-serif" font-size="14">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
