"""JSON, CSV and SVG serialization.

Exact scalars are written in their textual form so that every JSON document
round-trips; floats appear only in CSV and SVG output.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .atf import DecoratedQuad, LimitTrace
from .scalars import IVec2, format_scalar, parse_scalar, to_float

LENGTH_KEYS = ("OX", "OY", "XV", "VY")
RAY_KEYS = ("X", "V", "Y")
DIR_KEYS = ("XV", "VY")


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def quad_to_json(Q: DecoratedQuad) -> dict:
    return {
        "lengths": {k: format_scalar(v) for k, v in Q.lengths().items()},
        "rays": {k: v.to_list() for k, v in Q.rays().items()},
        "dirs": {k: v.to_list() for k, v in Q.dirs().items()},
    }


def quad_from_json(obj: dict, b_range=None) -> DecoratedQuad:
    L, R, D = obj["lengths"], obj["rays"], obj["dirs"]
    return DecoratedQuad(
        len_OX=parse_scalar(L["OX"]), len_OY=parse_scalar(L["OY"]),
        len_XV=parse_scalar(L["XV"]), len_VY=parse_scalar(L["VY"]),
        ray_X=IVec2(*R["X"]), ray_V=IVec2(*R["V"]), ray_Y=IVec2(*R["Y"]),
        dir_XV=IVec2(*D["XV"]), dir_VY=IVec2(*D["VY"]),
        b_range=b_range,
    )


def trace_to_json(trace: LimitTrace) -> dict:
    steps = []
    for step in trace.steps:
        rec = {"k": step.k, **quad_to_json(step.quad)}
        rec["ellipsoid"] = [format_scalar(x) for x in step.ellipsoid]
        steps.append(rec)
    return {
        "triple": trace.triple.to_json(),
        "b": format_scalar(trace.b),
        "z": format_scalar(trace.z),
        "volume": format_scalar(trace.volume),
        "steps": steps,
    }


def trace_steps_from_json(obj: dict) -> list[tuple[int, DecoratedQuad, tuple]]:
    return [
        (s["k"], quad_from_json(s), tuple(parse_scalar(x) for x in s["ellipsoid"]))
        for s in obj["steps"]
    ]


def format_float(x: float) -> str:
    return f"{x:.17g}"


def quad_to_svg(Q: DecoratedQuad, size: int = 480, title: str = "") -> str:
    """Draw a specialized quad with its nodal rays as dashed segments."""
    pts = {k: (to_float(x), to_float(y)) for k, (x, y) in Q.vertices().items()}
    extent = max(max(abs(x), abs(y)) for x, y in pts.values()) or 1.0
    margin = 20
    scale = (size - 2 * margin) / extent

    def xy(p):
        return margin + p[0] * scale, size - margin - p[1] * scale

    poly = " ".join(f"{x:.6f},{y:.6f}" for x, y in (xy(pts[k]) for k in "OXVY"))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        lines.append(f"  <title>{title}</title>")
    lines.append(f'  <polygon points="{poly}" fill="#dde8f4" stroke="black" stroke-width="1.5"/>')
    # a ray is drawn a fixed fraction of the picture long
    ray_len = 0.2 * extent
    for name, n in Q.rays().items():
        norm = (n.x * n.x + n.y * n.y) ** 0.5
        start = pts[name]
        end = (start[0] + ray_len * n.x / norm, start[1] + ray_len * n.y / norm)
        (x1, y1), (x2, y2) = xy(start), xy(end)
        lines.append(
            f'  <line x1="{x1:.6f}" y1="{y1:.6f}" x2="{x2:.6f}" y2="{y2:.6f}" '
            f'stroke="firebrick" stroke-dasharray="5,4"/>'
        )
        lines.append(
            f'  <text x="{x2:.6f}" y="{y2:.6f}" font-size="10">n_{name}=({n.x},{n.y})</text>'
        )
    for name, p in pts.items():
        x, y = xy(p)
        lines.append(f'  <text x="{x + 3:.6f}" y="{y - 3:.6f}" font-size="12">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
