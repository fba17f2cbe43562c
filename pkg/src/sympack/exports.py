"""Geometry exports: moment-polytope SVG, surface OBJ meshes and trace polylines."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .characteristics import HopfDisc, trace_characteristic
from .embedding import Packing
from .surfaces import SupportingSurface
from .toric import AMBIENT, corner_triangle

PX_PER_UNIT = 400
MARGIN = 10
FILLS = ("#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3")


class ExportError(ValueError):
    """The requested export does not apply to this packing."""


def _triangles(p: Packing):
    out = []
    for b in p:
        tri = b.info.get("triangle")
        if tri is None and b.label.startswith("chart ball"):
            tri = corner_triangle(0, Fraction(1, 2) if b.radius >= 1 else b.radius**2 / 2)
        if tri is None:
            raise ExportError(f"{p.label} is not a toric packing; no moment polytope to draw")
        out.append(tri)
    return out


def polytope_svg(p: Packing) -> str:
    """The ambient moment triangle and one sub-triangle per ball.

    Action coordinates are scaled by 400 px per unit with the origin at the
    bottom-left of the drawing area.
    """
    tris = _triangles(p)
    size = PX_PER_UNIT / 2 + 2 * MARGIN

    def pt(v):
        return f"{MARGIN + PX_PER_UNIT * float(v[0]):.6g},{size - MARGIN - PX_PER_UNIT * float(v[1]):.6g}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
        f'viewBox="0 0 {size:g} {size:g}">',
        f"<title>{p.label}: moment polytope</title>",
        f'<polygon class="ambient" points="{" ".join(pt(v) for v in AMBIENT)}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for k, (tri, b) in enumerate(zip(tris, p)):
        verts = tri.vertices
        lines.append(
            f'<polygon class="ball" data-ball="{k}" data-radius="{b.radius:.17g}" '
            f'points="{" ".join(pt(v) for v in verts)}" fill="{FILLS[k % len(FILLS)]}" '
            'fill-opacity="0.5" stroke="black" stroke-width="0.5"/>')
        cx = sum(float(v[0]) for v in verts) / 3
        cy = sum(float(v[1]) for v in verts) / 3
        x, y = pt((cx, cy)).split(",")
        lines.append(f'<text x="{x}" y="{y}" font-size="8" text-anchor="middle">B{k + 1}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def inspection_coords(Z: np.ndarray) -> np.ndarray:
    """Three phase-invariant coordinates of [Z] for viewing meshes.

    The first three Gell-Mann components of Z Z* / |Z|^2; not an embedding of
    CP^2, only a fixed projection for inspection.
    """
    Z = np.asarray(Z, complex)
    Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True)
    c = Z[:, 0] * np.conj(Z[:, 1])
    return np.stack([c.real, -c.imag, (np.abs(Z[:, 0]) ** 2 - np.abs(Z[:, 1]) ** 2) / 2], axis=1)


def disc_mesh(p: Packing, disc: HopfDisc, rings: int = 8, sectors: int = 72):
    """Polar triangulation of an embedded Hopf disc: vertices (V, 3), faces (F, 3).

    Vertex 0 is the center; the last ``sectors`` vertices are the boundary circle.
    """
    # the rim is taken a hair inside so pole points use their limiting values
    rho = np.linspace(0, disc.circle.radius * (1 - 1e-12), rings + 1)[1:]
    ang = np.arange(sectors) * 2 * np.pi / sectors
    R, A = np.meshgrid(rho, ang, indexing="ij")
    x = np.vstack([np.zeros((1, 2), complex), disc.domain_points(R.ravel(), A.ravel())])
    V = inspection_coords(p[disc.circle.ball_index].map(x))
    faces = []
    for s in range(sectors):
        faces.append((0, 1 + s, 1 + (s + 1) % sectors))
    for r in range(rings - 1):
        for s in range(sectors):
            a = 1 + r * sectors + s
            b = 1 + r * sectors + (s + 1) % sectors
            faces.append((a, a + sectors, b))
            faces.append((b, a + sectors, b + sectors))
    return V, np.array(faces, int)


def surfaces_obj(p: Packing, surfaces: list[SupportingSurface], rings: int = 8,
                 sectors: int = 72) -> str:
    """Wavefront OBJ with one object per disc; shared circles coincide in space."""
    out = [f"# {p.label}: {len(surfaces)} supporting surface(s)"]
    offset = 1
    for si, surf in enumerate(surfaces):
        for di, d in enumerate(surf.discs):
            V, F = disc_mesh(p, d, rings, sectors)
            out.append(f"o surface{si}_disc{di}_ball{d.circle.ball_index}")
            out.extend(f"v {a:.17g} {b:.17g} {c:.17g}" for a, b, c in V)
            out.extend(f"f {i + offset} {j + offset} {k + offset}" for i, j, k in F)
            offset += len(V)
    return "\n".join(out) + "\n"


def read_obj(text: str) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Objects of an OBJ file written by :func:`surfaces_obj`, with local face indices."""
    objs: dict[str, list] = {}
    name, base = None, 1
    for line in text.splitlines():
        tag, *rest = line.split() or [""]
        if tag == "o":
            if name is not None:
                base += len(objs[name][0])
            name = rest[0]
            objs[name] = [[], []]
        elif tag == "v":
            objs[name][0].append([float(t) for t in rest])
        elif tag == "f":
            objs[name][1].append([int(t) - base for t in rest])
    return {k: (np.array(v), np.array(f, int)) for k, (v, f) in objs.items()}


def trace_document(p: Packing, ball: int = 0, step: float = 1e-2, start=None) -> dict:
    """Traced characteristic through a generic boundary point of one ball."""
    if not 0 <= ball < len(p):
        raise ExportError(f"ball index {ball} out of range")
    b = p[ball]
    x0 = b.radius * np.array([0.6, 0.8j]) if start is None else np.asarray(start, complex)
    tr = trace_characteristic(b, x0, step)
    return {
        "label": p.label,
        "ball": ball,
        "radius": b.radius,
        "start": [complex(z) for z in x0],
        "step": step,
        "return_distance": tr.return_distance,
        "period": tr.period,
        "truncated": tr.truncated,
        "domain": [[complex(z) for z in row] for row in tr.points],
        "image": [[complex(z) for z in row] for row in tr.image(b)],
    }
