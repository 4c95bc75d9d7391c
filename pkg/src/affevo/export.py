"""Writers for the delimited and vector artifacts: CSV, JSON, SVG, OBJ.

Every float goes out with 17 significant digits so files round-trip exactly
and are byte-stable across runs.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

from .affine import AffineJetTable
from .discriminant import DiscriminantMesh
from .evolutoid import EvolutoidCurve, SingularityRecord

JETS_HEADER = ("t", "s", "x", "y", "kappa", "mu", "mu_s", "mu_ss", "mu_sss")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def jets_csv(jets: AffineJetTable) -> str:
    cols = [jets.t, jets.s, jets.gamma[:, 0], jets.gamma[:, 1], jets.kappa,
            jets.mu, jets.mu_s, jets.mu_ss, jets.mu_sss]
    buf = io.StringIO()
    buf.write(",".join(JETS_HEADER) + "\n")
    for row in zip(*cols):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def plain(obj):
    """Recursively convert numpy scalars/arrays so ``json`` can encode them."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _encode(obj, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite value {obj} cannot be written as JSON")
        return fmt(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_encode(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _encode(v, depth + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Indented JSON with 17-significant-digit floats."""
    return _encode(plain(obj), 0) + "\n"


def singularity_report(alpha: float, records: list[SingularityRecord]) -> dict:
    return {"alpha": float(alpha), "singularities": [r.to_dict() for r in records]}


def discriminant_report(mesh: DiscriminantMesh) -> dict:
    return {
        "alpha_range": [float(mesh.alphas[0]), float(mesh.alphas[-1])],
        "n_alpha": int(mesh.alphas.size),
        "n_s": int(mesh.shape[0]),
        "cuspidal_edges": [
            {"alpha_start": e.alpha[0], "alpha_end": e.alpha[-1], "points": len(e)}
            for e in mesh.cuspidal_edges
        ],
        "swallowtails": [r.to_dict(with_alpha=True) for r in mesh.swallowtails],
    }


def discriminant_obj(mesh: DiscriminantMesh) -> str:
    """Wavefront OBJ: mesh vertices, triangles, then cuspidal edges as polylines."""
    buf = io.StringIO()
    buf.write("# discriminant surface: v x y alpha\n")
    verts = mesh.flat_vertices
    for x, y, a in verts:
        buf.write(f"v {fmt(x)} {fmt(y)} {fmt(a)}\n")
    for a, b, c in mesh.triangles + 1:
        buf.write(f"f {a} {b} {c}\n")
    offset = verts.shape[0]
    for k, edge in enumerate(mesh.cuspidal_edges):
        buf.write(f"# cuspidal edge {k}\n")
        xyz = edge.xyz
        for x, y, a in xyz:
            buf.write(f"v {fmt(x)} {fmt(y)} {fmt(a)}\n")
        if len(xyz) >= 2:
            idx = " ".join(str(offset + i + 1) for i in range(len(xyz)))
            buf.write(f"l {idx}\n")
        offset += len(xyz)
    return buf.getvalue()


def evolutoid_svg(jets: AffineJetTable, curve: EvolutoidCurve, records: list[SingularityRecord]
                  ) -> str:
    """gamma (black) with E_alpha (red) and cusp markers, y pointing up."""
    pts = np.vstack([jets.gamma, curve.X])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    margin = 0.05 * span
    lo, span = lo - margin, span + 2 * margin
    width = float(span.max())
    stroke = fmt(width / 400)
    radius = fmt(width / 120)

    def path(P):
        head = f"M{fmt(P[0, 0])},{fmt(-P[0, 1])}"
        body = " ".join(f"L{fmt(x)},{fmt(-y)}" for x, y in P[1:])
        return f"{head} {body} Z"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{fmt(lo[0])} {fmt(-(lo[1] + span[1]))} '
        f'{fmt(span[0])} {fmt(span[1])}">',
        f'<title>evolutoid alpha={fmt(curve.alpha)}</title>',
        f'<path d="{path(jets.gamma)}" fill="none" stroke="black" stroke-width="{stroke}"/>',
        f'<path d="{path(curve.X)}" fill="none" stroke="#c0392b" stroke-width="{stroke}"/>',
    ]
    for r in records:
        out.append(f'<circle cx="{fmt(r.X0[0])}" cy="{fmt(-r.X0[1])}" r="{radius}" '
                   f'fill="#2471a3" class="{r.kind.value}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path
