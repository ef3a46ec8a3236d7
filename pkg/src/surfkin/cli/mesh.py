"""Wavefront OBJ export of a parametric grid."""

from __future__ import annotations

import numpy as np

DEGENERATE_AREA = 1e-14


def triangles(nu, nv):
    """Zero-based triangles of an ``nu x nv`` cell grid, each quad split along ``(i,j)-(i+1,j+1)``."""
    i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    i, j = i.ravel(), j.ravel()

    def p(a, b):
        return a * (nv + 1) + b

    t1 = np.stack([p(i, j), p(i + 1, j), p(i + 1, j + 1)], axis=-1)
    t2 = np.stack([p(i, j), p(i + 1, j + 1), p(i, j + 1)], axis=-1)
    return np.stack([t1, t2], axis=1).reshape(-1, 3)


def drop_degenerate(vertices, faces, rel=DEGENERATE_AREA):
    """Remove faces whose area is below ``rel`` times the squared bounding-box size."""
    a, b, c = (vertices[faces[:, k]] for k in range(3))
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=-1)
    extent = float(np.max(np.ptp(vertices, axis=0))) if len(vertices) else 0.0
    keep = area > rel * max(extent, 1.0) ** 2
    return faces[keep], int(np.count_nonzero(~keep))


def obj_text(vertices, faces, normals=None):
    """OBJ text with ``v`` at 17 significant digits and 1-based faces (``a//a`` when normals are given)."""
    lines = ["v %.17g %.17g %.17g" % tuple(p) for p in vertices]
    if normals is not None:
        lines += ["vn %.17g %.17g %.17g" % tuple(n) for n in normals]
        lines += ["f %d//%d %d//%d %d//%d" % (a, a, b, b, c, c) for a, b, c in faces + 1]
    else:
        lines += ["f %d %d %d" % tuple(f) for f in faces + 1]
    return "\n".join(lines) + "\n"


def grid_mesh(points, normals=None):
    """Vertices, faces, normals and the dropped-face count for a ``(nu+1, nv+1, 3)`` grid of points."""
    nu, nv = points.shape[0] - 1, points.shape[1] - 1
    vertices = points.reshape(-1, 3)
    faces, dropped = drop_degenerate(vertices, triangles(nu, nv))
    n = None if normals is None else normals.reshape(-1, 3)
    return vertices, faces, n, dropped
