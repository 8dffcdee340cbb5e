"""Writes the structured Delaunay test meshes used by the mesh refinement tests.

Unit square: an offset triangular lattice of spacing eps, warped by
t -> t + 0.2 t (1 - t) in each coordinate so that x is not discretely harmonic.
Boundary markers: x = 0 -> 1, y = 0 -> 2, x = 1 -> 3, y = 1 -> 4 (corners take
the x marker).

Cross: the plus-shaped union of [1/3, 2/3] x [0, 1] and [0, 1] x [1/3, 2/3],
sampled on a square lattice of spacing eps with a small shear so the Delaunay
triangulation is unique. The left arm end is marker 1, the right arm end 3, the
rest of the boundary is split into a lower (2) and upper (4) part.

Usage: python3 scripts/make_meshes.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay


def warp(t):
    return t + 0.2 * t * (1.0 - t)


def square_points(n):
    pts = []
    for j in range(n + 1):
        if j % 2 == 0:
            xs = [i / n for i in range(n + 1)]
        else:
            xs = [0.0] + [(i + 0.5) / n for i in range(n)] + [1.0]
        pts.extend((x, j / n) for x in xs)
    return pts


def square_marker(x, y):
    if x == 0.0:
        return 1
    if x == 1.0:
        return 3
    if y == 0.0:
        return 2
    if y == 1.0:
        return 4
    return 0


def in_cross(x, y):
    third, two = 1.0 / 3.0, 2.0 / 3.0
    return (third <= x <= two) or (third <= y <= two)


def cross_points(n):
    # n must be a multiple of 3 so the arm edges fall on lattice lines.
    pts = []
    for j in range(n + 1):
        for i in range(n + 1):
            x, y = i / n, j / n
            if in_cross(x, y):
                pts.append((x, y))
    return pts


def cross_marker(x, y):
    third, two = 1.0 / 3.0, 2.0 / 3.0
    if x == 0.0:
        return 1
    if x == 1.0:
        return 3
    on_boundary = y in (0.0, 1.0) or (
        (x in (third, two) and not third < y < two) or (y in (third, two) and not third < x < two)
    )
    if not on_boundary:
        return 0
    return 2 if y < 0.5 else 4


def triangulate(raw, transform):
    raw = np.array(raw)
    pts = np.array([transform(x, y) for x, y in raw])
    tri = Delaunay(pts)
    keep = []
    for s in tri.simplices:
        a, b, c = pts[s]
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(area) < 1e-14:
            continue
        keep.append(s if area > 0 else s[[0, 2, 1]])
    return pts, keep


def write(out, name, raw, pts, tris, marker):
    with open(out / f"{name}.node", "w") as f:
        f.write(f"{len(pts)} 2 0 1\n")
        for k, ((x, y), (rx, ry)) in enumerate(zip(pts, raw)):
            f.write(f"{k + 1} {float(x)!r} {float(y)!r} {marker(float(rx), float(ry))}\n")
    with open(out / f"{name}.ele", "w") as f:
        f.write(f"{len(tris)} 3 0\n")
        for k, s in enumerate(tris):
            f.write(f"{k + 1} {s[0] + 1} {s[1] + 1} {s[2] + 1}\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data")
    out.mkdir(parents=True, exist_ok=True)
    for n in (4, 8, 16, 32):
        raw = square_points(n)
        pts, tris = triangulate(raw, lambda x, y: (warp(x), warp(y)))
        write(out, f"square_{n}", raw, pts, tris, square_marker)
    for n in (6, 12, 24):
        raw = cross_points(n)
        pts, tris = triangulate(raw, lambda x, y: (x + 0.01 * y * y, y))
        tris = [s for s in tris if in_cross(*np.array(raw)[s].mean(axis=0))]
        write(out, f"cross_{n}", raw, pts, tris, cross_marker)


if __name__ == "__main__":
    main()
