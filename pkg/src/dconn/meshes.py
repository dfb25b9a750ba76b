"""Mesh fixtures and file formats for metric complexes.

Two interchange formats are supported:

* OFF triangle meshes (embedded in R^3; metrics pulled back from the
  embedding);
* a JSON abstract-complex format with keys ``format``, ``vertices``
  (count), ``triangles`` and ``edge_lengths``; serialization is canonical
  so a load/save round trip is bit-exact.

Generators cover the standard test surfaces: subdivided icospheres, flat
grids, cones of equilateral triangles, flat tori and the regular
tetrahedron boundary.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import BoundaryHingeError, MeshFormatError
from .levi_civita import MetricComplex, _edge_key

JSON_FORMAT_NAME = "dconn-complex"


# -- OFF -----------------------------------------------------------------


def read_off(path) -> MetricComplex:
    """Read an OFF triangle mesh; metrics come from the embedding."""
    lines = []
    for raw in Path(path).read_text().splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    if not lines or lines[0] != "OFF":
        raise MeshFormatError(f"{path}: missing OFF header")
    try:
        nv, nf, _ = (int(tok) for tok in lines[1].split())
        rows = lines[2:]
        verts = np.array([[float(tok) for tok in rows[i].split()] for i in range(nv)])
        faces = []
        for i in range(nf):
            toks = rows[nv + i].split()
            if int(toks[0]) != 3:
                raise MeshFormatError(f"{path}: face {i} is not a triangle")
            faces.append([int(t) for t in toks[1:4]])
    except (IndexError, ValueError) as exc:
        raise MeshFormatError(f"{path}: malformed OFF file ({exc})") from exc
    if verts.shape[1] != 3:
        raise MeshFormatError(f"{path}: vertices must have three coordinates")
    return MetricComplex.from_embedding(verts, np.array(faces, dtype=int))


def write_off(path, vertices: np.ndarray, triangles: np.ndarray) -> None:
    out = ["OFF", f"{len(vertices)} {len(triangles)} 0"]
    for v in np.asarray(vertices, dtype=float):
        out.append(" ".join(repr(float(c)) for c in v))
    for t in np.asarray(triangles, dtype=int):
        out.append("3 " + " ".join(str(int(i)) for i in t))
    Path(path).write_text("\n".join(out) + "\n")


# -- JSON abstract complexes ----------------------------------------------


def complex_to_dict(vertex_count: int, triangles, lengths: dict) -> dict:
    return {
        "format": JSON_FORMAT_NAME,
        "vertices": int(vertex_count),
        "triangles": [[int(i) for i in t] for t in triangles],
        "edge_lengths": [[a, b, float(l)] for (a, b), l in sorted(lengths.items())],
    }


def dict_to_complex(data: dict) -> MetricComplex:
    if data.get("format") != JSON_FORMAT_NAME:
        raise MeshFormatError(f"unknown complex format {data.get('format')!r}")
    try:
        lengths = {_edge_key(int(a), int(b)): float(l) for a, b, l in data["edge_lengths"]}
        return MetricComplex.from_edge_lengths(
            int(data["vertices"]), np.array(data["triangles"], dtype=int), lengths
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshFormatError(f"malformed complex dictionary ({exc})") from exc


def write_complex_json(path, vertex_count: int, triangles, lengths: dict) -> None:
    data = complex_to_dict(vertex_count, triangles, lengths)
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def read_complex_json(path) -> MetricComplex:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{path}: invalid JSON ({exc})") from exc
    return dict_to_complex(data)


def read_mesh(path) -> MetricComplex:
    """Dispatch on file suffix: .off or .json."""
    suffix = Path(path).suffix.lower()
    if suffix == ".off":
        return read_off(path)
    if suffix == ".json":
        return read_complex_json(path)
    raise MeshFormatError(f"{path}: unknown mesh format {suffix!r}")


def lengths_from_embedding(vertices: np.ndarray, triangles: np.ndarray) -> dict:
    verts = np.asarray(vertices, dtype=float)
    lengths = {}
    for a, b, c in np.asarray(triangles, dtype=int):
        for i, j in ((a, b), (b, c), (c, a)):
            lengths[_edge_key(int(i), int(j))] = float(np.linalg.norm(verts[j] - verts[i]))
    return lengths


# -- generators ------------------------------------------------------------


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    """Unit icosahedron with outward-oriented faces."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    verts = np.array(raw, dtype=float)
    verts /= np.linalg.norm(verts[0])
    faces = np.array(
        [
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
        ],
        dtype=int,
    )
    for f in faces:
        a, b, c = verts[f]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0.0:
            f[1], f[2] = f[2], f[1]
    return verts, faces


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Icosahedron subdivided ``level`` times, projected to the unit sphere."""
    verts, faces = icosahedron()
    verts = [v for v in verts]
    midpoint: dict[tuple[int, int], int] = {}

    def mid(i: int, j: int) -> int:
        key = _edge_key(i, j)
        if key not in midpoint:
            p = verts[i] + verts[j]
            p /= np.linalg.norm(p)
            midpoint[key] = len(verts)
            verts.append(p)
        return midpoint[key]

    for _ in range(level):
        midpoint.clear()
        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = np.array(new_faces, dtype=int)
    return np.array(verts), faces


def flat_grid(nx: int, ny: int) -> tuple[int, np.ndarray, dict]:
    """A unit-square grid split into triangles, as an abstract complex."""
    def vid(i: int, j: int) -> int:
        return i + (nx + 1) * j

    verts = np.array([(i, j) for j in range(ny + 1) for i in range(nx + 1)], dtype=float)
    tris = []
    for j in range(ny):
        for i in range(nx):
            tris.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    tris = np.array(tris, dtype=int)
    return len(verts), tris, lengths_from_embedding(np.column_stack([verts, np.zeros(len(verts))]), tris)


def cone(k: int, side: float = 1.0) -> tuple[int, np.ndarray, dict]:
    """k equilateral triangles fanned around an apex (abstract complex).

    The apex (vertex 0) is interior with angle defect 2 pi - k pi / 3.
    """
    if k < 3:
        raise ValueError("cone needs at least three triangles")
    tris = np.array([(0, i, i % k + 1) for i in range(1, k + 1)], dtype=int)
    lengths = {}
    for i in range(1, k + 1):
        lengths[_edge_key(0, i)] = side
        lengths[_edge_key(i, i % k + 1)] = side
    return k + 1, tris, lengths


def torus_grid(n: int, m: int) -> tuple[int, np.ndarray, dict]:
    """A flat n x m torus from a unit grid with wraparound (abstract complex)."""
    if n < 3 or m < 3:
        raise ValueError("torus grid needs n, m >= 3")

    def vid(i: int, j: int) -> int:
        return (i % n) + n * (j % m)

    tris = []
    for j in range(m):
        for i in range(n):
            tris.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    tris = np.array(tris, dtype=int)
    lengths = {}
    root2 = math.sqrt(2.0)
    for a, b, c in tris:
        for i, j in ((a, b), (b, c), (c, a)):
            lengths[_edge_key(int(i), int(j))] = 1.0
    for j in range(m):
        for i in range(n):
            lengths[_edge_key(vid(i, j), vid(i + 1, j + 1))] = root2
    return n * m, tris, lengths


def tetrahedron() -> tuple[np.ndarray, np.ndarray]:
    """Regular tetrahedron boundary, outward oriented, edge length 2 sqrt(2)."""
    verts = np.array(
        [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
    )
    faces = np.array([(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)], dtype=int)
    for f in faces:
        a, b, c = verts[f]
        if np.dot(np.cross(b - a, c - a), (a + b + c)) < 0.0:
            f[1], f[2] = f[2], f[1]
    return verts, faces


# -- latitude loops on embedded meshes -------------------------------------


def latitude_loop(K: MetricComplex, colatitude: float) -> tuple[list[int], list[int]]:
    """The closed dual loop of triangles straddling z = cos(colatitude).

    Returns (loop, enclosed): the loop is a closed triangle-index path
    (first == last) winding counterclockwise around the +z axis, and
    ``enclosed`` lists the vertices above the cut.  Requires an embedded
    complex (vertices with z coordinates).
    """
    if K.embedding is None or K.embedding.shape[1] != 3:
        raise MeshFormatError("latitude loops need a 3D embedded complex")
    z_cut = math.cos(colatitude)
    above = K.embedding[:, 2] > z_cut
    enclosed = [int(v) for v in np.flatnonzero(above)]
    if not enclosed or len(enclosed) == K.vertex_count:
        raise BoundaryHingeError("latitude circle does not separate the mesh")

    cut_edges = [
        key for key in K.interior_edges if above[key[0]] != above[key[1]]
    ]
    band: dict[int, list[tuple[int, int]]] = {}
    for key in cut_edges:
        for t, _ in K.edge_cofaces[key]:
            band.setdefault(t, []).append(key)
    for t, keys in band.items():
        if len(keys) != 2:
            raise MeshFormatError(f"triangle {t} has {len(keys)} cut edges; bad band")

    start = min(band)
    # Walk the band: leave each triangle through the cut edge not used to enter.
    loop = [start]
    enter = None
    t = start
    while True:
        exits = [k for k in band[t] if k != enter]
        key = sorted(exits)[0]
        t = next(tt for tt, _ in K.edge_cofaces[key] if tt != t)
        enter = key
        if t == start:
            break
        loop.append(t)
        if len(loop) > len(band):
            raise MeshFormatError("latitude band is not a single cycle")
    if len(loop) != len(band):
        raise MeshFormatError("latitude band has more than one cycle")
    loop.append(start)

    # Orient the walk counterclockwise as seen from +z.
    centers = np.array([K.embedding[K.triangles[t]].mean(axis=0) for t in loop[:-1]])
    angles = np.arctan2(centers[:, 1], centers[:, 0])
    winding = np.angle(np.exp(1j * np.diff(np.concatenate([angles, angles[:1]])))).sum()
    if winding < 0.0:
        loop = loop[::-1]
    return loop, enclosed
