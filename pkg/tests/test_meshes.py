"""Mesh generators and the two interchange formats."""

import json
import math

import numpy as np
import pytest

from dconn.errors import MeshFormatError
from dconn.levi_civita import MetricComplex
from dconn.meshes import (
    complex_to_dict,
    cone,
    dict_to_complex,
    flat_grid,
    icosahedron,
    icosphere,
    lengths_from_embedding,
    read_complex_json,
    read_mesh,
    read_off,
    tetrahedron,
    torus_grid,
    write_complex_json,
    write_off,
)


# -- generators -----------------------------------------------------------------


def test_icosahedron_is_regular_unit_and_outward():
    verts, faces = icosahedron()
    assert verts.shape == (12, 3)
    assert faces.shape == (20, 3)
    assert np.max(np.abs(np.linalg.norm(verts, axis=1) - 1.0)) < 1e-12
    lengths = {frozenset((int(a), int(b)))
               for tri in faces for a, b in zip(tri, np.roll(tri, 1))}
    assert len(lengths) == 30
    sides = [np.linalg.norm(verts[list(e)[0]] - verts[list(e)[1]]) for e in lengths]
    assert max(sides) - min(sides) < 1e-12
    for a, b, c in faces:
        n = np.cross(verts[b] - verts[a], verts[c] - verts[a])
        assert n @ (verts[a] + verts[b] + verts[c]) > 0.0


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_icosphere_counts_and_topology(level):
    verts, faces = icosphere(level)
    assert len(verts) == 10 * 4**level + 2
    assert len(faces) == 20 * 4**level
    assert np.max(np.abs(np.linalg.norm(verts, axis=1) - 1.0)) < 1e-12
    if level <= 2:
        K = MetricComplex.from_embedding(verts, faces)
        assert K.is_closed()
        assert K.euler_characteristic() == 2


def test_flat_grid_structure():
    n, tris, lengths = flat_grid(3, 2)
    assert n == 12
    assert len(tris) == 12
    values = sorted(set(round(l, 12) for l in lengths.values()))
    assert values == [1.0, round(math.sqrt(2.0), 12)]
    K = MetricComplex.from_edge_lengths(n, tris, lengths)
    assert K.euler_characteristic() == 1


def test_cone_structure_and_validation():
    n, tris, lengths = cone(4, side=2.0)
    assert n == 5
    assert len(tris) == 4
    assert all(l == 2.0 for l in lengths.values())
    with pytest.raises(ValueError):
        cone(2)


def test_torus_structure_and_validation():
    n, tris, lengths = torus_grid(4, 3)
    assert n == 12
    assert len(tris) == 24
    K = MetricComplex.from_edge_lengths(n, tris, lengths)
    assert K.is_closed()
    assert K.euler_characteristic() == 0
    with pytest.raises(ValueError):
        torus_grid(2, 5)
    with pytest.raises(ValueError):
        torus_grid(5, 2)


def test_tetrahedron_is_closed_and_regular():
    verts, faces = tetrahedron()
    K = MetricComplex.from_embedding(verts, faces)
    assert K.is_closed()
    assert K.euler_characteristic() == 2
    sides = [np.linalg.norm(verts[a] - verts[b])
             for a, b, c in faces for a, b in ((a, b), (b, c), (c, a))]
    assert max(sides) - min(sides) < 1e-12
    assert sides[0] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)


def test_lengths_from_embedding_matches_distances():
    verts, faces = icosahedron()
    lengths = lengths_from_embedding(verts, faces)
    for (a, b), l in lengths.items():
        assert a < b
        assert l == pytest.approx(np.linalg.norm(verts[a] - verts[b]), abs=1e-15)


# -- JSON format --------------------------------------------------------------------


def test_json_round_trip_is_byte_exact(tmp_path):
    n, tris, lengths = torus_grid(3, 3)
    path = tmp_path / "torus.json"
    write_complex_json(path, n, tris, lengths)
    raw = path.read_text()
    assert raw == json.dumps(json.loads(raw), sort_keys=True, indent=2) + "\n"
    # Parse, rebuild, re-serialize: identical bytes.
    K = read_complex_json(path)
    again = tmp_path / "torus2.json"
    rebuilt_lengths = {k: K._edge_length_in(K.edge_cofaces[k][0][0], k)
                       for k in K.edge_cofaces}
    write_complex_json(again, K.vertex_count, K.triangles, rebuilt_lengths)
    assert again.read_text() == raw


def test_json_semantic_round_trip():
    n, tris, lengths = cone(5)
    K = dict_to_complex(complex_to_dict(n, tris, lengths))
    direct = MetricComplex.from_edge_lengths(n, tris, lengths)
    assert K.vertex_count == direct.vertex_count
    assert np.array_equal(K.triangles, direct.triangles)
    assert np.max(np.abs(K.chart_metrics - direct.chart_metrics)) < 1e-15


def test_json_rejects_unknown_format_and_junk(tmp_path):
    with pytest.raises(MeshFormatError):
        dict_to_complex({"format": "something-else"})
    with pytest.raises(MeshFormatError):
        dict_to_complex({"format": "dconn-complex", "vertices": 3})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(MeshFormatError):
        read_complex_json(bad)


# -- OFF format -----------------------------------------------------------------------


def test_off_round_trip_is_exact(tmp_path):
    verts, faces = icosphere(1)
    path = tmp_path / "sphere.off"
    write_off(path, verts, faces)
    K = read_off(path)
    assert np.array_equal(K.embedding, verts)
    assert np.array_equal(K.triangles, faces)
    direct = MetricComplex.from_embedding(verts, faces)
    assert np.array_equal(K.chart_metrics, direct.chart_metrics)


def test_off_tolerates_comments_and_blank_lines(tmp_path):
    verts, faces = tetrahedron()
    path = tmp_path / "tet.off"
    write_off(path, verts, faces)
    noisy = tmp_path / "noisy.off"
    noisy.write_text("# a comment\n" + path.read_text().replace("\n", "\n\n", 3))
    K = read_mesh(noisy)
    assert np.array_equal(K.triangles, faces)


def test_off_rejects_malformed_files(tmp_path):
    missing = tmp_path / "h.off"
    missing.write_text("FOO\n3 1 0\n")
    with pytest.raises(MeshFormatError):
        read_off(missing)
    quad = tmp_path / "q.off"
    quad.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(MeshFormatError):
        read_off(quad)
    short = tmp_path / "s.off"
    short.write_text("OFF\n5 1 0\n0 0 0\n")
    with pytest.raises(MeshFormatError):
        read_off(short)
    flat2d = tmp_path / "f.off"
    flat2d.write_text("OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 2\n")
    with pytest.raises(MeshFormatError):
        read_off(flat2d)


def test_read_mesh_dispatch(tmp_path):
    n, tris, lengths = cone(5)
    jpath = tmp_path / "cone.json"
    write_complex_json(jpath, n, tris, lengths)
    assert read_mesh(jpath).vertex_count == n
    verts, faces = tetrahedron()
    opath = tmp_path / "tet.off"
    write_off(opath, verts, faces)
    assert read_mesh(opath).vertex_count == 4
    stray = tmp_path / "mesh.obj"
    stray.write_text("whatever")
    with pytest.raises(MeshFormatError):
        read_mesh(stray)
