import io

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import robineig as rb
from robineig.errors import (
    DegenerateEdge,
    EmptyRegion,
    LabelCountMismatch,
    MeshFailure,
    SelfIntersection,
)

from conftest import SQUARE_LABELS, SQUARE_VERTICES


# -- polygon construction -----------------------------------------------------


def test_square_polygon_basics(unit_square):
    assert unit_square.n_segments == 4
    assert unit_square.arc_labels == ("bottom", "right", "top", "left")
    assert_allclose(unit_square.area, 1.0)
    p, q = unit_square.segment(1)
    assert_array_equal(p, [1.0, 0.0])
    assert_array_equal(q, [1.0, 1.0])


def test_clockwise_input_is_normalized():
    cw = [[0, 0], [0, 1], [1, 1], [1, 0]]
    # labels name the edge *after* each vertex in the given order
    dom = rb.build_polygon(cw, ["left", "top", "right", "bottom"])
    assert dom.area > 0
    # same geometric edge keeps its label after orientation flip
    labels = {}
    for i in range(4):
        p, q = dom.segment(i)
        key = tuple(sorted([tuple(p), tuple(q)]))
        labels[key] = dom.arc_labels[i]
    assert labels[((0.0, 0.0), (1.0, 0.0))] == "bottom"
    assert labels[((0.0, 1.0), (1.0, 1.0))] == "top"


def test_label_count_mismatch():
    with pytest.raises(LabelCountMismatch):
        rb.build_polygon(SQUARE_VERTICES, ["a", "b", "c"])


def test_self_intersection_rejected():
    bowtie = [[0, 0], [1, 1], [1, 0], [0, 1]]
    with pytest.raises(SelfIntersection):
        rb.build_polygon(bowtie, ["a", "b", "c", "d"])


def test_degenerate_edge_rejected():
    verts = [[0, 0], [1, 0], [1, 0], [0, 1]]
    with pytest.raises(DegenerateEdge):
        rb.build_polygon(verts, ["a", "b", "c", "d"])


def test_lshape_area(lshape):
    assert_allclose(lshape.area, 0.75)


# -- meshing ------------------------------------------------------------------


def test_square_base_triangulation(unit_square):
    mesh = rb.mesh_uniform(unit_square, 1.5)
    assert mesh.n_nodes == 4
    assert len(mesh.triangles) == 2
    assert_allclose(mesh.h, np.sqrt(2.0))
    assert_allclose(mesh.triangle_areas().sum(), 1.0)


def test_square_one_refinement(unit_square):
    mesh = rb.mesh_uniform(unit_square, 0.75)
    assert len(mesh.triangles) == 8
    assert mesh.n_nodes == 9
    assert_allclose(mesh.h, np.sqrt(2.0) / 2.0)


def test_h_target_respected(unit_square):
    for ht in (0.5, 0.2, 0.1):
        mesh = rb.mesh_uniform(unit_square, ht)
        assert mesh.h <= ht
        # exactly the first level at which the halving sequence fits
        assert mesh.h * 2.0 > ht


def test_mesh_failure_nonpositive_target(unit_square):
    with pytest.raises(MeshFailure):
        rb.mesh_uniform(unit_square, 0.0)
    with pytest.raises(MeshFailure):
        rb.mesh_uniform(unit_square, -1.0)


def test_mesh_failure_absurd_target_raises_fast(unit_square):
    # would need > 30 refinement levels; must fail without building them
    with pytest.raises(MeshFailure):
        rb.mesh_uniform(unit_square, 1e-12)


def test_refine_counts_and_h(coarse_mesh):
    fine = rb.refine(coarse_mesh)
    assert len(fine.triangles) == 4 * len(coarse_mesh.triangles)
    assert_allclose(fine.h, coarse_mesh.h / 2.0)
    assert_allclose(fine.triangle_areas().sum(), coarse_mesh.triangle_areas().sum())
    # parents' nodes survive with identical coordinates and indices
    assert_array_equal(fine.nodes[: coarse_mesh.n_nodes], coarse_mesh.nodes)


def test_mesh_invariants(mesh16):
    # positive areas, CCW orientation
    assert np.all(mesh16.triangle_areas() > 0)
    # conformity: interior edges shared by exactly two triangles
    counts = {}
    for tri in mesh16.triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    assert set(counts.values()) <= {1, 2}
    boundary_keys = {k for k, v in counts.items() if v == 1}
    mesh_bkeys = {
        (min(e.n1, e.n2), max(e.n1, e.n2)) for e in mesh16.boundary_edges
    }
    assert boundary_keys == mesh_bkeys


def test_boundary_normals_outward_unit(mesh8):
    for e in mesh8.boundary_edges:
        assert_allclose(np.hypot(*e.normal), 1.0, atol=1e-14)
        p, q = mesh8.nodes[e.n1], mesh8.nodes[e.n2]
        mid = (p + q) / 2.0
        # the square's outward normal at an edge midpoint points away from
        # the centroid (0.5, 0.5)
        assert np.dot(e.normal, mid - [0.5, 0.5]) > 0


def test_boundary_nodes_sorted(mesh8):
    bn = mesh8.boundary_nodes
    assert np.all(np.diff(bn) > 0)
    on_boundary = (
        (np.abs(mesh8.nodes[:, 0]) < 1e-14)
        | (np.abs(mesh8.nodes[:, 0] - 1) < 1e-14)
        | (np.abs(mesh8.nodes[:, 1]) < 1e-14)
        | (np.abs(mesh8.nodes[:, 1] - 1) < 1e-14)
    )
    assert_array_equal(bn, np.nonzero(on_boundary)[0])


def test_arc_parameters_tile_each_segment(mesh8):
    by_segment = {}
    for e in mesh8.boundary_edges:
        by_segment.setdefault(e.segment, []).append((e.t0, e.t1))
    assert set(by_segment) == {0, 1, 2, 3}
    for ivals in by_segment.values():
        ivals.sort()
        assert_allclose(ivals[0][0], 0.0, atol=1e-15)
        assert_allclose(ivals[-1][1], 1.0, atol=1e-15)
        for (a0, a1), (b0, b1) in zip(ivals, ivals[1:]):
            assert_allclose(a1, b0, atol=1e-15)
            assert a0 < a1


def test_lshape_mesh(lshape):
    mesh = rb.mesh_uniform(lshape, 0.25)
    assert mesh.h <= 0.25
    assert_allclose(mesh.triangle_areas().sum(), 0.75)
    labels = {e.label for e in mesh.boundary_edges}
    assert labels == {"bottom", "right", "notch", "top", "left"}


# -- boundary regions ---------------------------------------------------------


def test_boundary_region_lengths(mesh8):
    bottom = rb.boundary_region(mesh8, "bottom")
    assert_allclose(bottom.total_length, 1.0)
    both = rb.boundary_region(mesh8, ["bottom", "top"])
    assert_allclose(both.total_length, 2.0)
    everything = rb.boundary_region(mesh8, SQUARE_LABELS)
    assert_allclose(everything.total_length, 4.0)
    assert len(everything.edge_ids) == len(mesh8.boundary_edges)


def test_boundary_region_unknown_label(mesh8):
    with pytest.raises(EmptyRegion):
        rb.boundary_region(mesh8, "no-such-arc")
    with pytest.raises(EmptyRegion):
        rb.boundary_region(mesh8, [])


# -- text format --------------------------------------------------------------


def test_mesh_round_trip_exact(mesh8, tmp_path):
    path = tmp_path / "square.mesh"
    rb.write_mesh(mesh8, path)
    back = rb.read_mesh(path)
    assert_array_equal(back.nodes, mesh8.nodes)
    assert_array_equal(back.triangles, mesh8.triangles)
    assert back.h == mesh8.h
    assert len(back.boundary_edges) == len(mesh8.boundary_edges)
    for e1, e2 in zip(back.boundary_edges, mesh8.boundary_edges):
        assert (e1.n1, e1.n2, e1.label) == (e2.n1, e2.n2, e2.label)
        assert_allclose(e1.normal, e2.normal, atol=1e-15)
        assert_allclose([e1.t0, e1.t1], [e2.t0, e2.t1], atol=1e-15)


def test_mesh_round_trip_assembles_identical_matrices(mesh8, lap, tmp_path):
    path = tmp_path / "square.mesh"
    rb.write_mesh(mesh8, path)
    back = rb.read_mesh(path)
    theta = rb.robin_indicator(["bottom"], 1.0)
    F1 = rb.assemble_form(mesh8, lap, theta)
    F2 = rb.assemble_form(back, lap, theta)
    for A, B in ((F1.S0, F2.S0), (F1.B_theta, F2.B_theta), (F1.M, F2.M)):
        assert (A != B).nnz == 0  # entrywise equal, not merely close


def test_read_mesh_rejects_bad_header():
    with pytest.raises(MeshFailure):
        rb.read_mesh(io.StringIO("not a mesh\n"))


def test_read_mesh_rejects_dangling_triangle():
    text = "mesh 2d\nnode 0 0 0\nnode 1 1 0\nnode 2 0 1\ntri 0 0 1 5\n"
    with pytest.raises(MeshFailure):
        rb.read_mesh(io.StringIO(text))
