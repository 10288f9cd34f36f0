import numpy as np
import pytest
import shapely

from oracles import Grid, ngon, pixel_area
from suite import random_scenes, square
from signorini_lab.geometry import (
    EdgeTag,
    GeometryError,
    PolygonalSet,
    boolean_ops,
    check_appendix_lemmas,
    circle,
    classify_boundary,
    compute_G0,
    compute_V,
    polygon,
)
from signorini_lab.scene import load_scene

OMEGA = circle((0, 0), 1.0, 128, source="omega")


def test_disjoint_union_and_self_difference():
    a = polygon([(0, 0), (1, 0), (1, 1), (0, 1)], source="a")
    b = polygon([(2, 0), (3, 0), (3, 1), (2, 1)], source="b")
    u = boolean_ops(a, b, "union")
    assert u.area == pytest.approx(2.0, abs=1e-14)
    assert len(u.polygons) == 2
    d = boolean_ops(a, a, "difference")
    assert d.is_empty and d.area == 0.0


def test_intersection_area_matches_pixel_oracle():
    # oracle: 4096^2 pixel count of the two 64-gons
    a = circle((-0.3, 0.0), 0.5, 64, source="a")
    b = circle((0.3, 0.0), 0.5, 64, source="b")
    g = Grid(-1.0, 1.0, 4096)
    both = g.fill([ngon((-0.3, 0.0), 0.5, 64)]) & g.fill([ngon((0.3, 0.0), 0.5, 64)])
    oracle = float(both.sum()) * g.dx**2
    assert boolean_ops(a, b, "intersection").area == pytest.approx(oracle, rel=1e-3)


def test_pixel_oracle_self_check():
    assert pixel_area([ngon((0, 0), 0.5, 64)]) == pytest.approx(shapely.Polygon(ngon((0, 0), 0.5, 64)).area,
                                                                rel=1e-4)


@pytest.mark.parametrize("shift", [0.2, 0.55, 0.9])
def test_area_additivity(shift):
    a = circle((0, 0), 0.4, 64, source="a")
    b = polygon(np.array([(-0.3, -0.3), (0.3, -0.3), (0.3, 0.3), (-0.3, 0.3)]) + (shift, 0.1), source="b")
    u, i = boolean_ops(a, b, "union"), boolean_ops(a, b, "intersection")
    tol = 1e-9 * (a.perimeter + b.perimeter)
    assert u.area == pytest.approx(a.area + b.area - i.area, abs=tol)
    assert boolean_ops(a, b, "difference").area == pytest.approx(a.area - i.area, abs=tol)


def test_provenance_propagates():
    a = circle((0, 0), 0.4, 64, source="a")
    b = circle((0.3, 0), 0.4, 64, source="b")
    for kind in ("union", "intersection", "difference"):
        r = boolean_ops(a, b, kind)
        for ring in r.rings():
            assert len(ring.tags) == len(ring)
            assert {t.source for t in ring.tags} <= {"a", "b"}
    # the difference boundary inside a is inherited from b with flipped orientation
    d = boolean_ops(a, b, "difference")
    signs = {t.source: t.sign for r in d.rings() for t in r.tags}
    assert signs["b"] == -signs["a"]


def test_invalid_polygons_rejected():
    with pytest.raises(GeometryError):
        polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # bow tie
    with pytest.raises(GeometryError):
        polygon([(0, 0), (1, 0)])


def test_g0_disjoint_disks():
    O1 = circle((-0.4, 0), 0.2, 64, source="obstacle1")
    O2 = circle((0.4, 0), 0.2, 64, source="obstacle2")
    G0 = compute_G0(OMEGA, O1, O2)
    assert len(G0.polygons) == 1
    assert G0.area == pytest.approx(OMEGA.area - O1.area - O2.area, rel=1e-12)


def test_g0_without_obstacles():
    e = PolygonalSet.empty()
    assert compute_G0(OMEGA, e, e).area == pytest.approx(OMEGA.area, rel=1e-14)


def test_g0_excludes_crescent_pocket():
    sc = load_scene("crescents.json")
    O1, O2 = sc.obstacle("obstacle1"), sc.obstacle("obstacle2")
    G0 = compute_G0(sc.omega, O1, O2)
    free = boolean_ops(sc.omega, boolean_ops(O1, O2, "union"), "difference")
    assert len(free.polygons) == 2
    pocket_area = free.area - G0.area
    assert pocket_area > 0.1
    assert not G0.contains_points(np.array([[0.0, 0.0]]))[0]


def test_g0_collar_of_outer_boundary():
    sc = load_scene("crescents.json")
    G0 = compute_G0(sc.omega, sc.obstacle("obstacle1"), sc.obstacle("obstacle2"))
    v = sc.omega.vertices()
    assert np.all(G0.distance_to_boundary(v) <= 1e-12)
    inside = 0.99 * v
    assert np.all(G0.contains_points(inside))


def test_v_cases():
    O1 = circle((-0.4, 0), 0.2, 64, source="obstacle1")
    O2 = circle((0.4, 0), 0.2, 64, source="obstacle2")
    V = compute_V(OMEGA, compute_G0(OMEGA, O1, O2), O1, O2)
    assert V.area == pytest.approx(O1.area, rel=1e-12)
    assert boolean_ops(V, O1, "difference").area < 1e-12
    e = PolygonalSet.empty()
    V = compute_V(OMEGA, compute_G0(OMEGA, O1, e), O1, e)
    assert V.area == pytest.approx(O1.area, rel=1e-12)
    inner = circle((0.4, 0), 0.1, 64, source="obstacle1")
    with pytest.raises(GeometryError):
        compute_V(OMEGA, compute_G0(OMEGA, inner, O2), inner, O2)


def test_classify_disjoint_all_same():
    O1 = circle((-0.4, 0), 0.2, 64, source="obstacle1")
    O2 = circle((0.4, 0), 0.2, 64, source="obstacle2")
    V = compute_V(OMEGA, compute_G0(OMEGA, O1, O2), O1, O2)
    tags = {e.tag for e in classify_boundary(V, O1, O2)}
    assert tags == {EdgeTag.SAME_AS_O1}


def test_classify_overlapping_lengths_match_provenance_oracle():
    O1 = circle((-0.15, 0), 0.3, 128, source="obstacle1")
    O2 = circle((0.15, 0), 0.3, 128, source="obstacle2")
    V = compute_V(OMEGA, compute_G0(OMEGA, O1, O2), O1, O2)
    cls = classify_boundary(V, O1, O2)
    same = sum(e.length for e in cls if e.tag == EdgeTag.SAME_AS_O1)
    opp = sum(e.length for e in cls if e.tag == EdgeTag.OPPOSITE_OF_O2)
    # oracle: the part of each obstacle boundary lying outside / inside the other obstacle
    s1, s2 = O1.to_shapely(), O2.to_shapely()
    assert same == pytest.approx(s1.exterior.difference(s2).length, rel=1e-9)
    assert opp == pytest.approx(s2.exterior.intersection(s1).length, rel=1e-9)
    corners = [e for e in cls if e.tag == EdgeTag.CORNER]
    assert len(corners) == 2 and all(e.length == 0 for e in corners)


def test_classify_pocket_all_opposite():
    O2 = polygon([(-0.6, -0.6), (0.6, -0.6), (0.6, 0.6), (-0.6, 0.6)], source="obstacle2",
                 holes=[[(-0.2, -0.2), (0.2, -0.2), (0.2, 0.2), (-0.2, 0.2)]])
    V = polygon([(-0.2, -0.2), (0.2, -0.2), (0.2, 0.2), (-0.2, 0.2)], source="obstacle1")
    O1 = circle((0.0, 0.0), 0.1, 32, source="obstacle1")
    assert {e.tag for e in classify_boundary(V, O1, O2)} == {EdgeTag.OPPOSITE_OF_O2}


def test_perimeter_bound_and_determinism():
    for omega, O1, O2, G0, V, _ in random_scenes(6, seed=11):
        assert V.perimeter <= O1.perimeter + O2.perimeter + 1e-12
        G0b = compute_G0(omega, O1, O2)
        Vb = compute_V(omega, G0b, O1, O2)
        assert np.array_equal(G0.vertices(), G0b.vertices())
        assert np.array_equal(V.vertices(), Vb.vertices())


def test_lemma_trivial_instances():
    A = circle((0, 0), 0.3, 64, source="a")
    rep = check_appendix_lemmas(pairs=[(A, A)])
    assert rep.count("boundary_inclusion") == 1 and rep.passed
    E = square((-0.5, 0), 0.5, source="e")
    F = square((0.5, 0), 0.5, source="f")
    rep = check_appendix_lemmas(pairs=[(E, F)])
    assert rep.count("normal_alignment") == 1 and rep.passed
    assert "1 shared pieces" in rep.entries[-1]["detail"]
