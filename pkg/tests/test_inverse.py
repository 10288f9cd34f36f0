import numpy as np
import pytest

from oracles import radial_annulus
from suite import suite_obstacles
from signorini_lab.elastic import RigidMotion
from signorini_lab.expr import Expression
from signorini_lab.geometry import PolygonalSet, circle
from signorini_lab.inverse import (
    ExperimentConfig,
    UpsilonQuery,
    Verdict,
    distinguishability,
    forward_map,
    reconstruct,
    star_obstacle,
    synthetic_target,
    upsilon_empty_certificate,
    upsilon_membership,
)
from signorini_lab.scene import Scene, load_scene


@pytest.fixture(scope="module")
def annulus():
    return load_scene("annulus.json")


def test_config_validation(annulus):
    with pytest.raises(ValueError):
        ExperimentConfig("thermal", annulus, -1.0, 1 / 32)
    with pytest.raises(ValueError):
        ExperimentConfig("scalar", annulus, -1.0, 0.0)
    with pytest.raises(ValueError):
        ExperimentConfig("scalar", annulus, -1.0, 1 / 32, levels=0)
    no_gamma = Scene("bare", circle((0, 0), 1.0, 64, source="omega"), {})
    with pytest.raises(ValueError):
        ExperimentConfig("scalar", no_gamma, -1.0, 1 / 32)


def test_forward_map_radial_flux_and_determinism(annulus):
    cfg = ExperimentConfig("scalar", annulus, -1.0, 1 / 32)
    a = forward_map(cfg, "obstacle1")
    b = forward_map(cfg, annulus.obstacle("obstacle1"))
    assert np.array_equal(a.values, b.values) and np.array_equal(a.arc, b.arc)
    _, _, flux_gamma = radial_annulus(1.0)
    assert flux_gamma == pytest.approx(-0.8306, abs=1e-4)
    assert np.max(np.abs(a.values - flux_gamma)) < 0.05


def test_distinguishability_is_symmetric():
    cfg = ExperimentConfig("scalar", load_scene("pair.json"), Expression("x"), 1 / 32)
    ab = distinguishability(cfg, "obstacle1", "obstacle2")
    ba = distinguishability(cfg, "obstacle2", "obstacle1")
    assert ab.verdict == ba.verdict == Verdict.DISTINGUISHED
    assert ab.gap_l2 == ba.gap_l2 and ab.gap_linf == ba.gap_linf
    assert ab.error_estimate == ba.error_estimate
    assert ab.to_dict()["verdict"] == "DISTINGUISHED"


def test_nonnegative_constant_flux_vanishes_for_every_obstacle(annulus):
    for name, O in suite_obstacles().items():
        h = 1 / 64 if name.startswith("ball") else 1 / 32
        meas = forward_map(ExperimentConfig("scalar", annulus, 0.5, h), O)
        assert meas.norm_inf() < 1e-12, name


def test_upsilon_examples():
    ball = load_scene("ball.json").obstacle("obstacle1")
    about_origin = RigidMotion((0.0, 0.0), 0.1)
    member, res = upsilon_membership(UpsilonQuery(ball, about_origin, 1e-3))
    assert not member and res > 0.01
    assert upsilon_membership(UpsilonQuery(ball, RigidMotion(), 1e-12)) == (True, 0.0)
    assert upsilon_membership(UpsilonQuery(PolygonalSet.empty(), about_origin, 1e-12))[0]
    assert not upsilon_empty_certificate(about_origin, load_scene("ball.json").omega)
    with pytest.raises(ValueError):
        UpsilonQuery(ball, about_origin, 0.0)


def test_reconstruct_fixed_point(annulus):
    cfg = ExperimentConfig("scalar", annulus, Expression("x"), 1 / 32)
    target = synthetic_target(cfg, star_obstacle((0, 0), 0.3))
    res = reconstruct(cfg, target, 0.3)
    assert res.status == "converged" and res.iterations == 0 and res.r0 == 0.3


def test_reconstruct_crime_free(annulus):
    cfg = ExperimentConfig("scalar", annulus, Expression("x"), 1 / 32, crime_free=True)
    target = synthetic_target(cfg, star_obstacle((0, 0), 0.25))
    res = reconstruct(cfg, target, 0.35)
    assert abs(res.r0 - 0.25) / 0.25 < 0.05
    assert np.all(np.diff(res.history) <= 0)


def test_reconstruct_stagnates_for_rigid_elastic_datum(annulus):
    # a rotation about the center is tangent to every centered disk: no information
    cfg = ExperimentConfig("elastic", annulus, RigidMotion.about((0, 0), 0.1), 1 / 32)
    target = synthetic_target(cfg, star_obstacle((0, 0), 0.25))
    res = reconstruct(cfg, target, 0.35)
    assert res.status == "stagnated"
    assert res.r0 == 0.35


def test_reconstruct_rejects_bad_input(annulus):
    cfg = ExperimentConfig("scalar", annulus, Expression("x"), 1 / 32)
    target = synthetic_target(cfg, star_obstacle((0, 0), 0.3))
    with pytest.raises(ValueError):
        reconstruct(cfg, target, 0.3, K=5)
    with pytest.raises(ValueError):
        reconstruct(cfg, target, 0.97)
    with pytest.raises(ValueError):
        star_obstacle((0, 0), 0.1, a=(0.2,))
