import numpy as np
import pytest

from suite import square
from signorini_lab.elastic import (
    RigidMotion,
    elastic_energy,
    fit_rigid_motion,
    gauss_green_check_elastic,
    recover_traction,
    solve_elastic,
)
from signorini_lab.fem import LameField
from signorini_lab.geometry import polygon
from signorini_lab.mesh import BoundaryTag, triangulate

COMPRESS = lambda x, y: np.column_stack([-0.05 * x, -0.05 * y])
STRETCH = lambda x, y: np.column_stack([0.05 * x, 0.05 * y])


@pytest.fixture(scope="module")
def lame(annulus_mesh):
    return LameField.constant(annulus_mesh, 1.0, 1.0)


@pytest.fixture(scope="module")
def compressed(annulus_mesh, lame):
    return solve_elastic(annulus_mesh, lame, COMPRESS)


def test_rotation_about_center_is_exact(annulus_mesh, lame):
    rm = RigidMotion.about((0.0, 0.0), 0.1)
    sol = solve_elastic(annulus_mesh, lame, rm)
    assert np.max(np.abs(sol.u - rm(annulus_mesh.nodes))) < 1e-12
    t = recover_traction(sol, annulus_mesh, lame, BoundaryTag.GAMMA)
    assert np.max(np.abs(t.values)) < 1e-10


def test_stretch_is_exact_with_constant_stress(unit_disk):
    # no obstacle: a hole would be traction free and bend the linear field
    mesh = triangulate(unit_disk, 1 / 16)
    lame = LameField.constant(mesh, 1.0, 1.0)
    sol = solve_elastic(mesh, lame, STRETCH)
    assert np.max(np.abs(sol.u - 0.05 * mesh.nodes)) < 1e-12
    # sigma = (2 mu + 2 lambda) 0.05 I = 0.2 I
    t = recover_traction(sol, mesh, lame, BoundaryTag.GAMMA)
    nrm = mesh.node_normals[t.nodes]
    assert np.max(np.abs(t.values - 0.2 * nrm)) < 1e-12


def test_compression_matches_pgs_and_is_frictionless(annulus_mesh, lame, compressed):
    assert len(compressed.active_set) > 0
    assert compressed.complementarity_ok()
    assert np.all(compressed.pressure <= compressed.tol_c)
    ref = solve_elastic(annulus_mesh, lame, COMPRESS, solver="pgs")
    assert np.max(np.abs(ref.u - compressed.u)) < 1e-8
    t = recover_traction(compressed, annulus_mesh, lame, BoundaryTag.OBSTACLE)
    assert np.max(np.abs(t.tangential)) < 1e-8


def test_tangential_rigid_superposition(annulus_mesh, lame, compressed):
    # a rotation about the obstacle center slides along it, so it superposes
    rm = RigidMotion.about((0.0, 0.0), 0.1)
    shifted = solve_elastic(annulus_mesh, lame, lambda x, y: COMPRESS(x, y) + rm(x, y))
    assert np.max(np.abs(shifted.u - compressed.u - rm(annulus_mesh.nodes))) < 1e-10
    fit, dev = fit_rigid_motion(shifted.u - compressed.u, annulus_mesh)
    assert fit.omega == pytest.approx(0.1, abs=1e-10) and dev < 1e-10


def test_minimizes_energy_over_feasible_perturbations(annulus_mesh, lame, compressed):
    m, sol = annulus_mesh, compressed
    rng = np.random.default_rng(3)
    bnd = m.nodes_with_tag(BoundaryTag.OUTER, BoundaryTag.GAMMA)
    obs, nrm = sol.obstacle_nodes, sol.normals
    e0 = elastic_energy(m, lame, sol.u)
    for _ in range(50):
        v = sol.u + rng.normal(scale=10 ** rng.uniform(-4, -2), size=sol.u.shape)
        v[bnd] = sol.u[bnd]
        un = np.einsum("kd,kd->k", v[obs], nrm)
        v[obs] -= np.maximum(un, 0.0)[:, None] * nrm
        assert elastic_energy(m, lame, v) >= e0 - 1e-12


def test_lame_field_validation(annulus_mesh):
    with pytest.raises(ValueError):
        LameField.constant(annulus_mesh, 0.0, 1.0)
    with pytest.raises(ValueError):
        LameField.from_functions(annulus_mesh, 1.0, lambda x, y: x)
    lf = LameField.from_functions(annulus_mesh, lambda x, y: 1 + x**2, 2.0)
    assert lf.mu.shape == (annulus_mesh.n_triangles,) and np.all(lf.lam == 2.0)


def test_gauss_green_rigid_motion(annulus_mesh, lame):
    rm = RigidMotion.about((0.0, 0.0), 0.1)
    sol = solve_elastic(annulus_mesh, lame, rm)
    V = square((0.5, 0.0), 0.1)
    rep = gauss_green_check_elastic(sol, V, annulus_mesh, lame)
    assert abs(rep.volume) < 1e-20 and rep.residual < 1e-12


def test_gauss_green_constant_stress_square():
    omega = polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)], source="omega")
    mesh = triangulate(omega, 1 / 16)
    lame = LameField.constant(mesh, 1.0, 1.0)
    sol = solve_elastic(mesh, lame, lambda x, y: np.column_stack([0.05 * x, -0.02 * y]))
    rep = gauss_green_check_elastic(sol, square((0.05, 0.02), 0.25), mesh, lame)
    # eps = diag(0.05, -0.02), sigma = diag(0.13, -0.01), sigma:eps = 0.0067
    assert rep.volume == pytest.approx(0.0067 * 0.25, rel=1e-12)
    assert rep.boundary == pytest.approx(rep.volume, rel=1e-10)
    assert rep.bookkeeping <= rep.quadrature_bound


def test_rigid_motion_helpers():
    rm = RigidMotion.about((0.1, 0.05), 0.2)
    assert np.allclose(rm(np.array([[0.1, 0.05]])), 0.0, atol=1e-17)
    assert rm.norm_c() == pytest.approx(0.2 * np.hypot(0.1, 0.05))
    with pytest.raises(ValueError):
        RigidMotion((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        fit_rigid_motion(np.zeros((3, 2)), np.array([[0, 0], [1, 1], [2, 2.0]]))
