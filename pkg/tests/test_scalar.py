import math

import numpy as np
import pytest

from oracles import p1_l2, radial_annulus
from suite import polar_annulus
from signorini_lab.expr import Expression
from signorini_lab.geometry import boolean_ops, circle
from signorini_lab.lcp import ConvergenceError
from signorini_lab.mesh import BoundaryTag, refine, triangulate
from signorini_lab.scalar import (
    evaluate_boundary_data,
    gauss_green_check_scalar,
    recover_flux,
    scalar_energy,
    solve_scalar,
)
from signorini_lab.scene import load_scene


@pytest.fixture(scope="module")
def pair_problem():
    sc = load_scene("pair.json")
    mesh = triangulate(sc.domain("obstacle1"), sc.parameter("h"))
    return mesh, solve_scalar(mesh, Expression("x"))


def test_constant_positive_datum_is_exact(annulus_mesh):
    sol = solve_scalar(annulus_mesh, 0.5)
    assert np.max(np.abs(sol.u - 0.5)) < 1e-13
    assert len(sol.active_set) == 0
    assert sol.complementarity_ok()


def test_linear_datum_without_obstacle(unit_disk):
    mesh = triangulate(unit_disk, 1 / 16)
    sol = solve_scalar(mesh, Expression("x"))
    assert np.max(np.abs(sol.u - mesh.nodes[:, 0])) < 1e-12
    flux = recover_flux(sol, mesh, BoundaryTag.GAMMA)
    nx = mesh.node_normals[flux.nodes, 0]
    assert np.max(np.abs(flux.values - nx)) < 1e-12


def test_radial_solution_close(annulus_mesh):
    sol = solve_scalar(annulus_mesh, -1.0)
    r = np.linalg.norm(annulus_mesh.nodes, axis=1)
    exact, _, _ = radial_annulus(r)
    m = annulus_mesh
    assert p1_l2(m.nodes, m.triangles, sol.u - exact) / p1_l2(m.nodes, m.triangles, exact) < 1e-3
    assert set(sol.active_set) == set(sol.obstacle_nodes)
    assert np.all(sol.reactions > 0)


def test_minimizes_energy_over_feasible_perturbations(pair_problem):
    mesh, sol = pair_problem
    rng = np.random.default_rng(7)
    bnd = mesh.nodes_with_tag(BoundaryTag.OUTER, BoundaryTag.GAMMA)
    obs = sol.obstacle_nodes
    e0 = scalar_energy(mesh, sol.u)
    for _ in range(100):
        v = sol.u + rng.normal(scale=10 ** rng.uniform(-4, -1), size=mesh.n_nodes)
        v[bnd] = sol.u[bnd]
        v[obs] = np.maximum(v[obs], 0.0)
        assert scalar_energy(mesh, v) >= e0 - 1e-12


def test_rotation_equivariance():
    # rotating the datum by one sector permutes the solution the same way
    N, nr = 48, 12
    mesh = polar_annulus(N, nr)
    f = lambda x, y: 0.3 + np.cos(np.arctan2(y, x)) + 0.5 * np.sin(3 * np.arctan2(y, x))
    g = lambda x, y: f(*_rotate(x, y, -2 * math.pi / N))
    u = solve_scalar(mesh, f).u.reshape(nr + 1, N)
    w = solve_scalar(mesh, g).u.reshape(nr + 1, N)
    assert np.max(np.abs(np.roll(u, 1, axis=1) - w)) < 1e-12
    radial = solve_scalar(mesh, -1.0).u.reshape(nr + 1, N)
    assert np.max(np.ptp(radial, axis=1)) < 1e-13


def _rotate(x, y, a):
    return math.cos(a) * x - math.sin(a) * y, math.sin(a) * x + math.cos(a) * y


def test_pgs_agrees_with_pdas(pair_problem):
    mesh, sol = pair_problem
    ref = solve_scalar(mesh, Expression("x"), solver="pgs")
    assert np.max(np.abs(ref.u - sol.u)) < 1e-8
    assert sol.complementarity_ok() and ref.complementarity_ok()


def test_convergence_rates_at_least_0_9(unit_disk):
    mesh = triangulate(boolean_ops(unit_disk, circle((0, 0), 0.3, 64, source="obstacle1"), "difference"), 1 / 16)
    _, _, flux_gamma = radial_annulus(1.0)
    flux_err, l2_err = [], []
    for k in range(3):
        if k:
            mesh = refine(mesh)
        sol = solve_scalar(mesh, -1.0)
        flux_err.append(np.max(np.abs(recover_flux(sol, mesh, BoundaryTag.GAMMA).values - flux_gamma)))
        exact, _, _ = radial_annulus(np.linalg.norm(mesh.nodes, axis=1))
        l2_err.append(p1_l2(mesh.nodes, mesh.triangles, sol.u - exact))
    for e in (flux_err, l2_err):
        assert min(e[0] / e[1], e[1] / e[2]) >= 2 ** 0.9


def test_gauss_green_constant_field_vanishes(annulus_mesh, unit_disk):
    sol = solve_scalar(annulus_mesh, 0.5)
    V = boolean_ops(unit_disk, circle((0, 0), 0.3, 128), "difference")
    rep = gauss_green_check_scalar(sol, V, annulus_mesh)
    assert abs(rep.volume) < 1e-20 and abs(rep.boundary) < 1e-12


def test_gauss_green_sub_annulus(annulus_mesh):
    sol = solve_scalar(annulus_mesh, -1.0)
    V = boolean_ops(circle((0, 0), 0.7, 256), circle((0, 0), 0.4, 256), "difference")
    rep = gauss_green_check_scalar(sol, V, annulus_mesh)
    beta = 1 / math.log(0.3)
    oracle = 2 * math.pi * beta**2 * math.log(0.7 / 0.4)
    assert rep.volume == pytest.approx(oracle, rel=5e-3)
    assert rep.residual < 5e-3 * oracle
    assert rep.bookkeeping <= rep.quadrature_bound


def test_errors(annulus_mesh):
    with pytest.raises(ConvergenceError):
        solve_scalar(annulus_mesh, -1.0, max_iter=1)
    with pytest.raises(ValueError):
        solve_scalar(annulus_mesh, 1.0, solver="cg")
    with pytest.raises(ValueError):
        solve_scalar(annulus_mesh, lambda x, y: np.where(x > 0, 1.0, np.nan))
    with pytest.raises(KeyError):
        recover_flux(solve_scalar(annulus_mesh, 0.5), annulus_mesh, "nowhere")


def test_evaluate_boundary_data_shapes():
    pts = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert evaluate_boundary_data(2.0, pts).shape == (2,)
    v = evaluate_boundary_data(Expression("x, y"), pts, ncomp=2)
    assert np.array_equal(v, pts)
