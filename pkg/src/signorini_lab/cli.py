"""Command-line entry point: ``signorini-lab <subcommand> [flags]``.

Every run writes its outputs to ``<out>/<command>-<config hash>/`` together
with a ``manifest.json`` (RunManifest).  Numeric outputs depend only on the
inputs; wall-clock timings live in the manifest alone.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .elastic import LameField, RigidMotion, fit_rigid_motion, recover_traction, solve_elastic, stress_tensors
from .expr import Expression, ExpressionError
from .geometry import (
    EdgeTag,
    GeometryError,
    check_appendix_lemmas,
    classify_boundary,
    compute_G0,
    compute_V,
)
from .inverse import (
    ExperimentConfig,
    UpsilonQuery,
    distinguishability,
    forward_map,
    ngon_discretization_bound,
    reconstruct,
    star_obstacle,
    synthetic_target,
    upsilon_empty_certificate,
    upsilon_membership,
    upsilon_tolerance,
)
from .lcp import ConvergenceError
from .mesh import BoundaryTag, MeshError, refine, triangulate, write_vtk
from .scalar import gauss_green_check_scalar, recover_flux, solve_scalar
from .elastic import gauss_green_check_elastic
from .scene import SceneError, load_scene

__all__ = ["main", "cli_dispatch", "RunManifest", "COMMANDS"]

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_USAGE = 0, 1, 2, 64

COMMANDS = ("solve-scalar", "solve-elastic", "geometry", "distinguish", "counterexample",
            "upsilon", "gauss-green", "reconstruct", "convergence")

USAGE = "usage: signorini-lab {" + ",".join(COMMANDS) + "} [--scene PATH] [--f EXPR] [--h H] " \
        "[--levels N] [--out DIR] [--seed N] [--tol TOL]\n"


def _clean(v):
    """JSON-safe conversion: numpy scalars/arrays, NaN/inf as null."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class RunManifest:
    command: str
    config_hash: str
    versions: dict
    outputs: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, "config_hash": self.config_hash, "versions": self.versions,
                "outputs": sorted(self.outputs), "timings": self.timings}


def _versions() -> dict:
    import scipy
    import shapely

    return {"signorini_lab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "shapely": shapely.__version__, "python": platform.python_version()}


class Run:
    """Per-run output directory and manifest bookkeeping."""

    def __init__(self, command: str, args: argparse.Namespace, scene_raw: dict | None):
        cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "command")}
        cfg["command"] = command
        cfg["scene_content"] = scene_raw
        self.hash = hashlib.sha256(json.dumps(_clean(cfg), sort_keys=True).encode()).hexdigest()[:16]
        self.dir = Path(args.out) / f"{command}-{self.hash}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command, self.hash, _versions())
        self._t0 = time.perf_counter()
        self._mark = self._t0

    def tick(self, label: str) -> None:
        now = time.perf_counter()
        self.manifest.timings[label] = round(now - self._mark, 6)
        self._mark = now

    def _register(self, name: str) -> Path:
        if name not in self.manifest.outputs:
            self.manifest.outputs.append(name)
        return self.dir / name

    def json(self, name: str, obj) -> None:
        self._register(name).write_text(dumps(obj), encoding="utf-8")

    def csv(self, name: str, header, rows) -> None:
        with open(self._register(name), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            for row in rows:
                w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])

    def text(self, name: str, content: str) -> None:
        self._register(name).write_text(content, encoding="utf-8")

    def vtk(self, name: str, mesh, point_data=None, cell_data=None) -> None:
        write_vtk(self._register(name), mesh, point_data, cell_data)

    def finish(self) -> None:
        self.manifest.timings["total"] = round(time.perf_counter() - self._t0, 6)
        self._register("manifest.json")
        (self.dir / "manifest.json").write_text(dumps(self.manifest.to_dict()), encoding="utf-8")


# ------------------------------------------------------------------ helpers

def _scene(args):
    if not args.scene:
        raise SceneError("--scene is required")
    return load_scene(args.scene)


def _h(args, scene) -> float:
    h = args.h if args.h is not None else scene.parameter("h", 1 / 32)
    if not h > 0:
        raise ValueError("--h must be positive")
    return float(h)


def _expr(args, scene, default: str, ncomp: int | None = None) -> Expression:
    """--f, else the scene datum when it has the right arity, else ``default``."""
    if args.f is not None:
        e = Expression(args.f)
    else:
        e = Expression(str(scene.parameter("f", default)))
        if ncomp is not None and e.ncomp != ncomp:
            e = Expression(default)
    if ncomp is not None and e.ncomp != ncomp:
        raise ExpressionError(f"boundary datum needs {ncomp} comma-separated component(s), got {e.ncomp}")
    return e


def _rotation(args, scene) -> RigidMotion:
    rot = scene.parameter("rotation", {}) or {}
    omega = args.omega if args.omega is not None else rot.get("omega")
    if omega is None:
        raise ValueError("--omega is required (or a 'rotation' block in the scene)")
    if "center" in rot:
        p = np.asarray(rot["center"], dtype=float)
    elif "obstacle1" in scene.obstacles:
        p = scene.obstacle("obstacle1").vertices().mean(axis=0)
    else:
        p = np.zeros(2)
    c_spec = args.c if args.c is not None else "-Ap"
    if c_spec.replace(" ", "") in ("-Ap", "-A*p"):
        return RigidMotion.about(p, omega)
    try:
        c = [float(v) for v in c_spec.split(",")]
    except ValueError as exc:
        raise ValueError(f"--c must be '-Ap' or 'cx,cy', got {c_spec!r}") from exc
    if len(c) != 2:
        raise ValueError("--c needs two components")
    return RigidMotion(c, omega)


def _lame(scene, mesh) -> LameField:
    return LameField.from_functions(mesh, scene.mu, scene.lam)


def _obstacle_key(args) -> str | None:
    return None if args.obstacle in ("none", "") else args.obstacle


def _gnuplot(title: str, data: str, xlabel: str, ylabel: str, using: str, log: bool = True) -> str:
    lines = [
        "set terminal pngcairo size 800,600",
        f"set output '{Path(data).stem}.png'",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
    ]
    if log:
        lines.append("set logscale xy")
    lines.append(f"plot '{data}' using {using} with linespoints")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ commands

def cmd_solve_scalar(args, run: Run, scene) -> dict:
    h = _h(args, scene)
    f = _expr(args, scene, "0", 1)
    mesh = triangulate(scene.domain(_obstacle_key(args)), h)
    for _ in range(args.levels - 1):
        mesh = refine(mesh)
    run.tick("mesh")
    sol = solve_scalar(mesh, f)
    run.tick("solve")
    out = {"n_nodes": mesh.n_nodes, "n_triangles": mesh.n_triangles, "h": mesh.h,
           "iterations": sol.iterations, "complementarity_residual": sol.residual,
           "complementarity_ok": sol.complementarity_ok(), "active_nodes": len(sol.active_set),
           "obstacle_nodes": len(sol.obstacle_nodes), "f": f.text}
    if f.is_constant:
        out["max_deviation_from_constant"] = float(np.max(np.abs(sol.u - f.constant_value())))
    for tag in (BoundaryTag.GAMMA, BoundaryTag.OBSTACLE):
        if np.any(mesh.boundary_tags == int(tag)):
            meas = recover_flux(sol, mesh, tag)
            name = tag.name.lower()
            out[f"flux_{name}_linf"] = meas.norm_inf()
            out[f"flux_{name}_mean"] = float(np.mean(meas.values))
            run.csv(f"flux_{name}.csv", ["arc_length", "flux"], meas.as_rows())
    run.vtk("solution.vtk", mesh, point_data={"u": sol.u})
    return out


def cmd_solve_elastic(args, run: Run, scene) -> dict:
    h = _h(args, scene)
    f = _expr(args, scene, "0, 0", 2)
    mesh = triangulate(scene.domain(_obstacle_key(args)), h)
    for _ in range(args.levels - 1):
        mesh = refine(mesh)
    lame = _lame(scene, mesh)
    run.tick("mesh")
    sol = solve_elastic(mesh, lame, f)
    run.tick("solve")
    rm, fit_res = fit_rigid_motion(sol.u, mesh)
    out = {"n_nodes": mesh.n_nodes, "h": mesh.h, "iterations": sol.iterations,
           "complementarity_residual": sol.residual, "complementarity_ok": sol.complementarity_ok(),
           "active_nodes": len(sol.active_set), "obstacle_nodes": len(sol.obstacle_nodes),
           "rigid_fit": {"c": list(rm.c), "omega": rm.omega, "residual": fit_res}, "f": f.text}
    for tag in (BoundaryTag.GAMMA, BoundaryTag.OBSTACLE):
        if np.any(mesh.boundary_tags == int(tag)):
            meas = recover_traction(sol, mesh, lame, tag)
            name = tag.name.lower()
            out[f"traction_{name}_linf"] = meas.norm_inf()
            out[f"tangential_{name}_linf"] = float(np.max(np.abs(meas.tangential)))
            rows = np.column_stack([meas.arc, meas.values, meas.normal, meas.tangential])
            run.csv(f"traction_{name}.csv", ["arc_length", "tx", "ty", "normal", "tangential"], rows)
    if len(sol.obstacle_nodes):
        out["pressure_max"] = float(sol.pressure.max())
        out["pressure_min"] = float(sol.pressure.min())
    S = stress_tensors(mesh, sol.u, lame)
    run.vtk("solution.vtk", mesh, point_data={"displacement": sol.u},
            cell_data={"stress": np.column_stack([S[:, 0, 0], S[:, 1, 1], S[:, 0, 1]])})
    return out


def cmd_geometry(args, run: Run, scene) -> dict:
    omega = scene.omega
    O1, O2 = scene.obstacle("obstacle1"), scene.obstacle("obstacle2")
    G0 = compute_G0(omega, O1, O2)
    V = compute_V(omega, G0, O1, O2)
    cls = classify_boundary(V, O1, O2)
    report = check_appendix_lemmas(scenes=[(omega, O1, O2)])
    run.tick("geometry")
    lengths = {t.value: float(sum(c.length for c in cls if c.tag == t)) for t in EdgeTag}
    counts = {t.value: sum(1 for c in cls if c.tag == t) for t in EdgeTag}
    run.csv("classified_edges.csv", ["x0", "y0", "x1", "y1", "tag", "nx", "ny"],
            [[*c.start, *c.end, c.tag.value, *c.normal] for c in cls])
    return {"G0_area": G0.area, "G0_components": len(G0.polygons), "V_area": V.area,
            "V_perimeter": V.perimeter, "edge_counts": counts, "edge_lengths": lengths,
            "perimeter_bound": O1.perimeter + O2.perimeter,
            "lemmas_passed": report.passed, "lemma_failures": report.failures()}


def _config(args, scene, kind=None) -> ExperimentConfig:
    kind = kind or args.kind
    default = "x" if kind == "scalar" else "0.1*x, 0"
    f = _expr(args, scene, default, 1 if kind == "scalar" else 2)
    return ExperimentConfig(kind, scene, f, _h(args, scene), levels=args.levels, seed=args.seed)


def cmd_distinguish(args, run: Run, scene) -> dict:
    cfg = _config(args, scene)
    rep = distinguishability(cfg, "obstacle1", "obstacle2")
    run.tick("distinguish")
    run.csv("gap_vs_h.csv", ["h", "gap_l2", "gap_linf"], [[l["h"], l["gap_l2"], l["gap_linf"]] for l in rep.levels])
    run.text("gap_vs_h.gp", _gnuplot("measurement gap", "gap_vs_h.csv", "h", "gap", "1:2"))
    return {"kind": cfg.kind, "f": cfg.f.text, "h": cfg.h, **rep.to_dict()}


def cmd_counterexample(args, run: Run, scene) -> dict:
    if args.kind == "scalar":
        f = _expr(args, scene, "0.5", 1)
        cfg = ExperimentConfig("scalar", scene, f, _h(args, scene))
        label = "nonnegative constant datum"
    else:
        rm = _rotation(args, scene)
        cfg = ExperimentConfig("elastic", scene, rm, _h(args, scene))
        label = f"rotation omega={rm.omega} c=({rm.c[0]}, {rm.c[1]})"
    rows, per_level = [], []
    for k in range(args.levels + 1):
        entry = {"h": cfg.h / 2**k}
        for key in ("obstacle1", "obstacle2"):
            meas = forward_map(cfg, key, refinements=k)
            entry[f"{key}_linf"] = meas.norm_inf()
        per_level.append(entry)
        rows.append([entry["h"], entry["obstacle1_linf"], entry["obstacle2_linf"]])
    rep = distinguishability(cfg, "obstacle1", "obstacle2")
    run.tick("counterexample")
    run.csv("measurement_vs_h.csv", ["h", "obstacle1_linf", "obstacle2_linf"], rows)
    run.text("measurement_vs_h.gp", _gnuplot("measurement size", "measurement_vs_h.csv", "h", "Linf", "1:2"))
    return {"datum": label, "kind": cfg.kind, "levels": per_level, **rep.to_dict()}


def cmd_upsilon(args, run: Run, scene) -> dict:
    rm = _rotation(args, scene)
    out = {"omega": rm.omega, "c": list(rm.c), "certificate_empty": upsilon_empty_certificate(rm, scene.omega),
           "obstacles": {}}
    for key, O in sorted(scene.obstacles.items()):
        tol = args.tol if args.tol is not None else upsilon_tolerance(O, rm)
        member, res = upsilon_membership(UpsilonQuery(O, rm, tol))
        out["obstacles"][key] = {"member": member, "residual": res, "tolerance": tol}
    first = out["obstacles"].get("obstacle1")
    if first:
        out["member"], out["residual"] = first["member"], first["residual"]
    run.tick("upsilon")
    return out


def _scaled_scene(scene, factor: int, mesh=None):
    """Scene with every circle refined by ``factor``; obstacle2 matches the mesh boundary."""
    raw = copy.deepcopy(scene.raw)
    for key in ("omega", "obstacle1", "obstacle2"):
        spec = raw.get(key)
        if spec and "circle" in spec:
            spec["circle"]["segments"] = int(spec["circle"].get("segments", 128)) * factor
    if mesh is not None and "circle" in raw.get("obstacle2", {}):
        raw["obstacle2"]["circle"]["segments"] = int(np.sum(mesh.boundary_tags == int(BoundaryTag.OBSTACLE)))
    return load_scene(raw)


def cmd_gauss_green(args, run: Run, scene) -> dict:
    kind = args.kind
    h = _h(args, scene)
    f = _expr(args, scene, "-1" if kind == "scalar" else "-0.05*x, -0.05*y", 1 if kind == "scalar" else 2)
    mesh = triangulate(scene.domain("obstacle2"), h)
    rows, levels = [], []
    for k in range(args.levels + 1):
        if k:
            mesh = refine(mesh)
        sc = _scaled_scene(scene, 2**k, mesh)
        omega, O1, O2 = sc.omega, sc.obstacle("obstacle1"), sc.obstacle("obstacle2")
        V = compute_V(omega, compute_G0(omega, O1, O2), O1, O2)
        if kind == "scalar":
            rep = gauss_green_check_scalar(solve_scalar(mesh, f), V, mesh)
        else:
            lame = _lame(scene, mesh)
            rep = gauss_green_check_elastic(solve_elastic(mesh, lame, f), V, mesh, lame)
        entry = {"h": mesh.h, "boundary": rep.boundary, "volume": rep.volume, "residual": rep.residual,
                 "divergence": rep.divergence, "bookkeeping": rep.bookkeeping,
                 "quadrature_bound": rep.quadrature_bound}
        levels.append(entry)
        rows.append([entry["h"], rep.residual, rep.bookkeeping])
    run.tick("gauss-green")
    ratios = [levels[i]["residual"] / levels[i + 1]["residual"] if levels[i + 1]["residual"] > 0 else None
              for i in range(len(levels) - 1)]
    run.csv("residual_vs_h.csv", ["h", "residual", "bookkeeping"], rows)
    run.text("residual_vs_h.gp", _gnuplot("Gauss-Green residual", "residual_vs_h.csv", "h", "residual", "1:2"))
    return {"kind": kind, "f": f.text, "levels": levels, "ratios": ratios}


def cmd_reconstruct(args, run: Run, scene) -> dict:
    cfg = _config(args, scene)
    center = np.asarray(args.center, dtype=float) if args.center else np.zeros(2)
    if cfg.kind == "elastic" and args.f is None and scene.parameter("rotation"):
        cfg = ExperimentConfig("elastic", scene, _rotation(args, scene), cfg.h)
        center = np.asarray(scene.parameter("rotation")["center"], dtype=float)
    if args.crime_free:
        cfg = ExperimentConfig(cfg.kind, scene, cfg.f, cfg.h, crime_free=True)
    target = synthetic_target(cfg, star_obstacle(center, args.radius))
    res = reconstruct(cfg, target, args.init, K=args.K, center=center)
    run.tick("reconstruct")
    run.csv("misfit_history.csv", ["iteration", "misfit"], [[i, m] for i, m in enumerate(res.history)])
    run.text("misfit_history.gp", _gnuplot("misfit history", "misfit_history.csv", "iteration", "misfit",
                                           "1:2", log=False).replace("set grid", "set grid\nset logscale y"))
    out = res.to_dict()
    out["reconstruction_status"] = out.pop("status")
    out.update({"target_radius": args.radius, "init": args.init, "relative_error_r0":
                abs(res.r0 - args.radius) / args.radius, "crime_free": cfg.crime_free, "kind": cfg.kind})
    return out


def cmd_convergence(args, run: Run, scene) -> dict:
    h = _h(args, scene)
    f = _expr(args, scene, "-1", 1)
    mesh = triangulate(scene.domain("obstacle1"), h)
    curves = {t.curve for r in scene.omega.rings() for t in r.tags}
    ocurves = {t.curve for r in scene.obstacle("obstacle1").rings() for t in r.tags}
    radial = (len(curves) == 1 and len(ocurves) == 1 and None not in curves | ocurves and f.is_constant
              and np.allclose(next(iter(curves))[:2], next(iter(ocurves))[:2]))
    levels, rows = [], []
    for k in range(args.levels + 1):
        if k:
            mesh = refine(mesh)
        sol = solve_scalar(mesh, f)
        flux = recover_flux(sol, mesh, BoundaryTag.OBSTACLE)
        entry = {"h": mesh.h, "n_nodes": mesh.n_nodes, "obstacle_flux_mean": float(np.mean(flux.values)),
                 "iterations": sol.iterations}
        if radial:
            from .benchmarks import radial_solution, relative_l2_error

            (cx, cy, R), (_, _, r0) = next(iter(curves)), next(iter(ocurves))
            exact, flux_exact = radial_solution(mesh.nodes - (cx, cy), r0, R, f.constant_value())
            entry["l2_relative_error"] = relative_l2_error(mesh, sol.u, exact)
            entry["flux_exact"] = flux_exact
            entry["flux_relative_error"] = abs(entry["obstacle_flux_mean"] - flux_exact) / abs(flux_exact)
        levels.append(entry)
        rows.append([entry["h"], entry.get("l2_relative_error", float("nan")), entry["obstacle_flux_mean"]])
    run.tick("convergence")
    ratios = None
    if radial:
        ratios = [levels[i]["l2_relative_error"] / levels[i + 1]["l2_relative_error"] for i in range(len(levels) - 1)]
    run.csv("error_vs_h.csv", ["h", "l2_relative_error", "obstacle_flux_mean"], rows)
    run.text("error_vs_h.gp", _gnuplot("radial benchmark", "error_vs_h.csv", "h", "relative L2 error", "1:2"))
    return {"f": f.text, "radial_oracle": bool(radial), "levels": levels, "ratios": ratios}


HANDLERS = {
    "solve-scalar": cmd_solve_scalar,
    "solve-elastic": cmd_solve_elastic,
    "geometry": cmd_geometry,
    "distinguish": cmd_distinguish,
    "counterexample": cmd_counterexample,
    "upsilon": cmd_upsilon,
    "gauss-green": cmd_gauss_green,
    "reconstruct": cmd_reconstruct,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="signorini-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scene", help="scene JSON file (shipped scenes may be named directly)")
        p.add_argument("--f", help="boundary datum expression in x, y (vector: 'fx, fy')")
        p.add_argument("--h", type=float, help="target mesh size")
        p.add_argument("--levels", type=int, default=None, help="refinement levels")
        p.add_argument("--out", default="runs", help="output root directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--kind", choices=("scalar", "elastic"), default="scalar" if name != "counterexample" else "elastic")
        p.add_argument("--obstacle", default="obstacle1", help="obstacle key or 'none'")
        p.add_argument("--omega", type=float, default=None, help="rotation rate of the rigid motion")
        p.add_argument("--c", default=None, help="translation: '-Ap' or 'cx,cy'")
        p.add_argument("--radius", type=float, default=0.25, help="reconstruct: target disk radius")
        p.add_argument("--init", type=float, default=0.35, help="reconstruct: initial radius")
        p.add_argument("--K", type=int, default=0, help="reconstruct: number of Fourier modes")
        p.add_argument("--center", type=float, nargs=2, default=None, help="reconstruct: star center")
        p.add_argument("--crime-free", action="store_true", help="reconstruct: target on an h*sqrt(2) mesh")
    return parser


_DEFAULT_LEVELS = {"solve-scalar": 1, "solve-elastic": 1, "gauss-green": 2, "convergence": 2,
                   "counterexample": 2}


def cli_dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS:
        if argv and argv[0] in ("-h", "--help"):
            sys.stdout.write(USAGE)
            return EXIT_OK
        sys.stderr.write(USAGE)
        if argv:
            sys.stderr.write(f"unknown subcommand {argv[0]!r}\n")
        return EXIT_USAGE
    # values such as "-Ap" or "-0.05*x, 0" would otherwise be read as flags
    for i in range(len(argv) - 2, -1, -1):
        if argv[i] in ("--f", "--c") and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"{argv[i]}={argv[i + 1]}"]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    if args.levels is None:
        args.levels = _DEFAULT_LEVELS.get(args.command, 1)
    try:
        if args.levels < 1 and args.command not in ("gauss-green", "convergence", "counterexample"):
            raise ValueError("--levels must be at least 1")
        if args.levels < 0:
            raise ValueError("--levels must be nonnegative")
        scene = _scene(args)
        run = Run(args.command, args, scene.raw)
        result = HANDLERS[args.command](args, run, scene)
        result = {"command": args.command, "scene": scene.name, "status": "ok", **result}
        run.json("result.json", result)
        run.finish()
        sys.stdout.write(dumps({**result, "output_dir": str(run.dir)}))
        return EXIT_OK
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONVERGENCE
    except (ValueError, KeyError, GeometryError, MeshError, SceneError, ExpressionError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
